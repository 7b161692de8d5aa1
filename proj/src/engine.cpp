#include "agielo/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "agielo/errors.hpp"
#include "agielo/random.hpp"

namespace agielo {
namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line,
                                        std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) {
    throw FormatError("line " + std::to_string(line_no) +
                      ": unterminated quoted field");
  }
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("config key '" + key + "': expected a non-negative "
                      "integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

const char* category_name(Category c) {
  return c == Category::kAgent ? "agent" : "test_case";
}

ScoreMatrix::ScoreMatrix(std::vector<std::string> agent_ids,
                         std::vector<std::string> case_ids,
                         std::string scoring_fn_id)
    : agent_ids_(std::move(agent_ids)),
      case_ids_(std::move(case_ids)),
      scoring_fn_id_(std::move(scoring_fn_id)),
      values_(agent_ids_.size() * case_ids_.size(), kAbsent) {
  std::unordered_set<std::string> seen;
  for (const auto& id : agent_ids_) {
    if (id.empty()) throw FormatError("empty agent id");
    if (!seen.insert(id).second) {
      throw FormatError("duplicate agent id '" + id + "'");
    }
  }
  seen.clear();
  for (const auto& id : case_ids_) {
    if (id.empty()) throw FormatError("empty case id");
    if (!seen.insert(id).second) {
      throw FormatError("duplicate case id '" + id + "'");
    }
  }
}

void ScoreMatrix::set(std::size_t agent, std::size_t test_case, double value) {
  if (agent >= n_agents() || test_case >= n_cases()) {
    throw std::out_of_range("score matrix index out of range");
  }
  if (!std::isfinite(value)) {
    throw FormatError("non-finite value for (" + agent_ids_[agent] + ", " +
                      case_ids_[test_case] + ")");
  }
  double& slot = values_[test_case * n_agents() + agent];
  if (!std::isnan(slot)) {
    throw FormatError("duplicate (agent, case) pair (" + agent_ids_[agent] +
                      ", " + case_ids_[test_case] + ")");
  }
  slot = value;
  ++n_present_;
}

std::optional<double> ScoreMatrix::at(std::size_t agent,
                                      std::size_t test_case) const {
  double v = values_.at(test_case * n_agents() + agent);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::vector<ScoreMatrix::Cell> ScoreMatrix::cells() const {
  std::vector<Cell> out;
  out.reserve(n_present_);
  for (std::size_t t = 0; t < n_cases(); ++t) {
    for (std::size_t a = 0; a < n_agents(); ++a) {
      double v = values_[t * n_agents() + a];
      if (!std::isnan(v)) out.push_back({a, t, v});
    }
  }
  return out;
}

ScoreMatrix load_score_matrix(std::istream& in,
                              const std::string& scoring_fn_id) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line, line_no);
      break;
    }
  }
  if (header.empty()) throw FormatError("empty matrix: no header row");
  if (header[0] != "case_id") {
    throw FormatError("header must start with 'case_id', got '" + header[0] +
                      "'");
  }
  if (header.size() < 2) throw FormatError("header names no agents");
  std::vector<std::string> agents(header.begin() + 1, header.end());

  struct Row {
    std::size_t line_no;
    std::string case_id;
    std::vector<std::string> fields;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    std::string id = fields[0];
    fields.erase(fields.begin());
    rows.push_back({line_no, std::move(id), std::move(fields)});
  }
  if (rows.empty()) throw FormatError("empty matrix: no test case rows");

  std::vector<std::string> cases;
  cases.reserve(rows.size());
  for (const auto& r : rows) cases.push_back(r.case_id);

  ScoreMatrix matrix(std::move(agents), std::move(cases), scoring_fn_id);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& r = rows[t];
    for (std::size_t a = 0; a < r.fields.size(); ++a) {
      const auto& cell = r.fields[a];
      if (cell.empty()) continue;
      auto v = parse_double(cell);
      if (!v || !std::isfinite(*v)) {
        throw FormatError("line " + std::to_string(r.line_no) + " (case '" +
                          r.case_id + "'), column '" +
                          matrix.agent_ids()[a] + "': invalid value '" + cell +
                          "'");
      }
      matrix.set(a, t, *v);
    }
  }
  if (matrix.n_matches() == 0) throw FormatError("empty matrix: no cells");
  return matrix;
}

ScoreMatrix load_score_matrix_file(const std::string& path,
                                   const std::string& scoring_fn_id) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return load_score_matrix(in, scoring_fn_id);
}

void write_score_matrix(std::ostream& out, const ScoreMatrix& matrix) {
  out << "case_id";
  for (const auto& a : matrix.agent_ids()) out << ',' << quote_csv(a);
  out << '\n';
  char buf[64];
  for (std::size_t t = 0; t < matrix.n_cases(); ++t) {
    out << quote_csv(matrix.case_ids()[t]);
    for (std::size_t a = 0; a < matrix.n_agents(); ++a) {
      out << ',';
      if (auto v = matrix.at(a, t)) {
        // Shortest round-trip representation.
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *v);
        out.write(buf, ptr - buf);
      }
    }
    out << '\n';
  }
}

std::vector<MatchRecord> make_records(const ScoreMatrix& matrix,
                                      const ScoringFunction& fn) {
  std::vector<MatchRecord> records;
  records.reserve(matrix.n_matches());
  for (const auto& cell : matrix.cells()) {
    const auto& agent = matrix.agent_ids()[cell.agent];
    const auto& tc = matrix.case_ids()[cell.test_case];
    double s = 0.0;
    try {
      s = apply_scoring(fn, cell.value);
    } catch (const std::domain_error& e) {
      throw FormatError("cell (agent '" + agent + "', case '" + tc +
                        "'): " + e.what());
    }
    records.push_back({agent, tc, cell.value, s});
  }
  return records;
}

void RunConfig::validate() const {
  if (passes < 1) throw ConfigError("passes must be at least 1");
  double prev = 0.0;
  for (double p : checkpoints) {
    if (!(p > prev) || !(p <= 100.0)) {
      throw ConfigError(
          "checkpoints must be strictly increasing within (0, 100]");
    }
    prev = p;
  }
}

std::vector<double> parse_checkpoint_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    auto v = parse_double(t);
    if (!v || !std::isfinite(*v)) {
      throw ConfigError("bad checkpoint value '" + t + "'");
    }
    out.push_back(*v);
  }
  return out;
}

RunSettings parse_run_settings(std::istream& in) {
  RunSettings settings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key == "seed") {
      settings.config.seed = parse_u64(value, key);
    } else if (key == "passes") {
      settings.config.passes = parse_u64(value, key);
    } else if (key == "variant") {
      try {
        settings.config.constants.variant = parse_variant(value.c_str());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "scoring") {
      try {
        make_scoring_function(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      settings.scoring = value;
    } else if (key == "checkpoints") {
      settings.config.checkpoints = parse_checkpoint_list(value);
    } else if (key == "k_factor") {
      auto v = parse_double(value);
      if (!v || !(*v > 0.0)) throw ConfigError("k_factor must be positive");
      settings.config.constants.k_factor = *v;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  settings.config.validate();
  return settings;
}

std::vector<ScheduledMatch> build_schedule(const ScoreMatrix& matrix,
                                           const RunConfig& config) {
  if (matrix.n_matches() == 0) {
    throw std::invalid_argument("cannot schedule an empty matrix");
  }
  config.validate();
  std::vector<ScheduledMatch> base;
  base.reserve(matrix.n_matches());
  for (const auto& cell : matrix.cells()) {
    base.push_back({cell.agent, cell.test_case});
  }
  std::mt19937_64 rng(config.seed);
  std::vector<ScheduledMatch> schedule;
  schedule.reserve(base.size() * config.passes);
  for (std::size_t pass = 0; pass < config.passes; ++pass) {
    auto shuffled = base;
    fisher_yates(std::span<ScheduledMatch>(shuffled), rng);
    schedule.insert(schedule.end(), shuffled.begin(), shuffled.end());
  }
  return schedule;
}

std::vector<Player> initial_players(const ScoreMatrix& matrix,
                                    const RatingConstants& constants) {
  std::vector<Player> players;
  players.reserve(matrix.n_agents() + matrix.n_cases());
  for (const auto& id : matrix.agent_ids()) {
    players.push_back({id, Category::kAgent, constants.initial_rating(), 0});
  }
  for (const auto& id : matrix.case_ids()) {
    players.push_back({id, Category::kTestCase, constants.initial_rating(), 0});
  }
  return players;
}

RunResult run_ratings(const ScoreMatrix& matrix, const RunConfig& config) {
  const auto fn = make_scoring_function(matrix.scoring_fn_id());
  const auto schedule = build_schedule(matrix, config);
  const auto& c = config.constants;

  // Scores indexed like ScoreMatrix storage; scoring errors surface before
  // any rating moves.
  const std::size_t n_agents = matrix.n_agents();
  std::vector<double> scores(n_agents * matrix.n_cases(), kAbsent);
  for (const auto& cell : matrix.cells()) {
    try {
      scores[cell.test_case * n_agents + cell.agent] =
          apply_scoring(fn, cell.value);
    } catch (const std::domain_error& e) {
      throw FormatError("cell (agent '" + matrix.agent_ids()[cell.agent] +
                        "', case '" + matrix.case_ids()[cell.test_case] +
                        "'): " + e.what());
    }
  }

  RunResult result;
  result.n_agents = n_agents;
  result.players = initial_players(matrix, c);

  auto snapshot = [&](double pct, std::size_t done) {
    RatingSnapshot snap{pct, done, {}};
    snap.ratings.reserve(result.players.size());
    for (const auto& p : result.players) snap.ratings.push_back(p.rating);
    result.snapshots.push_back(std::move(snap));
  };

  const std::size_t total = schedule.size();
  std::vector<std::size_t> targets;
  for (double pct : config.checkpoints) {
    auto t = static_cast<std::size_t>(
        std::ceil(pct / 100.0 * static_cast<double>(total) - 1e-9));
    targets.push_back(std::clamp<std::size_t>(t, 1, total));
  }

  std::size_t next = 0;
  for (std::size_t k = 0; k < total; ++k) {
    const auto& m = schedule[k];
    auto& agent = result.players[m.agent];
    auto& tc = result.players[n_agents + m.test_case];
    const auto out = play_match(agent.rating, tc.rating,
                                scores[m.test_case * n_agents + m.agent], c);
    agent.rating = out.agent;
    tc.rating = out.test_case;
    ++agent.matches_played;
    ++tc.matches_played;
    while (next < targets.size() && k + 1 == targets[next]) {
      snapshot(config.checkpoints[next], k + 1);
      ++next;
    }
  }
  result.matches_played = total;
  return result;
}

}  // namespace agielo
