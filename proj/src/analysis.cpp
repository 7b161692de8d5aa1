#include "agielo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "agielo/rating.hpp"
#include "json.hpp"

namespace agielo {
namespace {

double round6(double x) { return std::round(x * 1e6) / 1e6; }

std::int64_t bin_index(double rating, double width) {
  return static_cast<std::int64_t>(std::floor(rating / width));
}

RatingTable table_for(std::span<const Player> players,
                      std::span<const Rating> ratings, Category category) {
  RatingTable out;
  for (std::size_t i = 0; i < players.size(); ++i) {
    if (players[i].category == category) out[players[i].id] = ratings[i].mu;
  }
  return out;
}

double lookup(const RatingTable& table, const std::string& id) {
  auto it = table.find(id);
  if (it == table.end()) {
    throw std::invalid_argument("no rating for player '" + id + "'");
  }
  return it->second;
}

struct Consistency {
  double rho_t;
  double rho_a;
};

}  // namespace

double predict_metric(double r_agent, double r_case, const ScoringFunction& fn) {
  return invert_scoring(fn, elo_expected_score(r_agent, r_case));
}

std::set<std::string> hard_set(const std::map<std::string, double>& case_ratings,
                               double r_agent, double m_theta,
                               const ScoringFunction& fn) {
  std::set<std::string> out;
  for (const auto& [id, r_case] : case_ratings) {
    if (predict_metric(r_agent, r_case, fn) < m_theta) out.insert(id);
  }
  return out;
}

double oracle_rating(double r_t_max, double s_theta) {
  if (!(s_theta > 0.0 && s_theta < 1.0)) {
    throw std::domain_error("confidence threshold must lie in (0, 1)");
  }
  return r_t_max - 400.0 * std::log10((1.0 - s_theta) / s_theta);
}

OracleSpec make_oracle_spec(double s_theta, const ScoringFunction& fn) {
  if (!(s_theta > 0.0 && s_theta < 1.0)) {
    throw std::domain_error("confidence threshold must lie in (0, 1)");
  }
  return {s_theta, invert_scoring(fn, s_theta)};
}

GapReport compute_gap_report(std::span<const Player> players,
                             std::vector<double> confidences,
                             const ScoringFunction& fn) {
  for (double c : confidences) {
    if (!(c > 0.0 && c < 1.0)) {
      throw std::domain_error("confidence threshold must lie in (0, 1), got " +
                              std::to_string(c));
    }
  }
  std::sort(confidences.begin(), confidences.end());
  confidences.erase(std::unique(confidences.begin(), confidences.end()),
                    confidences.end());

  const Player* hardest = nullptr;
  const Player* best = nullptr;
  for (const auto& p : players) {
    if (p.category == Category::kTestCase) {
      if (!hardest || p.rating.mu > hardest->rating.mu) hardest = &p;
    } else if (!best || p.rating.mu > best->rating.mu) {
      best = &p;
    }
  }
  if (!hardest || !best) {
    throw std::invalid_argument("gap report needs at least one agent and case");
  }

  GapReport report;
  report.hardest_case_id = hardest->id;
  report.r_t_max = hardest->rating.mu;
  report.best_agent_id = best->id;
  report.r_a_max = best->rating.mu;
  report.expected_metric = predict_metric(report.r_a_max, report.r_t_max, fn);
  for (double c : confidences) {
    const double oracle = oracle_rating(report.r_t_max, c);
    report.gaps.push_back({c, oracle, competency_gap(oracle, report.r_a_max)});
  }
  return report;
}

PercentileCurve::PercentileCurve(std::span<const double> case_ratings)
    : sorted_(case_ratings.begin(), case_ratings.end()) {
  if (sorted_.empty()) {
    throw std::invalid_argument("percentile curve needs at least one rating");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double PercentileCurve::operator()(double rating) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), rating);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

std::vector<PercentileCurve::Point> PercentileCurve::points() const {
  std::vector<Point> out;
  const auto n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
    out.push_back({sorted_[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("spearman: samples differ in length");
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("spearman: need at least two pairs");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;  // same for both rank vectors
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::domain_error("spearman: a sample is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

BinnedErrors binned_errors(std::span<const MatchRecord> records,
                           const RatingTable& agent_ratings,
                           const RatingTable& case_ratings,
                           const ScoringFunction& fn, double bin_width) {
  if (records.empty()) {
    throw std::invalid_argument("binned_errors needs at least one record");
  }
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw std::invalid_argument("bin width must be positive");
  }

  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::string, std::int64_t>, Acc> groups;
  for (const auto& r : records) {
    const auto bin = bin_index(lookup(case_ratings, r.case_id), bin_width);
    auto& acc = groups[{r.agent_id, bin}];
    acc.sum += r.raw_metric;
    ++acc.count;
  }

  BinnedErrors out;
  out.bin_width = bin_width;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (const auto& [key, acc] : groups) {
    const auto& [agent, bin] = key;
    const double lo = static_cast<double>(bin) * bin_width;
    const double center = lo + bin_width / 2.0;
    const double empirical = acc.sum / static_cast<double>(acc.count);
    const double predicted =
        predict_metric(lookup(agent_ratings, agent), center, fn);
    const double err = empirical - predicted;
    abs_sum += std::abs(err);
    sq_sum += err * err;
    out.cells.push_back(
        {agent, lo, lo + bin_width, acc.count, empirical, predicted});
  }
  const auto n = static_cast<double>(out.cells.size());
  out.mae = abs_sum / n;
  out.mse = sq_sum / n;
  return out;
}

namespace {

struct MeanPerformance {
  std::vector<double> per_case;   // NaN where a case has no cells
  std::vector<double> per_agent;  // NaN where an agent has no cells
};

MeanPerformance mean_performance(const ScoreMatrix& matrix) {
  std::vector<double> case_sum(matrix.n_cases(), 0.0);
  std::vector<double> agent_sum(matrix.n_agents(), 0.0);
  std::vector<std::size_t> case_n(matrix.n_cases(), 0);
  std::vector<std::size_t> agent_n(matrix.n_agents(), 0);
  for (const auto& c : matrix.cells()) {
    case_sum[c.test_case] += c.value;
    ++case_n[c.test_case];
    agent_sum[c.agent] += c.value;
    ++agent_n[c.agent];
  }
  MeanPerformance out;
  for (std::size_t t = 0; t < case_sum.size(); ++t) {
    out.per_case.push_back(case_n[t] ? case_sum[t] / case_n[t] : std::nan(""));
  }
  for (std::size_t a = 0; a < agent_sum.size(); ++a) {
    out.per_agent.push_back(agent_n[a] ? agent_sum[a] / agent_n[a]
                                       : std::nan(""));
  }
  return out;
}

double correlate(const std::vector<std::string>& ids,
                 const std::vector<double>& means, const RatingTable& ratings) {
  std::vector<double> r;
  std::vector<double> m;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (std::isnan(means[i])) continue;
    r.push_back(lookup(ratings, ids[i]));
    m.push_back(means[i]);
  }
  return spearman(r, m);
}

}  // namespace

ReliabilityReport consistency_report(const ScoreMatrix& matrix,
                                     std::span<const Player> players,
                                     const ScoringFunction& fn,
                                     double bin_width,
                                     std::span<const RatingSnapshot> snapshots) {
  if (matrix.n_agents() < 2 || matrix.n_cases() < 2) {
    throw std::invalid_argument(
        "consistency report needs at least two agents and two cases");
  }
  const auto means = mean_performance(matrix);
  const auto records = make_records(matrix, fn);

  auto evaluate = [&](std::span<const Rating> ratings) {
    const auto agents = table_for(players, ratings, Category::kAgent);
    const auto cases = table_for(players, ratings, Category::kTestCase);
    const auto errors = binned_errors(records, agents, cases, fn, bin_width);
    CheckpointMetrics m{};
    m.rho_t = correlate(matrix.case_ids(), means.per_case, cases);
    m.rho_a = correlate(matrix.agent_ids(), means.per_agent, agents);
    m.mae = errors.mae;
    m.mse = errors.mse;
    return m;
  };

  std::vector<Rating> final_ratings;
  final_ratings.reserve(players.size());
  for (const auto& p : players) final_ratings.push_back(p.rating);
  const auto final_metrics = evaluate(final_ratings);

  ReliabilityReport report;
  report.n_t = matrix.n_cases();
  report.n_a = matrix.n_agents();
  report.n_match = matrix.n_matches();
  report.rho_t = final_metrics.rho_t;
  report.rho_a = final_metrics.rho_a;
  report.mae = final_metrics.mae;
  report.mse = final_metrics.mse;
  report.bin_width = bin_width;
  for (const auto& snap : snapshots) {
    if (snap.ratings.size() != players.size()) {
      throw std::invalid_argument("snapshot does not match the player list");
    }
    auto m = evaluate(snap.ratings);
    m.match_percentage = snap.match_percentage;
    report.series.push_back(m);
  }
  return report;
}

std::vector<HistogramBin> rating_histogram(std::span<const Player> players,
                                           double bin_width) {
  if (players.empty()) return {};
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw std::invalid_argument("bin width must be positive");
  }
  auto [lo_it, hi_it] = std::minmax_element(
      players.begin(), players.end(),
      [](const Player& a, const Player& b) { return a.rating.mu < b.rating.mu; });
  const auto first = bin_index(lo_it->rating.mu, bin_width);
  const auto last = bin_index(hi_it->rating.mu, bin_width);
  std::vector<HistogramBin> bins;
  for (auto b = first; b <= last; ++b) {
    const double lo = static_cast<double>(b) * bin_width;
    bins.push_back({lo, lo + bin_width, 0, {}});
  }
  for (const auto& p : players) {
    auto& bin = bins[static_cast<std::size_t>(
        bin_index(p.rating.mu, bin_width) - first)];
    if (p.category == Category::kTestCase) {
      ++bin.case_count;
    } else {
      bin.agent_ids.push_back(p.id);
    }
  }
  return bins;
}

std::string report_to_json(const GapReport& gaps,
                           const ReliabilityReport* reliability,
                           const std::string& metric_name) {
  using json = nlohmann::ordered_json;
  json doc;
  json gap_rows = json::array();
  for (const auto& g : gaps.gaps) {
    gap_rows.push_back({{"confidence", round6(g.confidence)},
                        {"oracle_rating", round6(g.oracle_rating)},
                        {"gap", round6(g.gap)}});
  }
  doc["competency_gap"] = {
      {"metric", metric_name},
      {"hardest_case", gaps.hardest_case_id},
      {"r_t_max", round6(gaps.r_t_max)},
      {"best_agent", gaps.best_agent_id},
      {"r_a_max", round6(gaps.r_a_max)},
      {"expected_metric", round6(gaps.expected_metric)},
      {"gaps", std::move(gap_rows)},
  };
  if (reliability) {
    const auto& r = *reliability;
    json series = json::array();
    for (const auto& m : r.series) {
      series.push_back({{"match_percentage", m.match_percentage},
                        {"rho_t", round6(m.rho_t)},
                        {"rho_a", round6(m.rho_a)},
                        {"mae", round6(m.mae)},
                        {"mse", round6(m.mse)}});
    }
    doc["reliability"] = {
        {"n_t", r.n_t},
        {"n_a", r.n_a},
        {"n_match", r.n_match},
        {"rho_t", round6(r.rho_t)},
        {"rho_a", round6(r.rho_a)},
        {"mae", round6(r.mae)},
        {"mse", round6(r.mse)},
        {"bin_width", r.bin_width},
        {"series", std::move(series)},
    };
  }
  return doc.dump(1) + "\n";
}

void write_percentile_csv(std::ostream& out, const PercentileCurve& curve) {
  char buf[96];
  out << "rating,cumulative_fraction\n";
  for (const auto& p : curve.points()) {
    std::snprintf(buf, sizeof buf, "%.1f,%.6f\n", p.rating,
                  p.cumulative_fraction);
    out << buf;
  }
}

void write_histogram_csv(std::ostream& out,
                         const std::vector<HistogramBin>& bins) {
  char buf[96];
  out << "bin_lo,bin_hi,case_count,agent_ids_in_bin\n";
  for (const auto& b : bins) {
    std::snprintf(buf, sizeof buf, "%.1f,%.1f,%zu,", b.lo, b.hi, b.case_count);
    out << buf;
    for (std::size_t i = 0; i < b.agent_ids.size(); ++i) {
      if (i) out << ';';
      out << b.agent_ids[i];
    }
    out << '\n';
  }
}

}  // namespace agielo
