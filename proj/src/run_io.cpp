#include <cmath>
#include <unordered_map>

#include "agielo/engine.hpp"
#include "agielo/errors.hpp"
#include "agielo/random.hpp"
#include "json.hpp"

namespace agielo {
namespace {

using json = nlohmann::ordered_json;

double round1(double x) { return std::round(x * 10.0) / 10.0; }

json rating_entry(const std::string& id, const Rating& r) {
  return {{"id", id}, {"mu", round1(r.mu)}, {"sigma", round1(r.sigma)}};
}

Category parse_category(const std::string& s) {
  if (s == "agent") return Category::kAgent;
  if (s == "test_case") return Category::kTestCase;
  throw FormatError("unknown player category '" + s + "'");
}

template <typename T>
T field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(std::string("run document: missing field '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("run document: bad type for '") + key + "'");
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? field<T>(obj, key) : fallback;
}

}  // namespace

std::string run_to_json(const ScoreMatrix& matrix, const RunConfig& config,
                        const RunResult& result, const std::string& input) {
  json doc;
  doc["metadata"] = {
      {"seed", config.seed},
      {"variant", variant_name(config.constants.variant)},
      {"generator", kGeneratorName},
      {"scoring", matrix.scoring_fn_id()},
      {"passes", config.passes},
      {"n_agents", matrix.n_agents()},
      {"n_cases", matrix.n_cases()},
      {"n_matches", matrix.n_matches()},
      {"input", input},
  };
  json players = json::array();
  for (const auto& p : result.players) {
    players.push_back({{"id", p.id},
                       {"category", category_name(p.category)},
                       {"mu", round1(p.rating.mu)},
                       {"sigma", round1(p.rating.sigma)},
                       {"matches_played", p.matches_played}});
  }
  doc["players"] = std::move(players);
  json snaps = json::array();
  for (const auto& s : result.snapshots) {
    json ratings = json::array();
    for (std::size_t i = 0; i < s.ratings.size(); ++i) {
      ratings.push_back(rating_entry(result.players[i].id, s.ratings[i]));
    }
    snaps.push_back({{"match_percentage", s.match_percentage},
                     {"matches_completed", s.matches_completed},
                     {"players", std::move(ratings)}});
  }
  doc["snapshots"] = std::move(snaps);
  return doc.dump(1) + "\n";
}

RunDocument run_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("run document is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object()) throw FormatError("run document must be an object");

  RunDocument out;
  if (doc.contains("metadata")) {
    const auto& m = doc["metadata"];
    if (!m.is_object()) throw FormatError("metadata must be an object");
    auto& md = out.metadata;
    md.seed = field_or<std::uint64_t>(m, "seed", 0);
    md.variant = field_or<std::string>(m, "variant", "standard");
    md.generator = field_or<std::string>(m, "generator", "");
    md.scoring = field_or<std::string>(m, "scoring", "identity");
    md.passes = field_or<std::size_t>(m, "passes", 1);
    md.n_agents = field_or<std::size_t>(m, "n_agents", 0);
    md.n_cases = field_or<std::size_t>(m, "n_cases", 0);
    md.n_matches = field_or<std::size_t>(m, "n_matches", 0);
    md.input = field_or<std::string>(m, "input", "");
  }

  const auto players = field<json>(doc, "players");
  if (!players.is_array()) throw FormatError("players must be an array");
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& p : players) {
    if (!p.is_object()) throw FormatError("player entries must be objects");
    Player player;
    player.id = field<std::string>(p, "id");
    player.category = parse_category(field<std::string>(p, "category"));
    player.rating = {field<double>(p, "mu"), field<double>(p, "sigma")};
    player.matches_played = field_or<std::size_t>(p, "matches_played", 0);
    if (!std::isfinite(player.rating.mu) ||
        !std::isfinite(player.rating.sigma)) {
      throw FormatError("player '" + player.id + "' has non-finite rating");
    }
    if (!index.emplace(player.id, out.players.size()).second) {
      throw FormatError("duplicate player id '" + player.id + "'");
    }
    out.players.push_back(std::move(player));
  }

  if (doc.contains("snapshots")) {
    for (const auto& s : doc["snapshots"]) {
      RatingSnapshot snap;
      snap.match_percentage = field<double>(s, "match_percentage");
      snap.matches_completed = field_or<std::size_t>(s, "matches_completed", 0);
      snap.ratings.assign(out.players.size(), Rating{});
      const auto entries = field<json>(s, "players");
      if (!entries.is_array() || entries.size() != out.players.size()) {
        throw FormatError("snapshot player list does not match players");
      }
      for (const auto& e : entries) {
        auto id = field<std::string>(e, "id");
        auto it = index.find(id);
        if (it == index.end()) {
          throw FormatError("snapshot names unknown player '" + id + "'");
        }
        snap.ratings[it->second] = {field<double>(e, "mu"),
                                    field<double>(e, "sigma")};
      }
      out.snapshots.push_back(std::move(snap));
    }
  }
  return out;
}

}  // namespace agielo
