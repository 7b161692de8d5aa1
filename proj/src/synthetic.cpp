#include "agielo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "agielo/analysis.hpp"
#include "agielo/rating.hpp"
#include "json.hpp"

namespace agielo {
namespace {

std::string padded_id(const char* prefix, std::size_t i, std::size_t n) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(n - 1).size();
  return prefix + std::string(width - digits.size(), '0') + digits;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* outcome_mode_name(OutcomeMode m) {
  return m == OutcomeMode::kBinary ? "binary" : "continuous";
}

OutcomeMode parse_outcome_mode(const std::string& name) {
  if (name == "binary") return OutcomeMode::kBinary;
  if (name == "continuous") return OutcomeMode::kContinuous;
  throw std::invalid_argument("unknown outcome mode '" + name +
                              "' (expected binary|continuous)");
}

void PopulationSpec::validate() const {
  if (n_agents < 2) throw std::invalid_argument("need at least two agents");
  if (n_cases < 2) throw std::invalid_argument("need at least two test cases");
  if (!std::isfinite(prior_mu) || !std::isfinite(prior_sigma) ||
      prior_sigma < 0.0) {
    throw std::invalid_argument("prior must be finite with sigma >= 0");
  }
}

Population sample_population(const PopulationSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Population pop;
  pop.agents.reserve(spec.n_agents);
  pop.cases.reserve(spec.n_cases);
  for (std::size_t i = 0; i < spec.n_agents; ++i) {
    pop.agents.push_back({padded_id("agent_", i, spec.n_agents),
                          spec.prior_mu + spec.prior_sigma *
                                              standard_normal(rng)});
  }
  for (std::size_t i = 0; i < spec.n_cases; ++i) {
    pop.cases.push_back({padded_id("case_", i, spec.n_cases),
                         spec.prior_mu + spec.prior_sigma *
                                             standard_normal(rng)});
  }
  return pop;
}

double simulate_outcome(double r_agent_true, double r_case_true,
                        OutcomeMode mode, SplitMix64& rng) {
  const double p = elo_expected_score(r_agent_true, r_case_true);
  if (mode == OutcomeMode::kContinuous) return p;
  return rng.next_unit() < p ? 1.0 : 0.0;
}

ScoreMatrix simulate_matrix(const Population& population,
                            const PopulationSpec& spec) {
  std::vector<std::string> agent_ids;
  std::vector<std::string> case_ids;
  for (const auto& a : population.agents) agent_ids.push_back(a.id);
  for (const auto& c : population.cases) case_ids.push_back(c.id);
  ScoreMatrix matrix(std::move(agent_ids), std::move(case_ids), "identity");

  // Offset so outcome streams do not reuse the population generator's seed.
  SplitMix64 keygen(spec.seed ^ 0x6a09e667f3bcc909ULL);
  const std::uint64_t stream_key = keygen.next();
  const std::size_t n_agents = population.agents.size();
  for (std::size_t t = 0; t < population.cases.size(); ++t) {
    for (std::size_t a = 0; a < n_agents; ++a) {
      const std::uint64_t cell = t * n_agents + a;
      SplitMix64 stream(stream_key + cell * 0xd1b54a32d192ed03ULL);
      matrix.set(a, t,
                 simulate_outcome(population.agents[a].true_rating,
                                  population.cases[t].true_rating,
                                  spec.outcome_mode, stream));
    }
  }
  return matrix;
}

std::string truth_to_json(const Population& population) {
  using json = nlohmann::ordered_json;
  json players = json::array();
  for (const auto& a : population.agents) {
    players.push_back(
        {{"id", a.id}, {"category", "agent"}, {"true_rating", a.true_rating}});
  }
  for (const auto& c : population.cases) {
    players.push_back({{"id", c.id},
                       {"category", "test_case"},
                       {"true_rating", c.true_rating}});
  }
  return json(players).dump(1) + "\n";
}

RecoveryReport recovery_report(const Population& truth,
                               std::span<const Player> estimated) {
  if (estimated.size() != truth.agents.size() + truth.cases.size()) {
    throw std::invalid_argument("estimated players do not match the truth");
  }
  std::unordered_map<std::string, const Player*> by_id;
  for (const auto& p : estimated) by_id.emplace(p.id, &p);

  auto gather = [&](const std::vector<TruePlayer>& group, Category category,
                    std::vector<double>& true_r, std::vector<double>& est_r) {
    for (const auto& t : group) {
      auto it = by_id.find(t.id);
      if (it == by_id.end() || it->second->category != category) {
        throw std::invalid_argument("no estimate for '" + t.id + "'");
      }
      true_r.push_back(t.true_rating);
      est_r.push_back(it->second->rating.mu);
    }
  };
  std::vector<double> ta, ea, tc, ec;
  gather(truth.agents, Category::kAgent, ta, ea);
  gather(truth.cases, Category::kTestCase, tc, ec);

  RecoveryReport report;
  report.rho_agents = spearman(ta, ea);
  report.rho_cases = spearman(tc, ec);

  std::vector<double> all_true(ta);
  all_true.insert(all_true.end(), tc.begin(), tc.end());
  std::vector<double> all_est(ea);
  all_est.insert(all_est.end(), ec.begin(), ec.end());
  const double mt = median(all_true);
  const double me = median(all_est);
  double err = 0.0;
  for (std::size_t i = 0; i < all_true.size(); ++i) {
    err += std::abs((all_est[i] - me) - (all_true[i] - mt));
  }
  report.mean_abs_mu_error = err / static_cast<double>(all_true.size());
  return report;
}

}  // namespace agielo
