#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agielo/engine.hpp"
#include "agielo/random.hpp"

namespace agielo {

enum class OutcomeMode { kBinary, kContinuous };

const char* outcome_mode_name(OutcomeMode m);
OutcomeMode parse_outcome_mode(const std::string& name);

struct PopulationSpec {
  std::size_t n_agents = 20;
  std::size_t n_cases = 5000;
  double prior_mu = 1500.0;
  double prior_sigma = 350.0;
  OutcomeMode outcome_mode = OutcomeMode::kBinary;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for fewer than two agents or cases or a
  /// negative prior sigma.
  void validate() const;
};

struct TruePlayer {
  std::string id;
  double true_rating;
};

/// Ground-truth ratings drawn from N(prior_mu, prior_sigma^2).
struct Population {
  std::vector<TruePlayer> agents;
  std::vector<TruePlayer> cases;
};

Population sample_population(const PopulationSpec& spec);

/// Binary mode draws a Bernoulli win with the Elo expected score; continuous
/// mode returns that probability itself.
double simulate_outcome(double r_agent_true, double r_case_true,
                        OutcomeMode mode, SplitMix64& rng);

/// Dense matrix of simulated outcomes. Each cell draws from its own
/// counter-based stream, so the result does not depend on fill order.
ScoreMatrix simulate_matrix(const Population& population,
                            const PopulationSpec& spec);

std::string truth_to_json(const Population& population);

struct RecoveryReport {
  double rho_agents = 0.0;
  double rho_cases = 0.0;
  double mean_abs_mu_error = 0.0;  // after median-centering both sides
};

/// Throws std::invalid_argument unless `estimated` holds exactly the truth's
/// ids with matching categories.
RecoveryReport recovery_report(const Population& truth,
                               std::span<const Player> estimated);

}  // namespace agielo
