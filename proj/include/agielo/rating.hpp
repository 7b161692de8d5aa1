#pragma once

#include <span>

namespace agielo {

/// Selects how the precision term of the Glicko update is formed.
///
/// kStandardGlicko scales the summed information by q^2, as in the published
/// Glicko system. kPaperLiteral drops that factor, which makes a single match
/// move the mean by hundredths of a point. Kept for fidelity experiments.
enum class Variant { kStandardGlicko, kPaperLiteral };

const char* variant_name(Variant v);
Variant parse_variant(const char* name);

/// Gaussian belief over a player's strength, in rating points.
struct Rating {
  double mu = 1500.0;
  double sigma = 350.0;
};

struct RatingConstants {
  double base = 10.0;
  double spread = 400.0;
  double initial_mu = 1500.0;
  double initial_sigma = 350.0;
  double k_factor = 32.0;  // classic Elo only
  Variant variant = Variant::kStandardGlicko;

  /// ln(base) / spread; 0.0057565 for the chess convention.
  double q() const;
  Rating initial_rating() const { return {initial_mu, initial_sigma}; }
};

struct OpponentObservation {
  double opponent_mu = 0.0;
  double opponent_sigma = 0.0;
  double score = 0.0;  // in [0, 1]
};

// Classic Elo.
double elo_expected_score(double r_a, double r_b);
double elo_update(double r, double score, double expected, double k);

/// g(sigma) = 1 / sqrt(1 + 3 q^2 sigma^2 / pi^2). Throws std::domain_error for
/// negative or non-finite sigma.
double impact_factor(double sigma, const RatingConstants& c = {});

/// Expected score of a player at mu_i against an opponent at (mu_j, sigma_j).
double expected_outcome(double mu_i, double mu_j, double sigma_j,
                        const RatingConstants& c = {});

/// Applies one rating period's worth of observations to `player`.
///
/// Throws std::invalid_argument when `observations` is empty and
/// std::domain_error for scores outside [0, 1] or a non-positive sigma.
Rating glicko_update(const Rating& player,
                     std::span<const OpponentObservation> observations,
                     const RatingConstants& c = {});

struct MatchOutcome {
  Rating agent;
  Rating test_case;
};

/// Updates both sides of an agent-vs-test-case encounter from their
/// pre-match ratings. The test case is credited with 1 - score.
MatchOutcome play_match(const Rating& agent, const Rating& test_case,
                        double score, const RatingConstants& c = {});

}  // namespace agielo
