#include "agielo/rating.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agielo {
namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(what) + " must be finite");
  }
}

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1], got " +
                            std::to_string(x));
  }
}

}  // namespace

const char* variant_name(Variant v) {
  return v == Variant::kPaperLiteral ? "paper-literal" : "standard";
}

Variant parse_variant(const char* name) {
  std::string_view n(name);
  if (n == "standard") return Variant::kStandardGlicko;
  if (n == "paper-literal") return Variant::kPaperLiteral;
  throw std::invalid_argument("unknown variant '" + std::string(n) +
                              "' (expected standard|paper-literal)");
}

double RatingConstants::q() const { return std::log(base) / spread; }

double elo_expected_score(double r_a, double r_b) {
  require_finite(r_a, "rating");
  require_finite(r_b, "rating");
  return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / 400.0));
}

double elo_update(double r, double score, double expected, double k) {
  require_finite(r, "rating");
  require_unit(score, "score");
  require_unit(expected, "expected score");
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::domain_error("K must be positive");
  }
  return r + k * (score - expected);
}

double impact_factor(double sigma, const RatingConstants& c) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw std::domain_error("rating deviation must be finite and >= 0");
  }
  const double q = c.q();
  const double pi = std::numbers::pi;
  return 1.0 / std::sqrt(1.0 + 3.0 * q * q * sigma * sigma / (pi * pi));
}

double expected_outcome(double mu_i, double mu_j, double sigma_j,
                        const RatingConstants& c) {
  require_finite(mu_i, "rating");
  require_finite(mu_j, "rating");
  const double g = impact_factor(sigma_j, c);
  return 1.0 / (1.0 + std::pow(c.base, -g * (mu_i - mu_j) / c.spread));
}

Rating glicko_update(const Rating& player,
                     std::span<const OpponentObservation> observations,
                     const RatingConstants& c) {
  if (observations.empty()) {
    throw std::invalid_argument("glicko_update needs at least one observation");
  }
  require_finite(player.mu, "rating");
  if (!(player.sigma > 0.0) || !std::isfinite(player.sigma)) {
    throw std::domain_error("rating deviation must be positive");
  }

  const double q = c.q();
  double information = 0.0;
  double surprise = 0.0;
  for (const auto& obs : observations) {
    require_unit(obs.score, "score");
    const double g = impact_factor(obs.opponent_sigma, c);
    const double e = expected_outcome(player.mu, obs.opponent_mu,
                                      obs.opponent_sigma, c);
    information += g * g * e * (1.0 - e);
    surprise += g * (obs.score - e);
  }
  if (c.variant == Variant::kStandardGlicko) information *= q * q;

  const double precision = 1.0 / (player.sigma * player.sigma) + information;
  return {player.mu + q / precision * surprise, 1.0 / std::sqrt(precision)};
}

MatchOutcome play_match(const Rating& agent, const Rating& test_case,
                        double score, const RatingConstants& c) {
  require_unit(score, "score");
  const OpponentObservation vs_case{test_case.mu, test_case.sigma, score};
  const OpponentObservation vs_agent{agent.mu, agent.sigma, 1.0 - score};
  return {glicko_update(agent, {&vs_case, 1}, c),
          glicko_update(test_case, {&vs_agent, 1}, c)};
}

}  // namespace agielo
