#include "agielo/rating.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

namespace agielo {
namespace {

// Reference values evaluated independently at 40 significant digits.
constexpr double kG100 = 0.95314897423458694410;
constexpr double kG350 = 0.66906939718198458151;
constexpr double kE1600vs1500s350 = 0.59511396800191676536;
constexpr double kStdWinMu = 1662.2120026057647755;
constexpr double kStdWinSigma = 290.23050609109118282;
constexpr double kLiteralWinMu = 1500.0172061161239049;

TEST(RatingConstantsTest, DefaultsFollowChessConvention) {
  RatingConstants c;
  EXPECT_NEAR(c.q(), 0.0057565, 5e-8);
  EXPECT_NEAR(c.q(), 0.005756462732485114, 1e-17);
  EXPECT_EQ(c.initial_rating().mu, 1500.0);
  EXPECT_EQ(c.initial_rating().sigma, 350.0);
  EXPECT_EQ(c.variant, Variant::kStandardGlicko);
}

TEST(EloTest, ExpectedScoreExamples) {
  EXPECT_DOUBLE_EQ(elo_expected_score(1500, 1500), 0.5);
  EXPECT_NEAR(elo_expected_score(1900, 1500), 10.0 / 11.0, 1e-15);
  EXPECT_NEAR(elo_expected_score(2035.0, 2389.7), 0.115, 1e-3);
}

TEST(EloTest, ExpectedScoreRejectsNonFinite) {
  EXPECT_THROW(elo_expected_score(NAN, 1500), std::domain_error);
  EXPECT_THROW(elo_expected_score(1500, INFINITY), std::domain_error);
}

TEST(EloTest, UpdateExamples) {
  EXPECT_DOUBLE_EQ(elo_update(1500, 1.0, 0.5, 32), 1516.0);
  EXPECT_DOUBLE_EQ(elo_update(1500, 0.5, 0.5, 32), 1500.0);
  EXPECT_NEAR(elo_update(1600, 0.0, 0.64, 10), 1593.6, 1e-12);
  EXPECT_THROW(elo_update(1500, 1.1, 0.5, 32), std::domain_error);
  EXPECT_THROW(elo_update(1500, 1.0, -0.1, 32), std::domain_error);
  EXPECT_THROW(elo_update(1500, 1.0, 0.5, 0), std::domain_error);
}

TEST(ImpactFactorTest, Examples) {
  EXPECT_DOUBLE_EQ(impact_factor(0.0), 1.0);
  EXPECT_NEAR(impact_factor(100.0), kG100, 1e-14);
  EXPECT_NEAR(impact_factor(350.0), kG350, 1e-14);
  EXPECT_NEAR(impact_factor(100.0), 0.9531, 1e-4);
  EXPECT_NEAR(impact_factor(350.0), 0.6690, 1e-4);
  EXPECT_THROW(impact_factor(-1.0), std::domain_error);
}

TEST(ImpactFactorTest, StrictlyDecreasingOnGrid) {
  double prev = impact_factor(0.0);
  EXPECT_EQ(prev, 1.0);
  for (int i = 1; i <= 1000; ++i) {
    const double g = impact_factor(i * 0.7);
    ASSERT_GT(g, 0.0);
    ASSERT_LE(g, 1.0);
    ASSERT_LT(g, prev) << "at sigma=" << i * 0.7;
    prev = g;
  }
}

TEST(ExpectedOutcomeTest, Examples) {
  EXPECT_DOUBLE_EQ(expected_outcome(1500, 1500, 350), 0.5);
  EXPECT_NEAR(expected_outcome(1500, 1100, 0), 10.0 / 11.0, 1e-15);
  EXPECT_NEAR(expected_outcome(1600, 1500, 350), kE1600vs1500s350, 1e-14);
  EXPECT_THROW(expected_outcome(1500, 1500, -5), std::domain_error);
}

TEST(ExpectedOutcomeTest, ZeroDeviationMatchesElo) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(0.0, 3000.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = r(rng), b = r(rng);
    ASSERT_NEAR(expected_outcome(a, b, 0.0), elo_expected_score(a, b), 1e-12);
  }
}

TEST(EloPropertyTest, SymmetryAndTranslationInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(-1000.0, 4000.0);
  std::uniform_real_distribution<double> shift(-5000.0, 5000.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = r(rng), b = r(rng), c = shift(rng);
    ASSERT_NEAR(elo_expected_score(a, b) + elo_expected_score(b, a), 1.0,
                1e-12);
    ASSERT_NEAR(elo_expected_score(a + c, b + c), elo_expected_score(a, b),
                1e-12);
  }
}

TEST(GlickoUpdateTest, StandardWinAgainstEqualOpponent) {
  const OpponentObservation obs{1500, 350, 1.0};
  const auto r = glicko_update({1500, 350}, {&obs, 1});
  EXPECT_NEAR(r.mu, kStdWinMu, 1e-9);
  EXPECT_NEAR(r.sigma, kStdWinSigma, 1e-9);
}

TEST(GlickoUpdateTest, DrawAgainstEqualOpponentKeepsMean) {
  const OpponentObservation obs{1500, 350, 0.5};
  const auto r = glicko_update({1500, 350}, {&obs, 1});
  EXPECT_EQ(r.mu, 1500.0);
  EXPECT_LT(r.sigma, 350.0);
}

TEST(GlickoUpdateTest, PaperLiteralVariantBarelyMoves) {
  RatingConstants c;
  c.variant = Variant::kPaperLiteral;
  const OpponentObservation obs{1500, 350, 1.0};
  const auto r = glicko_update({1500, 350}, {&obs, 1}, c);
  EXPECT_NEAR(r.mu, kLiteralWinMu, 1e-9);
  EXPECT_NEAR(r.mu, 1500.017, 1e-3);
}

TEST(GlickoUpdateTest, Errors) {
  EXPECT_THROW(glicko_update({1500, 350}, {}), std::invalid_argument);
  const OpponentObservation bad{1500, 350, 1.5};
  EXPECT_THROW(glicko_update({1500, 350}, {&bad, 1}), std::domain_error);
  const OpponentObservation ok{1500, 350, 1.0};
  EXPECT_THROW(glicko_update({1500, 0.0}, {&ok, 1}), std::domain_error);
}

TEST(GlickoUpdateTest, BatchPeriodMatchesSummedTerms) {
  const std::vector<OpponentObservation> obs{
      {1400, 30, 1.0}, {1550, 100, 0.0}, {1700, 300, 0.4}};
  const RatingConstants c;
  const double q = c.q();
  double info = 0.0, surprise = 0.0;
  for (const auto& o : obs) {
    const double g = 1.0 / std::sqrt(1.0 + 3.0 * q * q * o.opponent_sigma *
                                               o.opponent_sigma /
                                               (M_PI * M_PI));
    const double e =
        1.0 / (1.0 + std::pow(10.0, -g * (1500.0 - o.opponent_mu) / 400.0));
    info += q * q * g * g * e * (1 - e);
    surprise += g * (o.score - e);
  }
  const double prec = 1.0 / (200.0 * 200.0) + info;
  const auto r = glicko_update({1500, 200}, obs, c);
  EXPECT_NEAR(r.mu, 1500.0 + q / prec * surprise, 1e-9);
  EXPECT_NEAR(r.sigma, 1.0 / std::sqrt(prec), 1e-9);
}

TEST(GlickoPropertyTest, SigmaShrinksAndMeanFollowsSurprise) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mu(500.0, 2500.0);
  std::uniform_real_distribution<double> sd(1.0, 400.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 6);
  for (auto variant : {Variant::kStandardGlicko, Variant::kPaperLiteral}) {
    RatingConstants c;
    c.variant = variant;
    for (int i = 0; i < 2000; ++i) {
      const Rating player{mu(rng), sd(rng)};
      std::vector<OpponentObservation> obs(count(rng));
      double surprise = 0.0;
      for (auto& o : obs) {
        o = {mu(rng), sd(rng), unit(rng) < 0.3 ? std::round(unit(rng)) : unit(rng)};
        surprise += impact_factor(o.opponent_sigma) *
                    (o.score - expected_outcome(player.mu, o.opponent_mu,
                                                o.opponent_sigma));
      }
      const auto next = glicko_update(player, obs, c);
      ASSERT_LT(next.sigma, player.sigma);
      ASSERT_GT(next.sigma, 0.0);
      if (surprise > 0) ASSERT_GT(next.mu, player.mu);
      if (surprise < 0) ASSERT_LT(next.mu, player.mu);
    }
  }
}

TEST(PlayMatchTest, DrawBetweenEqualsIsSymmetric) {
  const auto out = play_match({1500, 350}, {1500, 350}, 0.5);
  EXPECT_EQ(out.agent.mu, 1500.0);
  EXPECT_EQ(out.test_case.mu, 1500.0);
  EXPECT_LT(out.agent.sigma, 350.0);
  EXPECT_DOUBLE_EQ(out.agent.sigma, out.test_case.sigma);
}

TEST(PlayMatchTest, WinBetweenEqualsIsZeroSum) {
  const auto out = play_match({1500, 350}, {1500, 350}, 1.0);
  EXPECT_NEAR(out.agent.mu, kStdWinMu, 1e-9);
  EXPECT_NEAR(out.agent.mu - 1500.0, 1500.0 - out.test_case.mu, 1e-9);
}

TEST(PlayMatchTest, UsesPreMatchRatingsOfBothSides) {
  const Rating agent{1620, 120};
  const Rating tc{1480, 260};
  const auto out = play_match(agent, tc, 0.7);
  const OpponentObservation vs_case{tc.mu, tc.sigma, 0.7};
  const OpponentObservation vs_agent{agent.mu, agent.sigma, 0.3};
  const auto a = glicko_update(agent, {&vs_case, 1});
  const auto t = glicko_update(tc, {&vs_agent, 1});
  EXPECT_EQ(out.agent.mu, a.mu);
  EXPECT_EQ(out.agent.sigma, a.sigma);
  EXPECT_EQ(out.test_case.mu, t.mu);
  EXPECT_EQ(out.test_case.sigma, t.sigma);
}

TEST(PlayMatchTest, ExpectedWinAgainstWeakCaseGainsLittle) {
  const Rating agent{1500, 350};
  const OpponentObservation equal{1500, 0.0, 1.0};
  const OpponentObservation weak{700, 0.0, 1.0};
  const double gain_equal = glicko_update(agent, {&equal, 1}).mu - agent.mu;
  const double gain_weak = glicko_update(agent, {&weak, 1}).mu - agent.mu;
  EXPECT_GT(gain_weak, 0.0);
  EXPECT_LT(gain_weak, 0.1 * gain_equal);
}

TEST(PlayMatchTest, RejectsOutOfRangeScore) {
  EXPECT_THROW(play_match({1500, 350}, {1500, 350}, -0.01), std::domain_error);
}

TEST(VariantTest, NamesRoundTrip) {
  for (auto v : {Variant::kStandardGlicko, Variant::kPaperLiteral}) {
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  }
  EXPECT_THROW(parse_variant("glicko2"), std::invalid_argument);
}

}  // namespace
}  // namespace agielo
