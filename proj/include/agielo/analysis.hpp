#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "agielo/engine.hpp"
#include "agielo/scoring.hpp"

namespace agielo {

/// Expected metric of an agent on a test case: f^-1 of the Elo expected score.
double predict_metric(double r_agent, double r_case, const ScoringFunction& fn);

/// Ids of cases whose predicted metric for an agent at `r_agent` is strictly
/// below `m_theta`.
std::set<std::string> hard_set(const std::map<std::string, double>& case_ratings,
                               double r_agent, double m_theta,
                               const ScoringFunction& fn);

/// Rating an agent needs to reach `s_theta` expected score against a case
/// rated `r_t_max`. Throws std::domain_error unless 0 < s_theta < 1.
double oracle_rating(double r_t_max, double s_theta);

inline double competency_gap(double oracle_r, double r_agent) {
  return oracle_r - r_agent;
}

struct OracleSpec {
  double s_theta = 0.5;
  double m_theta = 0.5;  // f^-1(s_theta)
};

OracleSpec make_oracle_spec(double s_theta, const ScoringFunction& fn);

struct GapEntry {
  double confidence;
  double oracle_rating;
  double gap;
};

struct GapReport {
  std::string hardest_case_id;
  double r_t_max = 0.0;
  std::string best_agent_id;
  double r_a_max = 0.0;
  double expected_metric = 0.0;  // best agent on the hardest case
  std::vector<GapEntry> gaps;    // ascending confidence
};

/// Uses rating means only. Confidences are sorted and deduplicated; each
/// must lie in (0, 1).
GapReport compute_gap_report(std::span<const Player> players,
                             std::vector<double> confidences,
                             const ScoringFunction& fn);

/// Empirical CDF of test-case ratings: F(x) = |{t : r_t <= x}| / N_t.
class PercentileCurve {
 public:
  explicit PercentileCurve(std::span<const double> case_ratings);

  double operator()(double rating) const;

  struct Point {
    double rating;
    double cumulative_fraction;
  };
  /// One point per distinct rating, at the top of each step.
  std::vector<Point> points() const;

 private:
  std::vector<double> sorted_;
};

/// Ranks starting at 1; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws std::invalid_argument on
/// length mismatch or fewer than two pairs and std::domain_error when either
/// side is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

using RatingTable = std::unordered_map<std::string, double>;

struct BinCell {
  std::string agent_id;
  double bin_lo;
  double bin_hi;
  std::size_t count;
  double empirical;
  double predicted;
};

struct BinnedErrors {
  double mae = 0.0;
  double mse = 0.0;
  double bin_width = 25.0;
  std::vector<BinCell> cells;  // sorted by (agent_id, bin_lo)
};

inline constexpr double kDefaultBinWidth = 25.0;

/// Groups records by (agent, rating bin of the case) and compares the mean
/// raw metric with the prediction at the bin center. Empty bins are skipped.
BinnedErrors binned_errors(std::span<const MatchRecord> records,
                           const RatingTable& agent_ratings,
                           const RatingTable& case_ratings,
                           const ScoringFunction& fn, double bin_width);

struct CheckpointMetrics {
  double match_percentage;
  double rho_t;
  double rho_a;
  double mae;
  double mse;
};

struct ReliabilityReport {
  std::size_t n_t = 0;
  std::size_t n_a = 0;
  std::size_t n_match = 0;
  double rho_t = 0.0;
  double rho_a = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  double bin_width = kDefaultBinWidth;
  std::vector<CheckpointMetrics> series;
};

/// Consistency of the ratings with mean raw performance plus binned
/// predictive error. When snapshots are given, the same metrics are computed
/// for each of them against the full matrix.
ReliabilityReport consistency_report(
    const ScoreMatrix& matrix, std::span<const Player> players,
    const ScoringFunction& fn, double bin_width = kDefaultBinWidth,
    std::span<const RatingSnapshot> snapshots = {});

struct HistogramBin {
  double lo;
  double hi;
  std::size_t case_count;
  std::vector<std::string> agent_ids;
};

/// Contiguous bins covering every player rating.
std::vector<HistogramBin> rating_histogram(std::span<const Player> players,
                                           double bin_width);

std::string report_to_json(const GapReport& gaps,
                           const ReliabilityReport* reliability,
                           const std::string& metric_name);
void write_percentile_csv(std::ostream& out, const PercentileCurve& curve);
void write_histogram_csv(std::ostream& out,
                         const std::vector<HistogramBin>& bins);

}  // namespace agielo
