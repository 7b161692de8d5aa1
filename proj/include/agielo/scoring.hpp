#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace agielo {

/// Monotone map from a task metric M to a match score S in [0, 1], together
/// with its inverse for projecting predicted scores back into metric units.
class ScoringFunction {
 public:
  using Map = std::function<double(double)>;

  ScoringFunction(std::string id, std::string metric_name, Map forward,
                  Map inverse, double metric_lo, double metric_hi);

  const std::string& id() const { return id_; }
  const std::string& metric_name() const { return metric_name_; }
  double metric_lo() const { return metric_lo_; }
  double metric_hi() const { return metric_hi_; }

  double forward(double m) const { return forward_(m); }
  double inverse(double s) const { return inverse_(s); }

 private:
  std::string id_;
  std::string metric_name_;
  Map forward_;
  Map inverse_;
  double metric_lo_;
  double metric_hi_;
};

/// Overshoot past [0, 1] that is clamped silently; anything larger is an error.
inline constexpr double kClampTolerance = 1e-6;

/// Builds a scoring function from its registry id:
///   identity | pdm | pass_all | mean        S = M
///   affine:<scale>:<offset>                  S = scale * M + offset, scale > 0
///   piecewise:<m0>:<s0>:<m1>:<s1>[:...]      linear between strictly
///                                            increasing knots spanning [0, 1]
/// Throws std::invalid_argument for unknown or malformed ids.
ScoringFunction make_scoring_function(const std::string& id);

double apply_scoring(const ScoringFunction& fn, double m);
double invert_scoring(const ScoringFunction& fn, double s);

// Metric helpers for composing per-case raw results.

double accuracy_at_1(std::span<const int> correct_flags);

/// Arithmetic mean; used for AP over IoU thresholds and mAP over buckets.
double mean_of_components(std::span<const double> values);

int pass_all(std::span<const bool> test_results);

struct PdmComponents {
  double nc = 0.0;   // no collision
  double dac = 0.0;  // drivable area compliance
  double ep = 0.0;   // ego progress
  double ttc = 0.0;  // time to collision
  double c = 0.0;    // comfort
};

double pdm_score(const PdmComponents& components);

}  // namespace agielo
