#include "agielo/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string_view>

namespace agielo {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_param(std::string_view text, const std::string& id) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw std::invalid_argument("bad numeric parameter in scoring id '" + id +
                                "'");
  }
  return v;
}

ScoringFunction identity(const std::string& id, std::string metric_name) {
  auto same = [](double x) { return x; };
  return {id, std::move(metric_name), same, same, 0.0, 1.0};
}

ScoringFunction affine(const std::string& id, double scale, double offset) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("affine scale must be positive in '" + id + "'");
  }
  return {id,
          "metric",
          [=](double m) { return scale * m + offset; },
          [=](double s) { return (s - offset) / scale; },
          (0.0 - offset) / scale,
          (1.0 - offset) / scale};
}

struct Knot {
  double x;
  double y;
};

double interpolate(const std::vector<Knot>& knots, double x, bool by_y) {
  auto key = [by_y](const Knot& k) { return by_y ? k.y : k.x; };
  auto val = [by_y](const Knot& k) { return by_y ? k.x : k.y; };
  if (x <= key(knots.front())) {
    const auto& a = knots[0];
    const auto& b = knots[1];
    return val(a) + (x - key(a)) * (val(b) - val(a)) / (key(b) - key(a));
  }
  std::size_t i = 1;
  while (i + 1 < knots.size() && x > key(knots[i])) ++i;
  const auto& a = knots[i - 1];
  const auto& b = knots[i];
  return val(a) + (x - key(a)) * (val(b) - val(a)) / (key(b) - key(a));
}

ScoringFunction piecewise(const std::string& id,
                          const std::vector<std::string_view>& parts) {
  if (parts.size() < 5 || (parts.size() - 1) % 2 != 0) {
    throw std::invalid_argument("piecewise needs at least two m:s knots in '" +
                                id + "'");
  }
  std::vector<Knot> knots;
  for (std::size_t i = 1; i < parts.size(); i += 2) {
    knots.push_back({parse_param(parts[i], id), parse_param(parts[i + 1], id)});
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].x > knots[i - 1].x) || !(knots[i].y > knots[i - 1].y)) {
      throw std::invalid_argument("piecewise knots must strictly increase in '" +
                                  id + "'");
    }
  }
  if (knots.front().y != 0.0 || knots.back().y != 1.0) {
    throw std::invalid_argument("piecewise knots must map onto [0, 1] in '" +
                                id + "'");
  }
  double lo = knots.front().x;
  double hi = knots.back().x;
  return {id,
          "metric",
          [knots](double m) { return interpolate(knots, m, false); },
          [knots](double s) { return interpolate(knots, s, true); },
          lo,
          hi};
}

}  // namespace

ScoringFunction::ScoringFunction(std::string id, std::string metric_name,
                                 Map forward, Map inverse, double metric_lo,
                                 double metric_hi)
    : id_(std::move(id)),
      metric_name_(std::move(metric_name)),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      metric_lo_(metric_lo),
      metric_hi_(metric_hi) {}

ScoringFunction make_scoring_function(const std::string& id) {
  if (id == "identity") return identity(id, "metric");
  if (id == "pdm") return identity(id, "PDM Score");
  if (id == "pass_all") return identity(id, "PassAll");
  if (id == "mean") return identity(id, "mAP");

  auto parts = split(id, ':');
  if (parts[0] == "affine") {
    if (parts.size() != 3) {
      throw std::invalid_argument("expected affine:<scale>:<offset>, got '" +
                                  id + "'");
    }
    return affine(id, parse_param(parts[1], id), parse_param(parts[2], id));
  }
  if (parts[0] == "piecewise") return piecewise(id, parts);
  throw std::invalid_argument("unknown scoring function '" + id + "'");
}

double apply_scoring(const ScoringFunction& fn, double m) {
  if (!std::isfinite(m)) {
    throw std::domain_error("metric value must be finite");
  }
  const double s = fn.forward(m);
  if (!(s >= -kClampTolerance && s <= 1.0 + kClampTolerance)) {
    throw std::domain_error("metric " + std::to_string(m) +
                            " is outside the domain of scoring function '" +
                            fn.id() + "'");
  }
  return std::clamp(s, 0.0, 1.0);
}

double invert_scoring(const ScoringFunction& fn, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::domain_error("match score must lie in [0, 1]");
  }
  return fn.inverse(s);
}

double accuracy_at_1(std::span<const int> correct_flags) {
  if (correct_flags.empty()) {
    throw std::invalid_argument("accuracy_at_1 needs at least one sample");
  }
  std::size_t hits = 0;
  for (int f : correct_flags) {
    if (f != 0 && f != 1) throw std::domain_error("flags must be 0 or 1");
    hits += static_cast<std::size_t>(f);
  }
  return static_cast<double>(hits) / static_cast<double>(correct_flags.size());
}

double mean_of_components(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("mean_of_components needs at least one value");
  }
  if (!std::all_of(values.begin(), values.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw std::domain_error("component values must be finite");
  }
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

int pass_all(std::span<const bool> test_results) {
  if (test_results.empty()) {
    throw std::invalid_argument("pass_all needs at least one test result");
  }
  return std::all_of(test_results.begin(), test_results.end(),
                     [](bool p) { return p; })
             ? 1
             : 0;
}

double pdm_score(const PdmComponents& p) {
  for (double v : {p.nc, p.dac, p.ep, p.ttc, p.c}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::domain_error("PDM components must lie in [0, 1]");
    }
  }
  return p.nc * p.dac * (5.0 * p.ep + 5.0 * p.ttc + 2.0 * p.c) / 12.0;
}

}  // namespace agielo
