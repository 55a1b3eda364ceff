#include "ldp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ldp {

ThetaRange::ThetaRange(double lo, double hi) : m_minus(lo), m_plus(hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("functional range must be finite with m_minus < m_plus");
  }
}

double ThetaRange::project(double x) const {
  return std::clamp(x, m_minus, m_plus);
}

ThetaProbMap ThetaProbMap::linear_zero_bias(const BinaryChannel& channel) {
  return linear_zero_bias(channel.z0());
}

ThetaProbMap ThetaProbMap::linear_zero_bias(double z0) {
  if (!(z0 > 0.0)) throw std::invalid_argument("z0 must be positive");
  return ThetaProbMap{
      [z0](double theta) { return 0.5 * (1.0 + theta / z0); },
      [z0](double p) { return (2.0 * p - 1.0) * z0; },
      z0,
  };
}

double sample_mean_estimate(std::span<const double> z, double shift,
                            const ThetaRange& range) {
  if (z.empty()) throw std::invalid_argument("empty sample");
  double acc = 0.0;
  for (double v : z) acc += v;
  return range.project(acc / static_cast<double>(z.size()) + shift);
}

double critical_value_G(double s, double t) {
  if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0)) {
    throw std::invalid_argument("G arguments must lie in (0, 1)");
  }
  if (s == t) return s;
  return std::log((1.0 - s) / (1.0 - t)) /
         std::log((t / s) * (1.0 - s) / (1.0 - t));
}

BinarySearchPlan::BinarySearchPlan(double delta, ThetaRange range,
                                   ThetaProbMap map)
    : delta_(delta), range_(range), map_(std::move(map)) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  const double width = range_.width();
  if (delta == 0.0) {
    n_ = 1;  // constant midpoint estimator
    return;
  }
  n_ = static_cast<int>(std::floor(width / delta)) + 1;
  while (n_ * delta <= width) ++n_;  // guard against floating-point edges
  if (n_ <= 2) return;

  critical_.reserve(static_cast<std::size_t>(n_) - 2);
  double previous = -1.0;
  for (int j = 1; j <= n_ - 2; ++j) {
    const double a = range_.m_minus + j * delta;
    const double b = range_.m_minus + (j + 1) * delta;
    const double pa = map_.forward(a);
    const double pb = map_.forward(b);
    if (!(pa < pb)) {
      throw std::invalid_argument("theta-probability map must be strictly increasing");
    }
    const double c = critical_value_G(pa, pb);
    if (c < previous) {
      throw std::invalid_argument("critical values are not monotone");
    }
    previous = c;
    critical_.push_back(c);
  }
}

std::vector<double> BinarySearchPlan::values() const {
  if (degenerate()) return {range_.midpoint()};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_) - 1);
  for (int j = 1; j <= n_ - 1; ++j) {
    out.push_back(range_.m_minus + j * delta_);
  }
  return out;
}

double BinarySearchPlan::estimate_from_t(double t) const {
  if (degenerate()) return range_.midpoint();
  // Cells are [c_{j-1}, c_j): a tie T == c_j decides upward.
  const auto it = std::upper_bound(critical_.begin(), critical_.end(), t,
                                   [](double value, double c) { return value < c; });
  const int j = static_cast<int>(it - critical_.begin()) + 1;
  return range_.m_minus + j * delta_;
}

BinarySearchPlan build_plan(double delta, const ThetaRange& range,
                            const ThetaProbMap& map) {
  return BinarySearchPlan(delta, range, map);
}

double binary_search_estimate(std::span<const double> z,
                              const BinarySearchPlan& plan) {
  if (z.empty()) throw std::invalid_argument("empty sample");
  const double z0 = plan.map().z0;
  double acc = 0.0;
  for (double v : z) {
    if (v != z0 && v != -z0) {
      throw std::invalid_argument("released values must lie in {-z0, z0}");
    }
    acc += v;
  }
  const double zbar = acc / static_cast<double>(z.size());
  return plan.estimate_from_t(plan.map().t_statistic(zbar));
}

AffineSurrogate affine_surrogate(const BinarySearchPlan& plan) {
  if (plan.n_steps() < 4) {
    throw std::invalid_argument("affine surrogate needs a plan with at least 4 steps");
  }
  const ThetaRange& range = plan.range();
  const ThetaProbMap& map = plan.map();
  const double p_minus = map.forward(range.m_minus);
  const double p_plus = map.forward(range.m_plus);
  const auto& c = plan.critical_values();
  const double s0 = 0.5 * (p_minus + c.front());
  const double t0 = 0.5 * (c.back() + p_plus);

  // phi(t) clamps the inverse map to the range; interpolate it at s0, t0.
  const double phi_s0 = range.project(map.inverse(s0));
  const double phi_t0 = range.project(map.inverse(t0));
  const double slope_t = (phi_t0 - phi_s0) / (t0 - s0);
  const double intercept_t = phi_s0 - slope_t * s0;

  // Compose with T(zbar) = (1 + zbar/z0)/2 to express in the released mean.
  const double slope = slope_t * 0.5 / map.z0;
  const double intercept = intercept_t + slope_t * 0.5;
  return AffineSurrogate{slope, intercept, 2.0 * plan.delta(), range};
}

double delta_tuning(double modulus_at_root_n, double a_loss) {
  if (!(a_loss > 1.0)) {
    throw std::invalid_argument("loss doubling constant must exceed 1");
  }
  if (!(modulus_at_root_n >= 0.0)) {
    throw std::invalid_argument("modulus value must be non-negative");
  }
  const double c = std::sqrt(2.0 * std::log(2.0 * a_loss)) + 1.0;
  return c * c * modulus_at_root_n;
}

}  // namespace ldp
