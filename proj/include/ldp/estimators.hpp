#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ldp/channels.hpp"

namespace ldp {

// Closed range [m_minus, m_plus] of the functional over the model.
struct ThetaRange {
  double m_minus;
  double m_plus;

  ThetaRange(double lo, double hi);
  double width() const { return m_plus - m_minus; }
  double project(double x) const;
  double midpoint() const { return 0.5 * (m_minus + m_plus); }
};

// Strictly increasing map from functional values to the success probability
// of the released binary observation. The linear zero-bias case
// p(theta) = (1 + theta/z0)/2 is exact whenever E_P[ell] = theta(P); other
// models may inject their own map.
struct ThetaProbMap {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  double z0;

  static ThetaProbMap linear_zero_bias(const BinaryChannel& channel);
  static ThetaProbMap linear_zero_bias(double z0);

  double t_statistic(double zbar) const { return 0.5 * (1.0 + zbar / z0); }
};

// Projected shifted mean: Pi[mean(z) + shift] onto [m_minus, m_plus].
double sample_mean_estimate(std::span<const double> z, double shift,
                            const ThetaRange& range);

// Likelihood-ratio test threshold separating Bernoulli success probabilities
// s < t: G(s,t) = log((1-s)/(1-t)) / log((t/s) (1-s)/(1-t)); G(s,s) = s.
// Strictly increasing in both arguments with s < G(s,t) < t.
double critical_value_G(double s, double t);

// Stepwise-testing estimator over a Delta-grid of functional values. For the
// binary channel the whole test cascade collapses to locating the sufficient
// statistic T(z) = (1 + mean(z)/z0)/2 in a fixed partition of [0, 1].
class BinarySearchPlan {
 public:
  BinarySearchPlan(double delta, ThetaRange range, ThetaProbMap map);

  double delta() const { return delta_; }
  const ThetaRange& range() const { return range_; }
  const ThetaProbMap& map() const { return map_; }
  int n_steps() const { return n_; }  // smallest N with N*delta > width
  bool degenerate() const { return n_ <= 2; }

  // c_1 <= ... <= c_{N-2} partitioning [0, 1] into half-open cells.
  const std::vector<double>& critical_values() const { return critical_; }
  // Attainable estimates {m_minus + j*delta : j = 1..N-1}.
  std::vector<double> values() const;

  // Cell lookup: value for a given T statistic in [0, 1].
  double estimate_from_t(double t) const;

 private:
  double delta_;
  ThetaRange range_;
  ThetaProbMap map_;
  int n_;
  std::vector<double> critical_;
};

BinarySearchPlan build_plan(double delta, const ThetaRange& range,
                            const ThetaProbMap& map);

// Estimate from released values z_i in {-z0, z0}.
double binary_search_estimate(std::span<const double> z,
                              const BinarySearchPlan& plan);

// Affine function of the released mean that tracks the binary search
// estimator within 2*delta everywhere (after projection onto the range).
struct AffineSurrogate {
  double slope;
  double intercept;
  double bound;  // certified deviation: 2 * delta
  ThetaRange range;

  double operator()(double zbar) const {
    return range.project(slope * zbar + intercept);
  }
};

AffineSurrogate affine_surrogate(const BinarySearchPlan& plan);

// Delta = C^2 * modulus with the minimal admissible C = sqrt(2 log(2a)) + 1,
// where a > 1 is the loss-doubling constant.
double delta_tuning(double modulus_at_root_n, double a_loss);

}  // namespace ldp
