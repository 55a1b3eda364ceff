#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ldp/rng.hpp"

namespace ldp {

// Privacy budget alpha (in nats) with the derived channel constants cached.
struct PrivacyLevel {
  double alpha;
  double exp_alpha;      // e^alpha
  double contrast;       // (e^alpha - 1) / (e^alpha + 1)
  double amplification;  // (e^alpha + 1) / (e^alpha - 1)

  explicit PrivacyLevel(double alpha_value);
};

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Product of closed intervals; the declared support of a representer.
struct Domain {
  std::vector<Interval> axes;

  static Domain interval(double lo, double hi) { return Domain{{{lo, hi}}}; }
  static Domain real_line();
  static Domain real_space(std::size_t dim);

  std::size_t dim() const { return axes.size(); }
  bool contains(std::span<const double> x) const;
};

// A bounded measurable function with a caller-certified sup-norm bound.
// The bound is trusted at construction; tests spot-check it on dense grids.
class Representer {
 public:
  using Eval = std::function<double(std::span<const double>)>;

  Representer(Eval eval, double sup_norm, Domain domain);

  double operator()(std::span<const double> x) const { return eval_(x); }
  double operator()(double x) const { return eval_({&x, 1}); }

  double sup_norm() const { return sup_norm_; }
  const Domain& domain() const { return domain_; }

 private:
  Eval eval_;
  double sup_norm_;
  Domain domain_;
};

using Point = std::vector<double>;

// Finite-support distribution: pairwise distinct atoms, weights summing to 1.
// Atoms are matched by exact equality; callers needing fuzzy matching must
// pre-quantize.
class DiscreteDist {
 public:
  DiscreteDist(std::vector<Point> atoms, std::vector<double> weights);
  static DiscreteDist from_scalars(std::vector<double> atoms,
                                   std::vector<double> weights);
  static DiscreteDist point_mass(Point atom);
  static DiscreteDist point_mass(double atom);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const Point& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  double expectation(const Representer& ell) const;
  DiscreteDist mix(const DiscreteDist& other, double lambda) const;

 private:
  std::vector<Point> atoms_;
  std::vector<double> weights_;
};

// Row-stochastic transition matrix over finite alphabets.
class DiscreteChannel {
 public:
  DiscreteChannel(std::vector<Point> inputs, std::vector<Point> outputs,
                  std::vector<std::vector<double>> matrix);

  std::size_t n_inputs() const { return inputs_.size(); }
  std::size_t n_outputs() const { return outputs_.size(); }
  const std::vector<Point>& inputs() const { return inputs_; }
  const std::vector<Point>& outputs() const { return outputs_; }
  double prob(std::size_t input, std::size_t output) const {
    return matrix_[input][output];
  }

 private:
  std::vector<Point> inputs_;
  std::vector<Point> outputs_;
  std::vector<std::vector<double>> matrix_;
};

// The two-point privatization channel. An input x is released as
//   +z0 with probability (1 + ell(x)/z0) / 2, and -z0 otherwise,
// where z0 = sup_norm * (e^alpha + 1)/(e^alpha - 1). The released value is
// conditionally unbiased for ell(x), and the likelihood ratio of any output
// under two inputs is at most e^alpha.
class BinaryChannel {
 public:
  BinaryChannel(Representer ell, PrivacyLevel level);

  const Representer& representer() const { return ell_; }
  const PrivacyLevel& level() const { return level_; }
  double z0() const { return z0_; }

  // (1 + ell(x)/z0) / 2; throws if |ell(x)| exceeds the certified bound.
  double success_probability(std::span<const double> x) const;
  double success_probability(double x) const {
    return success_probability({&x, 1});
  }

  double privatize(std::span<const double> x, RandomStream& rng) const;
  double privatize(double x, RandomStream& rng) const {
    return privatize({&x, 1}, rng);
  }

  DiscreteDist pushforward(const DiscreteDist& p) const;

  // Restriction to a finite grid of attained representer values, as a
  // two-column transition matrix; inputs are labelled by the ell-values.
  DiscreteChannel restrict_to_values(std::span<const double> ell_values) const;

 private:
  Representer ell_;
  PrivacyLevel level_;
  double z0_;
};

BinaryChannel make_binary_channel(Representer ell, PrivacyLevel level);

// Worst-case log-likelihood ratio max_{z,x,x'} log Q(z|x)/Q(z|x').
// 0/0 counts as ratio 1; p/0 with p > 0 yields +infinity.
double audit_privacy(const DiscreteChannel& channel);
bool audit_passes(const DiscreteChannel& channel, const PrivacyLevel& level);

DiscreteDist pushforward(const DiscreteChannel& channel, const DiscreteDist& p);

// 0.5 * sum |p_i - q_i| over the merged support.
double tv_distance(const DiscreteDist& p, const DiscreteDist& q);
// sqrt(sum (sqrt p_i - sqrt q_i)^2); satisfies d_H^2 = 2 (1 - affinity).
double hellinger_distance(const DiscreteDist& p, const DiscreteDist& q);
// sum sqrt(p_i q_i), in [0, 1].
double hellinger_affinity(const DiscreteDist& p, const DiscreteDist& q);

}  // namespace ldp
