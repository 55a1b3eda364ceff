#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldp/channels.hpp"
#include "ldp/models.hpp"

namespace ldp {

enum class Metric { tv, hellinger };

enum class ProblemTag {
  moment_bounded,
  moment_heavy,
  density_derivative,
  density_anisotropic,
  uniform_endpoint,
};

std::string to_string(ProblemTag tag);
ProblemTag problem_tag_from_string(const std::string& name);

// Closed-form modulus-of-continuity curve omega(eps) = scale * eps^exponent.
// Exponents per problem: the constants are not asserted anywhere, only rates.
struct ModulusCurve {
  ProblemTag problem;
  Metric metric;
  double exponent;
  double scale = 1.0;

  double operator()(double eps) const;
};

struct CurveParams {
  double kappa = 2.0;   // moment problems
  double beta = 1.0;    // density derivative
  int m = 0;            // density derivative
  double r_bar = 1.0;   // anisotropic density (sum 1/beta_j)
  double scale = 1.0;
};

ModulusCurve analytic_modulus_curve(ProblemTag tag, Metric metric,
                                    const CurveParams& params = {});
double analytic_modulus(const ModulusCurve& curve, double eps);

// Two-sided envelope for the endpoint problem under the Hellinger metric:
// eps^2 (1 - eps^2/4) <= omega_H(eps) <= M eps^2 for eps in (0, 1).
struct Bracket {
  double lo;
  double hi;
};
Bracket uniform_endpoint_hellinger_bracket(double eps, double m_bound);

// Finite list of distributions with known functional values; the substrate
// for brute-force moduli.
struct FiniteFamily {
  std::vector<DiscreteDist> dists;
  std::vector<double> thetas;

  std::size_t size() const { return dists.size(); }
  void add(DiscreteDist dist, double theta);
  // Append all pairwise mixtures on a lambda grid; thetas mix linearly,
  // which is exact for linear functionals.
  FiniteFamily convexify(const std::vector<double>& lambdas) const;
  static std::vector<double> lambda_grid(std::size_t count);
};

// sup{|theta_i - theta_j| : d(P_i, P_j) <= eps} over ordered pairs including
// i = j; nullopt encodes sup over the empty set.
std::optional<double> brute_force_modulus(const FiniteFamily& family, double eps,
                                          Metric metric);

// Same sup with the distance taken between channel pushforwards under the
// Hellinger metric.
std::optional<double> privatized_modulus(const FiniteFamily& family,
                                         const BinaryChannel& channel,
                                         double eps);

// Minimax lower-bound curve
//   (eta/2) * l( (1/2) max[ omega_tv((1-eta)/sqrt(2 n (e^a-1)^2)),
//                           omega_h(c sqrt(|log eta| / n)) ] ).
// The constant c is a configuration parameter; the theory only gives
// existence.
double lower_bound_curve(long n, const PrivacyLevel& level, double eta,
                         const LossFn& loss, const ModulusCurve& curve_tv,
                         const ModulusCurve& curve_h, double c);

struct ContractionResult {
  double lhs;   // exact TV distance of the n-fold privatized products
  double rhs;   // sqrt(2 n (e^alpha - 1)^2) * tv(p0, p1)
  bool pass;
};

// Exhaustive check of the product-measure TV contraction bound for
// per-coordinate marginal channels over small alphabets.
ContractionResult contraction_check(const std::vector<DiscreteChannel>& channels,
                                    const DiscreteDist& p0, const DiscreteDist& p1,
                                    int n, const PrivacyLevel& level);

}  // namespace ldp
