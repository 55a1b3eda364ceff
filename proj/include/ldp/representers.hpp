#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ldp/channels.hpp"
#include "ldp/polynomial.hpp"

namespace ldp {

enum class FamilyKind {
  truncated_moment,
  derivative_kernel,
  product_kernel,
  uniform_endpoint,
};

std::string to_string(FamilyKind kind);

// Parameters of a bandwidth-indexed representer class: for h in (0, h0]^k the
// instantiated function obeys sup-norm <= d0 * prod h_j^{-s_j} and worst-case
// bias <= d0 * (1/k) * sum h_j^{t_j}.
struct ConditionC {
  std::size_t k = 1;
  std::vector<double> s;
  std::vector<double> t;
  double d0 = 1.0;
  double h0 = 1.0;

  double r_bar() const;           // sum s_j / t_j
  double rate_exponent() const {  // 1 / (1 + r_bar)
    return 1.0 / (1.0 + r_bar());
  }
  double sup_bound(std::span<const double> h) const;
  double bias_bound(std::span<const double> h) const;
};

// Compactly supported polynomial kernel K(u) = q(u) * (1 - u^2)^(m+1) on
// [-1, 1] with q solved from the moment system: the integral of K is (-1)^m
// and moments 1..order vanish. The boundary factor makes K^(j)(+-1) = 0 for
// j = 0..m exactly.
class PolyKernel {
 public:
  PolyKernel(Polynomial poly, int order, int smoothness);

  double operator()(double u) const { return u < -1.0 || u > 1.0 ? 0.0 : poly_(u); }
  const Polynomial& polynomial() const { return poly_; }
  Polynomial derivative(int j) const;
  int order() const { return order_; }
  int smoothness() const { return smoothness_; }
  double moment(int j) const;  // exact integral of u^j K(u) over [-1, 1]
  double sup_norm() const { return poly_.max_abs(-1.0, 1.0); }

 private:
  Polynomial poly_;
  int order_;
  int smoothness_;
};

PolyKernel build_kernel(int order, int smoothness);

struct BandwidthSelection {
  std::vector<double> h;
  bool clamped = false;  // set when the rule exceeded h0 and was clipped
};

class RepresenterFamily {
 public:
  using Factory = std::function<Representer(std::span<const double>)>;

  RepresenterFamily(FamilyKind kind, ConditionC condition, Factory factory);

  FamilyKind kind() const { return kind_; }
  const ConditionC& condition() const { return cond_; }

  Representer at(std::span<const double> h) const;
  Representer at(double h) const { return at({&h, 1}); }

 private:
  FamilyKind kind_;
  ConditionC cond_;
  Factory factory_;
};

// f truncated at level 1/h: keeps f(x) while |f(x)| <= 1/h, else 0.
// Metadata: k=1, s=1, t=kappa-1, for distributions with E|f|^kappa <= L.
RepresenterFamily truncated_moment_family(std::function<double(double)> f,
                                          double kappa, double moment_bound);
Representer truncated_moment(std::function<double(double)> f, double kappa,
                             double h, double moment_bound = 1.0);

// Localized m-th kernel derivative h^-(m+1) K^(m)((x - x0)/h) on
// [x0 - h, x0 + h]; unbiased up to order h^(beta-m) over the Hoelder class
// with exponent beta. Metadata: k=1, s=m+1, t=beta-m.
RepresenterFamily derivative_kernel_family(int m, double beta, double holder_l,
                                           double x0);
Representer derivative_kernel(int m, double beta, double holder_l, double x0,
                              double h);

// Separable product of one-dimensional kernels for anisotropic density
// estimation at a point. Metadata: k=d, s_j=1, t_j=beta_j.
RepresenterFamily product_kernel_family(std::vector<double> beta,
                                        std::vector<double> holder_l,
                                        std::vector<double> x0);
Representer product_kernel(std::vector<double> beta, std::vector<double> holder_l,
                           std::vector<double> x0, std::vector<double> h);

// ell(x) = 2x on [0, M]; exactly unbiased for the endpoint of Unif[0, theta].
// Metadata: k=1, s=0, t=1 (bandwidth-free), D0 = 2M.
RepresenterFamily uniform_endpoint_family(double m_bound);
Representer uniform_endpoint_representer(double m_bound);

// h_{n,j} = ((1/sqrt(n)) (e^a+1)/(e^a-1))^(1/(t_j (1+r_bar))), clipped to h0.
BandwidthSelection select_bandwidth(const RepresenterFamily& family, long n,
                                    const PrivacyLevel& level);

struct ConditionCRow {
  std::vector<double> h;
  double sup_norm;
  double sup_bound;
  double bias;
  double bias_bound;
};

struct ConditionCReport {
  std::vector<ConditionCRow> rows;
  double worst_sup_ratio = 0.0;   // max sup_norm / sup_bound
  double worst_bias_ratio = 0.0;  // max bias / bias_bound
  bool sup_ok = true;
  bool bias_ok = true;
};

// Check the sup-norm and worst-case-bias bounds of the family over a finite
// set of test distributions with known functional values.
ConditionCReport verify_condition_c(const RepresenterFamily& family,
                                    const std::vector<DiscreteDist>& dists,
                                    const std::vector<double>& thetas,
                                    const std::vector<std::vector<double>>& h_grid);

}  // namespace ldp
