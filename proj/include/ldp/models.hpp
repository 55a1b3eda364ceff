#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ldp/channels.hpp"
#include "ldp/rng.hpp"

namespace ldp {

enum class LossKind { power, huber };

// Non-decreasing loss with l(0) = 0 and the doubling bound
// l(3t/2) <= a l(t); a = (3/2)^gamma for power loss, a = 9/2 for Huber.
struct LossFn {
  LossKind kind;
  double gamma;
  double doubling_a;

  double operator()(double t) const;
};

LossFn loss(LossKind kind, double gamma);
LossFn loss(const std::string& tag, double gamma);

// The infinitely differentiable bump exp(-1/(1 - 4u^2)) on (-1/2, 1/2),
// with exact derivatives (rational-polynomial recurrence).
namespace bump {
double kappa0(double u, int deriv = 0);
double integral();                       // of kappa0 over the real line
double holder_constant(double beta);     // of the floor(beta)-th derivative,
                                         // exponent beta - floor(beta), grid sup
}  // namespace bump

// A data-generating distribution with a known functional value, a seeded
// sampler and a quantization method.
class StatModel {
 public:
  virtual ~StatModel() = default;

  virtual std::string tag() const = 0;
  virtual std::size_t dim() const { return 1; }
  virtual double theta() const = 0;

  // Observation `index` of the given stream; pure in (stream, index).
  virtual void draw(const RandomStream& stream, std::uint64_t index,
                    std::span<double> out) const = 0;
  double draw1(const RandomStream& stream, std::uint64_t index) const;

  virtual DiscreteDist discretize(std::size_t resolution) const = 0;
};

// Unif[0, theta] with endpoint functional, over the class theta in (0, M].
class UniformEndpointModel final : public StatModel {
 public:
  UniformEndpointModel(double theta, double m_bound);

  std::string tag() const override { return "uniform_endpoint"; }
  double theta() const override { return theta_; }
  double m_bound() const { return m_bound_; }
  void draw(const RandomStream& stream, std::uint64_t index,
            std::span<double> out) const override;
  // Equal cells over [0, M]; atoms at cell midpoints.
  DiscreteDist discretize(std::size_t resolution) const override;

 private:
  double theta_;
  double m_bound_;
};

std::unique_ptr<UniformEndpointModel> uniform_model(double theta, double m_bound);

enum class MomentKind { bounded, heavy };

// Functional x -> f(x) together with a right inverse of |f| used to place
// atoms with prescribed |f|-values.
struct MomentFunctional {
  std::function<double(double)> f;
  std::function<double(double)> point_with_abs_value;  // y >= 0 -> x, |f(x)| = y

  static MomentFunctional identity();
};

// Two-point worst-case pair for moment estimation under E|f|^kappa <= L:
// P0 concentrated where |f| = delta, P1 moving mass eps to where
// |f| = (L/(2 eps))^(1/kappa) (heavy) or to the opposite bounded value.
class MomentModel final : public StatModel {
 public:
  MomentModel(MomentKind kind, MomentFunctional fn, double kappa, double L,
              double eps, double delta = 1e-6);

  std::string tag() const override { return "moment"; }
  MomentKind kind() const { return kind_; }
  double theta() const override { return theta1_; }  // samples follow P1
  double theta0() const { return theta0_; }
  double theta1() const { return theta1_; }
  double theta_gap() const { return std::abs(theta0_ - theta1_); }
  double tv_exact() const { return eps_; }
  double eps() const { return eps_; }

  const DiscreteDist& pair0() const { return p0_; }
  const DiscreteDist& pair1() const { return p1_; }

  void draw(const RandomStream& stream, std::uint64_t index,
            std::span<double> out) const override;
  DiscreteDist discretize(std::size_t resolution) const override;

 private:
  MomentKind kind_;
  MomentFunctional fn_;
  double kappa_;
  double bound_l_;
  double eps_;
  double x_low_;
  double x_high_;
  double theta0_;
  double theta1_;
  DiscreteDist p0_;
  DiscreteDist p1_;
};

std::unique_ptr<MomentModel> moment_model(MomentKind kind, MomentFunctional fn,
                                          double kappa, double L, double eps,
                                          double delta = 1e-6);

// Hoelder-smooth density on the line built from a scaled bump, optionally
// carrying the localized perturbation p1 = p0 + (L/2) h^beta g((x-x0)/h).
// The functional is the m-th derivative of the density at x0.
class HolderDensityModel final : public StatModel {
 public:
  HolderDensityModel(double beta, double holder_l, double x0, int m,
                     double bump_h);  // bump_h <= 0: base density only

  std::string tag() const override { return "holder_density"; }
  double theta() const override;  // of the sampled density (p1 if perturbed)
  double beta() const { return beta_; }
  double holder_l() const { return holder_l_; }
  double x0() const { return x0_; }
  int m() const { return m_; }
  bool perturbed() const { return bump_h_ > 0.0; }

  double density(double x, bool perturbed) const;
  double density_deriv(double x, int order, bool perturbed) const;
  double theta_of(bool perturbed) const;

  // Closed forms for the worst-case pair (p0, p1).
  double functional_gap_closed_form() const;  // (L/2) h^(beta-m) |g^(m)(0)|
  double tv_closed_form() const;              // (L/2) h^(beta+1) |kappa|_L1

  Interval support() const { return support_; }
  double max_admissible_h() const;

  void draw(const RandomStream& stream, std::uint64_t index,
            std::span<double> out) const override;
  DiscreteDist discretize(std::size_t resolution) const override;
  DiscreteDist discretize_variant(std::size_t resolution, bool perturbed) const;

 private:
  void build_sampler();

  double beta_;
  double holder_l_;
  double x0_;
  int m_;
  double bump_h_;
  int b_;            // number of full derivatives
  double a0_;        // kernel scaling: Hoelder constant 1/2
  double a1_, a2_;   // base density scaling
  double delta0_, delta1_;
  Interval support_{0.0, 0.0};
  std::vector<double> cdf_grid_;  // inverse-CDF sampler grid
  std::vector<double> cdf_vals_;
};

std::unique_ptr<HolderDensityModel> holder_density_model(double beta,
                                                         double holder_l,
                                                         double x0, int m = 0,
                                                         double bump_h = 0.0);

// Anisotropic Hoelder density in d <= 3 dimensions: Gaussian base plus a
// separable localized perturbation. The functional is the density at x0.
class AnisotropicDensityModel final : public StatModel {
 public:
  AnisotropicDensityModel(std::vector<double> beta, std::vector<double> holder_l,
                          std::vector<double> x0);

  std::string tag() const override { return "anisotropic_density"; }
  std::size_t dim() const override { return beta_.size(); }
  double theta() const override { return theta0(); }  // samples follow p0
  double theta0() const;
  double sigma() const { return sigma_; }

  struct WorstCasePair {
    double h;
    std::vector<double> h_axes;
    double theta_gap;  // h * prod L_j g_j(0) / 2
    double tv;         // h * prod h_j L_j |g_j|_1 / 2
  };
  // Solve the perturbation size system for a target TV distance eps.
  WorstCasePair worst_case_pair(double eps) const;

  double density0(std::span<const double> x) const;
  double density1(std::span<const double> x, const WorstCasePair& pair) const;

  void draw(const RandomStream& stream, std::uint64_t index,
            std::span<double> out) const override;
  void draw_perturbed(const RandomStream& stream, std::uint64_t index,
                      const WorstCasePair& pair, std::span<double> out) const;
  // Product grid over +-4 sigma; atoms are flattened cell centres.
  DiscreteDist discretize(std::size_t resolution) const override;

  double c0() const { return c0_; }
  double c2() const { return c2_; }
  double max_admissible_h() const { return h_cap_; }

 private:
  std::vector<double> beta_;
  std::vector<double> holder_l_;
  std::vector<double> x0_;
  std::vector<double> a0_;      // per-coordinate kernel scalings
  std::vector<double> g_sup_;   // |g_j|_inf
  std::vector<double> g_l1_;    // |g_j|_1
  double sigma_;
  double c0_;
  double c2_;
  double h_cap_;
};

std::unique_ptr<AnisotropicDensityModel> anisotropic_model(
    std::vector<double> beta, std::vector<double> holder_l,
    std::vector<double> x0);

}  // namespace ldp
