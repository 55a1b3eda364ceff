#include "ldp/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "ldp/polynomial.hpp"
#include "ldp/quadrature.hpp"

namespace ldp {

namespace {

constexpr double kSafety = 1.05;  // inflation of grid-estimated constants

double power_loss(double t, double gamma) { return std::pow(t, gamma); }

double huber_loss(double t, double gamma) {
  return t < gamma ? 0.5 * t * t : gamma * (t - 0.5 * gamma);
}

// Number of full derivatives below the Hoelder exponent; beta - b in (0, 1].
int full_derivatives(double beta) {
  return static_cast<int>(std::ceil(beta)) - 1;
}

double gaussian_density(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Grid-sup Hoelder constant of f over [lo, hi] with exponent gamma.
template <typename Fn>
double grid_holder_constant(Fn f, double lo, double hi, double gamma,
                            int points = 1200) {
  std::vector<double> xs(points), vs(points);
  for (int i = 0; i < points; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    vs[i] = f(xs[i]);
  }
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    for (int j = i + 1; j < points; ++j) {
      const double gap = xs[j] - xs[i];
      worst = std::max(worst, std::abs(vs[j] - vs[i]) / std::pow(gap, gamma));
    }
  }
  return worst;
}

}  // namespace

double LossFn::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("loss argument must be non-negative");
  return kind == LossKind::power ? power_loss(t, gamma) : huber_loss(t, gamma);
}

LossFn loss(LossKind kind, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("loss parameter must be positive");
  const double a =
      kind == LossKind::power ? std::pow(1.5, gamma) : 4.5;
  return LossFn{kind, gamma, a};
}

LossFn loss(const std::string& tag, double gamma) {
  if (tag == "power") return loss(LossKind::power, gamma);
  if (tag == "huber") return loss(LossKind::huber, gamma);
  throw std::invalid_argument("unknown loss tag: " + tag);
}

namespace bump {

namespace {

// kappa0^(j)(u) = kappa0(u) * N_j(u) / (1 - 4u^2)^(2j); N_0 = 1 and
// N_{j+1} = -8u N_j + N_j' D^2 + 16 j u N_j D with D = 1 - 4u^2.
const Polynomial& numerator(int j) {
  static const std::vector<Polynomial> table = [] {
    std::vector<Polynomial> polys;
    polys.emplace_back(std::vector<double>{1.0});
    const Polynomial d({1.0, 0.0, -4.0});
    const Polynomial u = Polynomial::monomial(1);
    for (int k = 0; k + 1 <= 12; ++k) {
      const Polynomial& n = polys.back();
      polys.push_back(u * n * -8.0 + n.derivative() * (d * d) +
                      u * n * d * (16.0 * k));
    }
    return polys;
  }();
  return table.at(static_cast<std::size_t>(j));
}

}  // namespace

double kappa0(double u, int deriv) {
  const double d = 1.0 - 4.0 * u * u;
  if (d <= 0.0) return 0.0;
  const double base = std::exp(-1.0 / d);
  if (deriv == 0) return base;
  return base * numerator(deriv)(u) / std::pow(d, 2.0 * deriv);
}

double integral() {
  static const double value =
      integrate([](double u) { return kappa0(u); }, -0.5, 0.5, 20000);
  return value;
}

double holder_constant(double beta) {
  const int b = full_derivatives(beta);
  const double gamma = beta - b;
  return grid_holder_constant([b](double u) { return kappa0(u, b); }, -0.55,
                              0.55, gamma);
}

}  // namespace bump

double StatModel::draw1(const RandomStream& stream, std::uint64_t index) const {
  double out = 0.0;
  draw(stream, index, {&out, 1});
  return out;
}

UniformEndpointModel::UniformEndpointModel(double theta, double m_bound)
    : theta_(theta), m_bound_(m_bound) {
  if (!(m_bound > 0.0) || !(theta > 0.0) || theta > m_bound) {
    throw std::invalid_argument("endpoint model requires 0 < theta <= M");
  }
}

void UniformEndpointModel::draw(const RandomStream& stream, std::uint64_t index,
                                std::span<double> out) const {
  out[0] = theta_ * stream.uniform_at(index);
}

DiscreteDist UniformEndpointModel::discretize(std::size_t resolution) const {
  if (resolution == 0) throw std::invalid_argument("resolution must be positive");
  const double cell = m_bound_ / static_cast<double>(resolution);
  std::vector<double> atoms(resolution), weights(resolution, 0.0);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double lo = cell * static_cast<double>(i);
    const double hi = lo + cell;
    atoms[i] = 0.5 * (lo + hi);
    weights[i] = std::clamp((std::min(hi, theta_) - std::min(lo, theta_)) / theta_,
                            0.0, 1.0);
  }
  return DiscreteDist::from_scalars(std::move(atoms), std::move(weights));
}

std::unique_ptr<UniformEndpointModel> uniform_model(double theta, double m_bound) {
  return std::make_unique<UniformEndpointModel>(theta, m_bound);
}

MomentFunctional MomentFunctional::identity() {
  return MomentFunctional{[](double x) { return x; }, [](double y) { return y; }};
}

MomentModel::MomentModel(MomentKind kind, MomentFunctional fn, double kappa,
                         double L, double eps, double delta)
    : kind_(kind),
      fn_(std::move(fn)),
      kappa_(kappa),
      bound_l_(L),
      eps_(eps),
      p0_(DiscreteDist::point_mass(0.0)),
      p1_(DiscreteDist::point_mass(0.0)) {
  if (!(kappa > 1.0) || !(L > 0.0)) {
    throw std::invalid_argument("moment model requires kappa > 1 and L > 0");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("worst-case parameter eps must lie in (0, 1)");
  }
  if (kind_ == MomentKind::heavy) {
    if (!(delta > 0.0 && delta < std::pow(0.5 * L, 1.0 / kappa))) {
      throw std::invalid_argument("delta must lie in (0, (L/2)^(1/kappa))");
    }
    x_low_ = fn_.point_with_abs_value(delta);
    x_high_ = fn_.point_with_abs_value(std::pow(L / (2.0 * eps), 1.0 / kappa));
    const double m1 = std::pow(std::abs(fn_.f(x_low_)), kappa);
    const double m2 = (1.0 - eps) * m1 +
                      eps * std::pow(std::abs(fn_.f(x_high_)), kappa);
    if (m1 > L || m2 > L * (1.0 + 1e-9)) {
      throw std::invalid_argument("constructed pair violates the moment bound");
    }
  } else {
    x_low_ = fn_.point_with_abs_value(0.0);
    x_high_ = fn_.point_with_abs_value(std::pow(L, 1.0 / kappa));
  }
  theta0_ = fn_.f(x_low_);
  theta1_ = (1.0 - eps) * fn_.f(x_low_) + eps * fn_.f(x_high_);
  p0_ = DiscreteDist::point_mass(x_low_);
  p1_ = DiscreteDist::from_scalars({x_low_, x_high_}, {1.0 - eps, eps});
}

void MomentModel::draw(const RandomStream& stream, std::uint64_t index,
                       std::span<double> out) const {
  out[0] = stream.uniform_at(index) < eps_ ? x_high_ : x_low_;
}

DiscreteDist MomentModel::discretize(std::size_t) const { return p1_; }

std::unique_ptr<MomentModel> moment_model(MomentKind kind, MomentFunctional fn,
                                          double kappa, double L, double eps,
                                          double delta) {
  return std::make_unique<MomentModel>(kind, std::move(fn), kappa, L, eps, delta);
}

HolderDensityModel::HolderDensityModel(double beta, double holder_l, double x0,
                                       int m, double bump_h)
    : beta_(beta), holder_l_(holder_l), x0_(x0), m_(m), bump_h_(bump_h) {
  if (!(beta > 0.0) || !(holder_l > 0.0)) {
    throw std::invalid_argument("density model requires beta > 0 and L > 0");
  }
  if (m < 0 || !(static_cast<double>(m) < beta)) {
    throw std::invalid_argument("functional order m must satisfy 0 <= m < beta");
  }
  b_ = full_derivatives(beta_);

  const double c_hol = kSafety * bump::holder_constant(beta_);
  const double i0 = bump::integral();
  a0_ = 0.5 / c_hol;
  a2_ = std::pow(2.0 * c_hol / (i0 * holder_l_), 1.0 / (1.0 + beta_));
  a1_ = 1.0 / (a2_ * i0);
  delta1_ = 0.25 * a2_;
  delta0_ = a1_ * std::exp(-4.0 / 3.0);

  if (bump_h_ > 0.0 && bump_h_ >= max_admissible_h()) {
    throw std::invalid_argument("bump width h violates the admissibility bounds");
  }
  const double left = std::min(-0.5 * a2_, bump_h_ > 0.0 ? -1.5 * bump_h_ : 0.0);
  support_ = Interval{x0_ + left, x0_ + 0.5 * a2_};
  build_sampler();
}

double HolderDensityModel::max_admissible_h() const {
  const double kappa_sup = a0_ * std::exp(-1.0);
  return std::min(2.0 * delta1_,
                  std::pow(delta0_ / (holder_l_ * kappa_sup), 1.0 / beta_));
}

double HolderDensityModel::density(double x, bool perturbed) const {
  return density_deriv(x, 0, perturbed);
}

double HolderDensityModel::density_deriv(double x, int order,
                                         bool perturbed) const {
  double value = a1_ / std::pow(a2_, order) * bump::kappa0((x - x0_) / a2_, order);
  if (perturbed) {
    if (!(bump_h_ > 0.0)) {
      throw std::logic_error("model was built without a perturbation");
    }
    const double y = (x - x0_) / bump_h_;
    const double g =
        a0_ * (bump::kappa0(y + 1.0, order) - bump::kappa0(y, order));
    value += 0.5 * holder_l_ * std::pow(bump_h_, beta_ - order) * g;
  }
  return value;
}

double HolderDensityModel::theta_of(bool perturbed) const {
  return density_deriv(x0_, m_, perturbed);
}

double HolderDensityModel::theta() const { return theta_of(perturbed()); }

double HolderDensityModel::functional_gap_closed_form() const {
  if (!(bump_h_ > 0.0)) return 0.0;
  const double g_m0 = -a0_ * bump::kappa0(0.0, m_);
  return 0.5 * holder_l_ * std::pow(bump_h_, beta_ - m_) * std::abs(g_m0);
}

double HolderDensityModel::tv_closed_form() const {
  if (!(bump_h_ > 0.0)) return 0.0;
  return 0.5 * holder_l_ * std::pow(bump_h_, beta_ + 1.0) * a0_ * bump::integral();
}

void HolderDensityModel::build_sampler() {
  constexpr std::size_t kGrid = 1 << 16;
  cdf_grid_.resize(kGrid + 1);
  cdf_vals_.resize(kGrid + 1);
  const double lo = support_.lo;
  const double hi = support_.hi;
  const bool variant = perturbed();
  double acc = 0.0;
  double prev = density(lo, variant);
  cdf_grid_[0] = lo;
  cdf_vals_[0] = 0.0;
  for (std::size_t i = 1; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / kGrid;
    const double cur = density(x, variant);
    acc += 0.5 * (prev + cur) * (hi - lo) / kGrid;
    cdf_grid_[i] = x;
    cdf_vals_[i] = acc;
    prev = cur;
  }
  for (double& v : cdf_vals_) v /= acc;  // trapezoid mass, renormalized
}

void HolderDensityModel::draw(const RandomStream& stream, std::uint64_t index,
                              std::span<double> out) const {
  const double u = stream.uniform_at(index);
  const auto it = std::upper_bound(cdf_vals_.begin(), cdf_vals_.end(), u);
  const std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(it - cdf_vals_.begin()), cdf_vals_.size() - 1);
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  const double span_v = cdf_vals_[hi] - cdf_vals_[lo];
  const double frac = span_v > 0.0 ? (u - cdf_vals_[lo]) / span_v : 0.0;
  out[0] = cdf_grid_[lo] + frac * (cdf_grid_[hi] - cdf_grid_[lo]);
}

DiscreteDist HolderDensityModel::discretize(std::size_t resolution) const {
  return discretize_variant(resolution, perturbed());
}

DiscreteDist HolderDensityModel::discretize_variant(std::size_t resolution,
                                                    bool variant) const {
  if (resolution == 0) throw std::invalid_argument("resolution must be positive");
  std::vector<double> atoms(resolution), weights(resolution);
  const double lo = support_.lo;
  const double width = support_.hi - support_.lo;
  double total = 0.0;
  for (std::size_t i = 0; i < resolution; ++i) {
    const double a = lo + width * static_cast<double>(i) / resolution;
    const double b = lo + width * static_cast<double>(i + 1) / resolution;
    atoms[i] = 0.5 * (a + b);
    weights[i] = integrate([&](double x) { return density(x, variant); }, a, b, 8);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return DiscreteDist::from_scalars(std::move(atoms), std::move(weights));
}

std::unique_ptr<HolderDensityModel> holder_density_model(double beta,
                                                         double holder_l,
                                                         double x0, int m,
                                                         double bump_h) {
  return std::make_unique<HolderDensityModel>(beta, holder_l, x0, m, bump_h);
}

AnisotropicDensityModel::AnisotropicDensityModel(std::vector<double> beta,
                                                 std::vector<double> holder_l,
                                                 std::vector<double> x0)
    : beta_(std::move(beta)), holder_l_(std::move(holder_l)), x0_(std::move(x0)) {
  const std::size_t d = beta_.size();
  if (d == 0 || d > 3 || holder_l_.size() != d || x0_.size() != d) {
    throw std::invalid_argument("anisotropic model requires 1 <= d <= 3 matching vectors");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(beta_[j] > 0.0 && beta_[j] <= 1.0) || !(holder_l_[j] > 0.0)) {
      throw std::invalid_argument("anisotropic model requires beta_j in (0,1], L_j > 0");
    }
  }
  const double i0 = bump::integral();
  a0_.resize(d);
  g_sup_.resize(d);
  g_l1_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    a0_[j] = 0.5 / (kSafety * bump::holder_constant(beta_[j]));
    g_sup_[j] = a0_[j] * std::exp(-1.0);
    g_l1_[j] = 2.0 * a0_[j] * i0;
  }

  // Flatten the Gaussian base until each coordinate Hoelder bound holds.
  sigma_ = 1.0;
  for (int tries = 0; tries < 60; ++tries) {
    bool ok = true;
    const double off_axis = std::pow(gaussian_density(0.0, sigma_),
                                     static_cast<double>(d) - 1.0);
    for (std::size_t j = 0; j < d && ok; ++j) {
      const double c1d = grid_holder_constant(
          [this](double x) { return gaussian_density(x, sigma_); }, -5.0 * sigma_,
          5.0 * sigma_, beta_[j], 700);
      ok = kSafety * off_axis * c1d <= 0.5 * holder_l_[j];
    }
    if (ok) break;
    sigma_ *= 1.5;
    if (tries == 59) {
      throw std::runtime_error("could not flatten the base density");
    }
  }

  double min_cbar = std::numeric_limits<double>::infinity();
  // Half the perturbation's L1 mass per unit h and unit bandwidths; the TV
  // distance of the pair is c2 h prod h_j under the half-L1 convention.
  c2_ = 0.5;
  double pert_sup = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double cbar = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (k != j) cbar *= 0.5 * holder_l_[k] * g_sup_[k];
    }
    min_cbar = std::min(min_cbar, 1.0 / cbar);
    c2_ *= 0.5 * holder_l_[j] * g_l1_[j];
    pert_sup *= 0.5 * holder_l_[j] * g_sup_[j];
  }
  c0_ = min_cbar;

  double qd_ones = 1.0;
  for (std::size_t j = 0; j < d; ++j) qd_ones *= gaussian_density(1.0, sigma_);
  h_cap_ = qd_ones / pert_sup;
  for (std::size_t j = 0; j < d; ++j) {
    h_cap_ = std::min(h_cap_, c0_ * std::pow(2.0 / 3.0, beta_[j]));
  }
}

double AnisotropicDensityModel::theta0() const {
  double acc = 1.0;
  for (std::size_t j = 0; j < dim(); ++j) acc *= gaussian_density(0.0, sigma_);
  return acc;
}

AnisotropicDensityModel::WorstCasePair AnisotropicDensityModel::worst_case_pair(
    double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t d = dim();
  double r_bar = 0.0;
  for (std::size_t j = 0; j < d; ++j) r_bar += 1.0 / beta_[j];
  WorstCasePair pair;
  pair.h = std::pow(eps * std::pow(c0_, r_bar) / c2_, 1.0 / (1.0 + r_bar));
  if (pair.h > h_cap_) {
    throw std::invalid_argument("eps too large for an admissible perturbation");
  }
  pair.h_axes.resize(d);
  double gap = pair.h;
  double tv = pair.h * c2_;
  for (std::size_t j = 0; j < d; ++j) {
    pair.h_axes[j] = std::pow(pair.h / c0_, 1.0 / beta_[j]);
    gap *= 0.5 * holder_l_[j] * a0_[j] * std::exp(-1.0);
    tv *= pair.h_axes[j];
  }
  pair.theta_gap = gap;
  pair.tv = tv;
  return pair;
}

double AnisotropicDensityModel::density0(std::span<const double> x) const {
  double acc = 1.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    acc *= gaussian_density(x[j] - x0_[j], sigma_);
  }
  return acc;
}

double AnisotropicDensityModel::density1(std::span<const double> x,
                                         const WorstCasePair& pair) const {
  double pert = pair.h;
  for (std::size_t j = 0; j < dim(); ++j) {
    const double y = (x[j] - x0_[j]) / pair.h_axes[j];
    pert *= 0.5 * holder_l_[j] * a0_[j] *
            (bump::kappa0(y + 1.0) - bump::kappa0(y));
  }
  return density0(x) + pert;
}

void AnisotropicDensityModel::draw(const RandomStream& stream,
                                   std::uint64_t index,
                                   std::span<double> out) const {
  const RandomStream sub = stream.derive(index);
  for (std::size_t j = 0; j < dim(); ++j) {
    const double u1 = std::max(sub.uniform_at(2 * j), 0x1.0p-53);
    const double u2 = sub.uniform_at(2 * j + 1);
    out[j] = x0_[j] + sigma_ * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(2.0 * std::numbers::pi * u2);
  }
}

void AnisotropicDensityModel::draw_perturbed(const RandomStream& stream,
                                             std::uint64_t index,
                                             const WorstCasePair& pair,
                                             std::span<double> out) const {
  const std::size_t d = dim();
  // Rejection from the base density; the perturbation is compactly supported,
  // so the density ratio is bounded.
  double ratio_cap = 1.0;
  {
    std::vector<double> x(d);
    const int grid = 9;
    std::vector<int> idx(d, 0);
    for (;;) {
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = x0_[j] - 1.5 * pair.h_axes[j] +
               2.0 * pair.h_axes[j] * static_cast<double>(idx[j]) / (grid - 1);
      }
      ratio_cap = std::max(ratio_cap, density1(x, pair) / density0(x));
      std::size_t j = 0;
      while (j < d && ++idx[j] == grid) idx[j++] = 0;
      if (j == d) break;
    }
    ratio_cap *= 1.1;
  }
  const RandomStream sub = stream.derive(index);
  const std::uint64_t block = 2 * d + 1;
  for (std::uint64_t attempt = 0;; ++attempt) {
    for (std::size_t j = 0; j < d; ++j) {
      const double u1 = std::max(sub.uniform_at(attempt * block + 2 * j), 0x1.0p-53);
      const double u2 = sub.uniform_at(attempt * block + 2 * j + 1);
      out[j] = x0_[j] + sigma_ * std::sqrt(-2.0 * std::log(u1)) *
                            std::cos(2.0 * std::numbers::pi * u2);
    }
    const double u = sub.uniform_at(attempt * block + 2 * d);
    if (u * ratio_cap * density0(out) <= density1(out, pair)) return;
  }
}

DiscreteDist AnisotropicDensityModel::discretize(std::size_t resolution) const {
  const std::size_t d = dim();
  if (resolution == 0) throw std::invalid_argument("resolution must be positive");
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= resolution;
  if (total > 1000000) throw std::invalid_argument("discretization too large");

  std::vector<Point> atoms;
  std::vector<double> weights;
  atoms.reserve(total);
  weights.reserve(total);
  double volume = 1.0;
  for (std::size_t j = 0; j < d; ++j) volume *= 8.0 * sigma_ / resolution;
  std::vector<std::size_t> idx(d, 0);
  double mass = 0.0;
  for (;;) {
    Point x(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = x0_[j] - 4.0 * sigma_ +
             8.0 * sigma_ * (static_cast<double>(idx[j]) + 0.5) / resolution;
    }
    const double w = density0(x) * volume;
    atoms.push_back(std::move(x));
    weights.push_back(w);
    mass += w;
    std::size_t j = 0;
    while (j < d && ++idx[j] == resolution) idx[j++] = 0;
    if (j == d) break;
  }
  for (double& w : weights) w /= mass;
  return DiscreteDist(std::move(atoms), std::move(weights));
}

std::unique_ptr<AnisotropicDensityModel> anisotropic_model(
    std::vector<double> beta, std::vector<double> holder_l,
    std::vector<double> x0) {
  return std::make_unique<AnisotropicDensityModel>(
      std::move(beta), std::move(holder_l), std::move(x0));
}

}  // namespace ldp
