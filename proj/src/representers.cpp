#include "ldp/representers.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ldp/quadrature.hpp"

namespace ldp {

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::truncated_moment: return "truncated_moment";
    case FamilyKind::derivative_kernel: return "derivative_kernel";
    case FamilyKind::product_kernel: return "product_kernel";
    case FamilyKind::uniform_endpoint: return "uniform_endpoint";
  }
  return "unknown";
}

double ConditionC::r_bar() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) acc += s[j] / t[j];
  return acc;
}

double ConditionC::sup_bound(std::span<const double> h) const {
  double acc = d0;
  for (std::size_t j = 0; j < k; ++j) acc *= std::pow(h[j], -s[j]);
  return acc;
}

double ConditionC::bias_bound(std::span<const double> h) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) acc += std::pow(h[j], t[j]);
  return d0 * acc / static_cast<double>(k);
}

PolyKernel::PolyKernel(Polynomial poly, int order, int smoothness)
    : poly_(std::move(poly)), order_(order), smoothness_(smoothness) {}

Polynomial PolyKernel::derivative(int j) const {
  Polynomial d = poly_;
  for (int i = 0; i < j; ++i) d = d.derivative();
  return d;
}

double PolyKernel::moment(int j) const {
  return (Polynomial::monomial(static_cast<std::size_t>(j)) * poly_)
      .integrate_unit();
}

PolyKernel build_kernel(int order, int smoothness) {
  if (order < 0 || smoothness < 0) {
    throw std::invalid_argument("kernel order and smoothness must be non-negative");
  }
  const Polynomial boundary = one_minus_x2_pow(static_cast<std::size_t>(smoothness) + 1);
  const std::size_t n = static_cast<std::size_t>(order) + 1;

  // Moment system for q(u) = sum c_i u^i: integral of u^j q(u) boundary(u)
  // equals (-1)^m for j = 0 and 0 for j = 1..order. Entries are exact
  // polynomial integrals, so the construction is independent of quadrature.
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      a[j][i] = (Polynomial::monomial(i + j) * boundary).integrate_unit();
    }
  }
  b[0] = smoothness % 2 == 0 ? 1.0 : -1.0;
  std::vector<double> coeffs = solve_linear_system(std::move(a), std::move(b));
  return PolyKernel(Polynomial(std::move(coeffs)) * boundary, order, smoothness);
}

RepresenterFamily::RepresenterFamily(FamilyKind kind, ConditionC condition,
                                     Factory factory)
    : kind_(kind), cond_(std::move(condition)), factory_(std::move(factory)) {
  if (cond_.s.size() != cond_.k || cond_.t.size() != cond_.k) {
    throw std::invalid_argument("condition metadata dimension mismatch");
  }
  for (std::size_t j = 0; j < cond_.k; ++j) {
    if (!(cond_.t[j] > 0.0) || cond_.s[j] < 0.0) {
      throw std::invalid_argument("condition exponents require t > 0, s >= 0");
    }
  }
  if (!(cond_.d0 > 0.0) || !(cond_.h0 > 0.0 && cond_.h0 <= 1.0)) {
    throw std::invalid_argument("condition constants require d0 > 0, h0 in (0, 1]");
  }
}

Representer RepresenterFamily::at(std::span<const double> h) const {
  if (h.size() != cond_.k) {
    throw std::invalid_argument("bandwidth dimension mismatch");
  }
  for (double v : h) {
    if (!(v > 0.0)) throw std::invalid_argument("bandwidths must be positive");
  }
  return factory_(h);
}

RepresenterFamily truncated_moment_family(std::function<double(double)> f,
                                          double kappa, double moment_bound) {
  if (!(kappa > 1.0)) {
    throw std::invalid_argument("truncation exponent kappa must exceed 1");
  }
  ConditionC cond;
  cond.k = 1;
  cond.s = {1.0};
  cond.t = {kappa - 1.0};
  cond.d0 = std::max(moment_bound, 1.0);
  cond.h0 = 1.0;
  auto factory = [f = std::move(f)](std::span<const double> h) {
    const double level = 1.0 / h[0];
    auto eval = [f, level](std::span<const double> x) {
      const double v = f(x[0]);
      return std::abs(v) <= level ? v : 0.0;
    };
    return Representer(eval, level, Domain::real_line());
  };
  return RepresenterFamily(FamilyKind::truncated_moment, std::move(cond),
                           std::move(factory));
}

Representer truncated_moment(std::function<double(double)> f, double kappa,
                             double h, double moment_bound) {
  return truncated_moment_family(std::move(f), kappa, moment_bound).at(h);
}

RepresenterFamily derivative_kernel_family(int m, double beta, double holder_l,
                                           double x0) {
  if (m < 0 || !(beta > static_cast<double>(m))) {
    throw std::invalid_argument("derivative order m must satisfy 0 <= m < beta");
  }
  if (!(holder_l > 0.0)) {
    throw std::invalid_argument("Hoelder constant must be positive");
  }
  const int b = static_cast<int>(std::floor(beta));
  const PolyKernel kernel = build_kernel(std::max(b - m, 0), m);
  const Polynomial deriv = kernel.derivative(m);
  const double deriv_sup = deriv.max_abs(-1.0, 1.0);
  const double c1 = integrate(
      [&](double u) {
        return std::pow(std::abs(u), beta - m) * std::abs(kernel(u));
      },
      -1.0, 1.0, 10000);
  double fact = 1.0;
  for (int i = 2; i <= b - m; ++i) fact *= static_cast<double>(i);

  ConditionC cond;
  cond.k = 1;
  cond.s = {static_cast<double>(m) + 1.0};
  cond.t = {beta - m};
  cond.d0 = std::max(deriv_sup, c1 * holder_l / fact);
  cond.h0 = 1.0;
  auto factory = [deriv, deriv_sup, m, x0](std::span<const double> hs) {
    const double h = hs[0];
    const double scale = std::pow(h, -(m + 1.0));
    auto eval = [deriv, h, x0, scale](std::span<const double> x) {
      const double u = (x[0] - x0) / h;
      return u < -1.0 || u > 1.0 ? 0.0 : scale * deriv(u);
    };
    return Representer(eval, deriv_sup * scale, Domain::real_line());
  };
  return RepresenterFamily(FamilyKind::derivative_kernel, std::move(cond),
                           std::move(factory));
}

Representer derivative_kernel(int m, double beta, double holder_l, double x0,
                              double h) {
  return derivative_kernel_family(m, beta, holder_l, x0).at(h);
}

RepresenterFamily product_kernel_family(std::vector<double> beta,
                                        std::vector<double> holder_l,
                                        std::vector<double> x0) {
  const std::size_t d = beta.size();
  if (d == 0 || holder_l.size() != d || x0.size() != d) {
    throw std::invalid_argument("product kernel dimension mismatch");
  }
  for (double b : beta) {
    if (!(b > 0.0 && b <= 1.0)) {
      throw std::invalid_argument("product kernel requires beta_j in (0, 1]");
    }
  }
  const PolyKernel kernel = build_kernel(0, 0);
  const double ksup = kernel.sup_norm();
  double d0 = std::pow(ksup, static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const double cbar = integrate(
        [&](double u) {
          return std::abs(kernel(u)) * std::pow(std::abs(u), beta[j]);
        },
        -1.0, 1.0, 10000);
    d0 = std::max(d0, static_cast<double>(d) * holder_l[j] * cbar);
  }

  ConditionC cond;
  cond.k = d;
  cond.s.assign(d, 1.0);
  cond.t = beta;
  cond.d0 = d0;
  cond.h0 = 1.0;
  auto factory = [kernel, ksup, x0, d](std::span<const double> h) {
    std::vector<double> hv(h.begin(), h.end());
    double sup = 1.0;
    for (double hj : hv) sup *= ksup / hj;
    auto eval = [kernel, x0, hv, d](std::span<const double> x) {
      if (x.size() != d) {
        throw std::domain_error("point dimension mismatch");
      }
      double acc = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        acc *= kernel((x[j] - x0[j]) / hv[j]) / hv[j];
      }
      return acc;
    };
    return Representer(eval, sup, Domain::real_space(d));
  };
  return RepresenterFamily(FamilyKind::product_kernel, std::move(cond),
                           std::move(factory));
}

Representer product_kernel(std::vector<double> beta, std::vector<double> holder_l,
                           std::vector<double> x0, std::vector<double> h) {
  return product_kernel_family(std::move(beta), std::move(holder_l), std::move(x0))
      .at(std::span<const double>(h));
}

RepresenterFamily uniform_endpoint_family(double m_bound) {
  if (!(m_bound > 0.0)) {
    throw std::invalid_argument("range bound M must be positive");
  }
  ConditionC cond;
  cond.k = 1;
  cond.s = {0.0};
  cond.t = {1.0};
  cond.d0 = 2.0 * m_bound;
  cond.h0 = 1.0;
  auto factory = [m_bound](std::span<const double>) {
    auto eval = [](std::span<const double> x) { return 2.0 * x[0]; };
    return Representer(eval, 2.0 * m_bound, Domain::interval(0.0, m_bound));
  };
  return RepresenterFamily(FamilyKind::uniform_endpoint, std::move(cond),
                           std::move(factory));
}

Representer uniform_endpoint_representer(double m_bound) {
  return uniform_endpoint_family(m_bound).at(1.0);
}

BandwidthSelection select_bandwidth(const RepresenterFamily& family, long n,
                                    const PrivacyLevel& level) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  const ConditionC& cond = family.condition();
  const double base = level.amplification / std::sqrt(static_cast<double>(n));
  const double r_bar = cond.r_bar();
  BandwidthSelection out;
  out.h.resize(cond.k);
  for (std::size_t j = 0; j < cond.k; ++j) {
    double h = std::pow(base, 1.0 / (cond.t[j] * (1.0 + r_bar)));
    if (h > cond.h0) {
      h = cond.h0;
      out.clamped = true;
    }
    out.h[j] = h;
  }
  return out;
}

ConditionCReport verify_condition_c(const RepresenterFamily& family,
                                    const std::vector<DiscreteDist>& dists,
                                    const std::vector<double>& thetas,
                                    const std::vector<std::vector<double>>& h_grid) {
  if (dists.size() != thetas.size()) {
    throw std::invalid_argument("distribution/theta count mismatch");
  }
  ConditionCReport report;
  for (const auto& h : h_grid) {
    const Representer ell = family.at(std::span<const double>(h));
    ConditionCRow row;
    row.h = h;
    row.sup_norm = ell.sup_norm();
    row.sup_bound = family.condition().sup_bound(std::span<const double>(h));
    row.bias = 0.0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
      row.bias = std::max(row.bias,
                          std::abs(dists[i].expectation(ell) - thetas[i]));
    }
    row.bias_bound = family.condition().bias_bound(std::span<const double>(h));
    report.worst_sup_ratio =
        std::max(report.worst_sup_ratio, row.sup_norm / row.sup_bound);
    if (row.bias_bound > 0.0) {
      report.worst_bias_ratio =
          std::max(report.worst_bias_ratio, row.bias / row.bias_bound);
    }
    report.sup_ok = report.sup_ok && row.sup_norm <= row.sup_bound * (1.0 + 1e-9);
    report.bias_ok = report.bias_ok && row.bias <= row.bias_bound * (1.0 + 1e-9);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ldp
