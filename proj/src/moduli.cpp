#include "ldp/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldp {

std::string to_string(ProblemTag tag) {
  switch (tag) {
    case ProblemTag::moment_bounded: return "moment_bounded";
    case ProblemTag::moment_heavy: return "moment_heavy";
    case ProblemTag::density_derivative: return "density_derivative";
    case ProblemTag::density_anisotropic: return "density_anisotropic";
    case ProblemTag::uniform_endpoint: return "uniform_endpoint";
  }
  return "unknown";
}

ProblemTag problem_tag_from_string(const std::string& name) {
  if (name == "moment_bounded") return ProblemTag::moment_bounded;
  if (name == "moment_heavy") return ProblemTag::moment_heavy;
  if (name == "density_derivative") return ProblemTag::density_derivative;
  if (name == "density_anisotropic") return ProblemTag::density_anisotropic;
  if (name == "uniform_endpoint") return ProblemTag::uniform_endpoint;
  throw std::invalid_argument("unknown problem tag: " + name);
}

double ModulusCurve::operator()(double eps) const {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be non-negative");
  return eps == 0.0 ? 0.0 : scale * std::pow(eps, exponent);
}

ModulusCurve analytic_modulus_curve(ProblemTag tag, Metric metric,
                                    const CurveParams& params) {
  double exponent;
  switch (tag) {
    case ProblemTag::moment_bounded:
      exponent = 1.0;
      break;
    case ProblemTag::moment_heavy: {
      if (!(params.kappa > 1.0)) {
        throw std::invalid_argument("moment curve requires kappa > 1");
      }
      const double tv_exp = (params.kappa - 1.0) / params.kappa;
      exponent = metric == Metric::tv ? tv_exp : std::min(2.0 * tv_exp, 1.0);
      break;
    }
    case ProblemTag::density_derivative: {
      if (!(params.beta > params.m) || params.m < 0) {
        throw std::invalid_argument("density curve requires 0 <= m < beta");
      }
      const double num = params.beta - params.m;
      exponent = metric == Metric::tv ? num / (params.beta + 1.0)
                                      : num / (params.beta + 0.5);
      break;
    }
    case ProblemTag::density_anisotropic: {
      if (!(params.r_bar > 0.0)) {
        throw std::invalid_argument("anisotropic curve requires r_bar > 0");
      }
      exponent = metric == Metric::tv ? 1.0 / (1.0 + params.r_bar)
                                      : 1.0 / (1.0 + 0.5 * params.r_bar);
      break;
    }
    case ProblemTag::uniform_endpoint:
      exponent = metric == Metric::tv ? 1.0 : 2.0;
      break;
    default:
      throw std::invalid_argument("unknown problem tag");
  }
  return ModulusCurve{tag, metric, exponent, params.scale};
}

double analytic_modulus(const ModulusCurve& curve, double eps) {
  return curve(eps);
}

Bracket uniform_endpoint_hellinger_bracket(double eps, double m_bound) {
  if (!(eps >= 0.0 && eps < 1.0) || !(m_bound > 0.0)) {
    throw std::invalid_argument("bracket requires eps in [0, 1) and M > 0");
  }
  return Bracket{eps * eps * (1.0 - 0.25 * eps * eps), m_bound * eps * eps};
}

void FiniteFamily::add(DiscreteDist dist, double theta) {
  dists.push_back(std::move(dist));
  thetas.push_back(theta);
}

std::vector<double> FiniteFamily::lambda_grid(std::size_t count) {
  if (count < 2) throw std::invalid_argument("lambda grid needs >= 2 points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

FiniteFamily FiniteFamily::convexify(const std::vector<double>& lambdas) const {
  FiniteFamily out = *this;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      for (double lambda : lambdas) {
        if (lambda <= 0.0 || lambda >= 1.0) continue;
        out.add(dists[i].mix(dists[j], lambda),
                lambda * thetas[i] + (1.0 - lambda) * thetas[j]);
      }
    }
  }
  return out;
}

namespace {

template <typename DistanceFn>
std::optional<double> pairwise_sup(const FiniteFamily& family, double eps,
                                   DistanceFn distance) {
  if (family.size() == 0 || eps < 0.0) return std::nullopt;
  bool feasible = false;
  double best = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      const double d = i == j ? 0.0 : distance(family.dists[i], family.dists[j]);
      if (d <= eps) {
        feasible = true;
        best = std::max(best, std::abs(family.thetas[i] - family.thetas[j]));
      }
    }
  }
  if (!feasible) return std::nullopt;
  return best;
}

}  // namespace

std::optional<double> brute_force_modulus(const FiniteFamily& family, double eps,
                                          Metric metric) {
  if (metric == Metric::tv) {
    return pairwise_sup(family, eps, [](const DiscreteDist& a, const DiscreteDist& b) {
      return tv_distance(a, b);
    });
  }
  return pairwise_sup(family, eps, [](const DiscreteDist& a, const DiscreteDist& b) {
    return hellinger_distance(a, b);
  });
}

std::optional<double> privatized_modulus(const FiniteFamily& family,
                                         const BinaryChannel& channel,
                                         double eps) {
  if (family.size() == 0 || eps < 0.0) return std::nullopt;
  std::vector<DiscreteDist> pushed;
  pushed.reserve(family.size());
  for (const auto& dist : family.dists) {
    pushed.push_back(channel.pushforward(dist));
  }
  bool feasible = false;
  double best = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      const double d = i == j ? 0.0 : hellinger_distance(pushed[i], pushed[j]);
      if (d <= eps) {
        feasible = true;
        best = std::max(best, std::abs(family.thetas[i] - family.thetas[j]));
      }
    }
  }
  if (!feasible) return std::nullopt;
  return best;
}

double lower_bound_curve(long n, const PrivacyLevel& level, double eta,
                         const LossFn& loss, const ModulusCurve& curve_tv,
                         const ModulusCurve& curve_h, double c) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const double contrast = level.exp_alpha - 1.0;
  const double tv_arg =
      (1.0 - eta) / std::sqrt(2.0 * static_cast<double>(n) * contrast * contrast);
  const double h_arg = c * std::sqrt(std::abs(std::log(eta)) / static_cast<double>(n));
  const double radius = std::max(curve_tv(tv_arg), curve_h(h_arg));
  return 0.5 * eta * loss(0.5 * radius);
}

ContractionResult contraction_check(const std::vector<DiscreteChannel>& channels,
                                    const DiscreteDist& p0, const DiscreteDist& p1,
                                    int n, const PrivacyLevel& level) {
  if (n < 1 || static_cast<std::size_t>(n) != channels.size()) {
    throw std::invalid_argument("one marginal channel per coordinate required");
  }
  std::size_t outcomes = 1;
  for (const auto& q : channels) {
    if (!audit_passes(q, level)) {
      throw std::invalid_argument("marginal channel fails the privacy audit");
    }
    outcomes *= q.n_outputs();
    if (outcomes > 1000000) {
      throw std::invalid_argument("output enumeration too large");
    }
  }

  // Marginal output laws; the privatized product measure factorizes.
  std::vector<DiscreteDist> out0, out1;
  for (const auto& q : channels) {
    out0.push_back(pushforward(q, p0));
    out1.push_back(pushforward(q, p1));
  }
  double lhs = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    double w0 = 1.0, w1 = 1.0;
    for (int j = 0; j < n; ++j) {
      w0 *= out0[static_cast<std::size_t>(j)].weight(idx[static_cast<std::size_t>(j)]);
      w1 *= out1[static_cast<std::size_t>(j)].weight(idx[static_cast<std::size_t>(j)]);
    }
    lhs += std::abs(w0 - w1);
    std::size_t j = 0;
    while (j < static_cast<std::size_t>(n) &&
           ++idx[j] == channels[j].n_outputs()) {
      idx[j++] = 0;
    }
    if (j == static_cast<std::size_t>(n)) break;
  }
  lhs *= 0.5;

  const double contrast = level.exp_alpha - 1.0;
  const double rhs = std::sqrt(2.0 * n * contrast * contrast) * tv_distance(p0, p1);
  return ContractionResult{lhs, rhs, lhs <= rhs + 1e-12};
}

}  // namespace ldp
