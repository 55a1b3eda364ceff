#include "ldp/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ldp/channels.hpp"
#include "ldp/estimators.hpp"
#include "ldp/moduli.hpp"
#include "ldp/rng.hpp"

namespace ldp {

namespace {

void record(CheckResult& result, double violation, double tol) {
  ++result.trials;
  if (violation > tol) {
    ++result.failures;
    result.worst_violation = std::max(result.worst_violation, violation - tol);
  }
}

std::vector<double> random_weights(RandomStream& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (double& v : w) {
    v = -std::log(std::max(rng.next_uniform(), 0x1.0p-53));
    total += v;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    w[i] /= total;
    acc += w[i];
  }
  w[k - 1] = 1.0 - acc;  // exact unit sum
  return w;
}

DiscreteDist random_dist(RandomStream& rng, const std::vector<Point>& atoms) {
  return DiscreteDist(atoms, random_weights(rng, atoms.size()));
}

std::vector<Point> index_atoms(std::size_t k) {
  std::vector<Point> atoms;
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({static_cast<double>(i)});
  return atoms;
}

// Random channel shrunk toward its column-mean row until the audit passes.
DiscreteChannel random_private_channel(RandomStream& rng, std::size_t n_in,
                                       std::size_t n_out,
                                       const PrivacyLevel& level) {
  std::vector<std::vector<double>> rows(n_in);
  std::vector<double> mean(n_out, 0.0);
  for (auto& row : rows) {
    row = random_weights(rng, n_out);
    for (std::size_t z = 0; z < n_out; ++z) mean[z] += row[z] / n_in;
  }
  auto blend = [&](double lambda) {
    std::vector<std::vector<double>> mixed(n_in, std::vector<double>(n_out));
    for (std::size_t x = 0; x < n_in; ++x) {
      for (std::size_t z = 0; z < n_out; ++z) {
        mixed[x][z] = lambda * rows[x][z] + (1.0 - lambda) * mean[z];
      }
    }
    return DiscreteChannel(index_atoms(n_in), index_atoms(n_out),
                           std::move(mixed));
  };
  double lo = 0.0, hi = 1.0;
  if (audit_privacy(blend(1.0)) <= level.alpha) return blend(1.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (audit_privacy(blend(mid)) <= level.alpha ? lo : hi) = mid;
  }
  return blend(lo);
}

// Mixture-path family over a random base pair, pushed through a random
// binary channel with modest privacy budget.
struct MixtureSetup {
  FiniteFamily family;
  BinaryChannel channel;
  double base_tv;
  double base_theta_gap;
};

MixtureSetup random_mixture_setup(RandomStream& rng, std::size_t grid_points) {
  const std::size_t k = 4;
  const auto atoms = index_atoms(k);
  const DiscreteDist a = random_dist(rng, atoms);
  const DiscreteDist b = random_dist(rng, atoms);

  std::vector<double> ell_values(k);
  double sup = 0.0;
  for (double& v : ell_values) {
    v = 2.0 * rng.next_uniform() - 1.0;
    sup = std::max(sup, std::abs(v));
  }
  auto eval = [ell_values](std::span<const double> x) {
    return ell_values[static_cast<std::size_t>(x[0])];
  };
  const PrivacyLevel level(0.2 + 0.8 * rng.next_uniform());
  BinaryChannel channel(
      Representer(eval, std::max(sup, 1e-3), Domain::interval(0.0, k - 1.0)),
      level);

  const double theta_a = 1.0 + rng.next_uniform();
  const double theta_b = theta_a + 0.5 + rng.next_uniform();

  FiniteFamily family;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double lambda =
        static_cast<double>(i) / static_cast<double>(grid_points - 1);
    family.add(a.mix(b, lambda), lambda * theta_a + (1.0 - lambda) * theta_b);
  }
  return MixtureSetup{std::move(family), std::move(channel), tv_distance(a, b),
                      std::abs(theta_a - theta_b)};
}

FiniteFamily random_family(RandomStream& rng, std::size_t members) {
  const auto atoms = index_atoms(5);
  FiniteFamily family;
  for (std::size_t i = 0; i < members; ++i) {
    family.add(random_dist(rng, atoms), 2.0 * rng.next_uniform());
  }
  return family;
}

}  // namespace

CheckResult check_privacy_tightness() {
  CheckResult result{"privacy_tightness"};
  const double alphas[] = {0.1, 0.5, 1.0, std::log(3.0), 3.0};
  for (double alpha : alphas) {
    const PrivacyLevel level(alpha);
    auto eval = [](std::span<const double> x) { return x[0]; };
    const BinaryChannel channel(
        Representer(eval, 1.0, Domain::interval(-1.0, 1.0)), level);
    const double values[] = {-1.0, -0.25, 0.0, 0.5, 1.0};
    const double audited = audit_privacy(channel.restrict_to_values(values));
    record(result, std::abs(audited - alpha), 1e-12);
  }
  return result;
}

CheckResult check_tv_identity(std::uint64_t seed, int pairs) {
  CheckResult result{"tv_identity"};
  RandomStream rng = RandomStream::root(seed).derive(1);
  const auto atoms = index_atoms(6);
  for (int trial = 0; trial < pairs; ++trial) {
    std::vector<double> ell_values(atoms.size());
    double sup = 0.0;
    for (double& v : ell_values) {
      v = 2.0 * rng.next_uniform() - 1.0;
      sup = std::max(sup, std::abs(v));
    }
    auto eval = [ell_values](std::span<const double> x) {
      return ell_values[static_cast<std::size_t>(x[0])];
    };
    const PrivacyLevel level(0.1 + 2.9 * rng.next_uniform());
    const BinaryChannel channel(
        Representer(eval, std::max(sup, 1e-3), Domain::interval(0.0, 5.0)),
        level);
    const DiscreteDist p0 = random_dist(rng, atoms);
    const DiscreteDist p1 = random_dist(rng, atoms);
    const Representer& ell = channel.representer();
    const double lhs = tv_distance(channel.pushforward(p0), channel.pushforward(p1));
    const double rhs =
        std::abs(p0.expectation(ell) - p1.expectation(ell)) / (2.0 * channel.z0());
    record(result, std::abs(lhs - rhs), 1e-12);
  }
  return result;
}

CheckResult check_data_processing(std::uint64_t seed, int pairs) {
  CheckResult result{"data_processing"};
  RandomStream rng = RandomStream::root(seed).derive(2);
  for (int trial = 0; trial < pairs; ++trial) {
    const std::size_t n_in = 2 + rng.next_bits() % 3;
    const std::size_t n_out = 2 + rng.next_bits() % 3;
    const PrivacyLevel level(0.2 + 2.8 * rng.next_uniform());
    const DiscreteChannel q = random_private_channel(rng, n_in, n_out, level);
    const DiscreteDist p0 = random_dist(rng, q.inputs());
    const DiscreteDist p1 = random_dist(rng, q.inputs());
    const DiscreteDist q0 = pushforward(q, p0);
    const DiscreteDist q1 = pushforward(q, p1);
    const double affinity_violation =
        hellinger_affinity(p0, p1) - hellinger_affinity(q0, q1);
    const double distance_violation =
        hellinger_distance(q0, q1) - hellinger_distance(p0, p1);
    record(result, std::max(affinity_violation, distance_violation), 1e-12);
  }
  return result;
}

CheckResult check_distance_sandwich(std::uint64_t seed, int pairs) {
  CheckResult result{"distance_sandwich"};
  RandomStream rng = RandomStream::root(seed).derive(3);
  const auto atoms = index_atoms(6);
  for (int trial = 0; trial < pairs; ++trial) {
    const DiscreteDist p = random_dist(rng, atoms);
    const DiscreteDist q = random_dist(rng, atoms);
    const double tv = tv_distance(p, q);
    const double h = hellinger_distance(p, q);
    record(result, std::max(tv - h, h - std::sqrt(2.0 * tv)), 1e-12);
  }
  return result;
}

CheckResult check_contraction(std::uint64_t seed, int trials) {
  CheckResult result{"contraction"};
  RandomStream rng = RandomStream::root(seed).derive(4);
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_bits() % 3);
    const std::size_t n_in = 2 + rng.next_bits() % 3;
    const PrivacyLevel level(0.2 + 2.8 * rng.next_uniform());
    std::vector<DiscreteChannel> channels;
    for (int j = 0; j < n; ++j) {
      channels.push_back(
          random_private_channel(rng, n_in, 2 + rng.next_bits() % 3, level));
    }
    const DiscreteDist p0 = random_dist(rng, channels.front().inputs());
    const DiscreteDist p1 = random_dist(rng, channels.front().inputs());
    const ContractionResult outcome =
        contraction_check(channels, p0, p1, n, level);
    record(result, outcome.lhs - outcome.rhs, 1e-12);
  }
  return result;
}

CheckResult check_modulus_monotonicity(std::uint64_t seed, int families) {
  CheckResult result{"modulus_monotonicity"};
  RandomStream rng = RandomStream::root(seed).derive(5);
  for (int trial = 0; trial < families; ++trial) {
    const FiniteFamily family = random_family(rng, 6);
    for (Metric metric : {Metric::tv, Metric::hellinger}) {
      double previous = 0.0;
      for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.5}) {
        const double value = brute_force_modulus(family, eps, metric).value();
        record(result, previous - value, 1e-15);
        previous = value;
      }
    }
  }
  return result;
}

CheckResult check_modulus_sandwich(std::uint64_t seed, int families) {
  CheckResult result{"modulus_sandwich"};
  RandomStream rng = RandomStream::root(seed).derive(6);
  for (int trial = 0; trial < families; ++trial) {
    const FiniteFamily family = random_family(rng, 6);
    for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const double w_tv = brute_force_modulus(family, eps, Metric::tv).value();
      const double w_h =
          brute_force_modulus(family, eps, Metric::hellinger).value();
      const double w_h_wide =
          brute_force_modulus(family, std::sqrt(2.0 * eps), Metric::hellinger)
              .value();
      record(result, std::max(w_h - w_tv, w_tv - w_h_wide), 1e-12);
    }
  }
  return result;
}

CheckResult check_homogeneity(std::uint64_t seed, int families) {
  CheckResult result{"homogeneity"};
  RandomStream rng = RandomStream::root(seed).derive(7);
  for (int trial = 0; trial < families; ++trial) {
    const MixtureSetup setup = random_mixture_setup(rng, 37);
    std::vector<DiscreteDist> pushed;
    for (const auto& dist : setup.family.dists) {
      pushed.push_back(setup.channel.pushforward(dist));
    }
    // Probe scales taken from attained pushforward distances.
    for (std::size_t j : {2u, 4u, 8u, 12u}) {
      const double eps = hellinger_distance(pushed.front(), pushed[j]);
      for (int k : {2, 3}) {
        const auto narrow = privatized_modulus(setup.family, setup.channel, eps);
        const auto wide =
            privatized_modulus(setup.family, setup.channel, k * eps);
        if (!narrow || !wide) continue;
        record(result, *wide - k * k * *narrow, 1e-6);
      }
    }
  }
  return result;
}

CheckResult check_linear_lower_bound(std::uint64_t seed, int families) {
  CheckResult result{"linear_lower_bound"};
  RandomStream rng = RandomStream::root(seed).derive(8);
  for (int trial = 0; trial < families; ++trial) {
    const MixtureSetup setup = random_mixture_setup(rng, 21);
    const double c0 = setup.base_theta_gap / setup.base_tv;
    for (std::size_t j : {1u, 2u, 5u, 10u, 20u}) {
      // Probe at attained distances so the defining pair is feasible even
      // under floating-point rounding.
      const double eps =
          tv_distance(setup.family.dists[j], setup.family.dists[0]);
      const double omega =
          brute_force_modulus(setup.family, eps, Metric::tv).value();
      record(result, c0 - omega / eps, 1e-9 * c0);
    }
  }
  return result;
}

CheckResult check_privatized_modulus_bound(std::uint64_t seed, int families) {
  CheckResult result{"privatized_modulus_bound"};
  RandomStream rng = RandomStream::root(seed).derive(9);
  for (int trial = 0; trial < families; ++trial) {
    const MixtureSetup setup = random_mixture_setup(rng, 21);
    const double scale = std::exp(0.5 * setup.channel.level().alpha);
    for (double eps : {0.01, 0.05, 0.1, 0.3, 0.7}) {
      const auto tv_side =
          brute_force_modulus(setup.family, eps / scale, Metric::tv);
      const auto h_side = privatized_modulus(setup.family, setup.channel, eps);
      if (!tv_side) continue;
      record(result, *tv_side - (h_side ? *h_side : 0.0), 1e-12);
    }
  }
  return result;
}

CheckResult check_g_properties(std::uint64_t seed, int trials) {
  CheckResult result{"g_properties"};
  RandomStream rng = RandomStream::root(seed).derive(10);
  for (int trial = 0; trial < trials; ++trial) {
    double s = 0.01 + 0.98 * rng.next_uniform();
    double t = 0.01 + 0.98 * rng.next_uniform();
    if (s > t) std::swap(s, t);
    if (t - s < 1e-6) t = std::min(0.999, t + 1e-3);
    const double g = critical_value_G(s, t);
    double violation = std::max(s - g, g - t);
    violation = std::max(violation,
                         std::abs(critical_value_G(t, s) - g));  // symmetry
    // Strict monotonicity probed on a small displacement grid.
    const double ds = 0.5 * std::min(t - s, std::min(s, 1.0 - t));
    violation = std::max(violation, critical_value_G(s, t - ds) - g);
    violation = std::max(violation, g - critical_value_G(s + ds, t));
    record(result, violation, 1e-12);
  }
  return result;
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
  return {
      check_privacy_tightness(),
      check_tv_identity(seed, 200),
      check_data_processing(seed, 200),
      check_distance_sandwich(seed, 200),
      check_contraction(seed, 200),
      check_modulus_monotonicity(seed, 50),
      check_modulus_sandwich(seed, 50),
      check_homogeneity(seed, 40),
      check_linear_lower_bound(seed, 40),
      check_privatized_modulus_bound(seed, 40),
      check_g_properties(seed, 1000),
  };
}

}  // namespace ldp
