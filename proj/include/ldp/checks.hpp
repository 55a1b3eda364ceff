#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ldp {

// Outcome of one numerical property check over randomized instances.
struct CheckResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst_violation = 0.0;  // max positive excess over the tolerance

  bool pass() const { return failures == 0; }
};

// The channel audited over a grid of attained representer values reproduces
// alpha exactly for alpha in {0.1, 0.5, 1, ln 3, 3}.
CheckResult check_privacy_tightness();

// TV distance of binary-channel pushforwards equals |E0[ell] - E1[ell]|/(2 z0).
CheckResult check_tv_identity(std::uint64_t seed, int pairs);

// Hellinger affinity grows and Hellinger distance shrinks under any channel.
CheckResult check_data_processing(std::uint64_t seed, int pairs);

// d_TV <= d_H <= sqrt(2 d_TV) on random discrete pairs.
CheckResult check_distance_sandwich(std::uint64_t seed, int pairs);

// Exhaustive product-measure TV contraction bound for random private
// channels, n in {1, 2, 3}.
CheckResult check_contraction(std::uint64_t seed, int trials);

// Brute-force moduli are non-decreasing in eps.
CheckResult check_modulus_monotonicity(std::uint64_t seed, int families);

// omega_H(eps) <= omega_TV(eps) <= omega_H(sqrt(2 eps)) on random families.
CheckResult check_modulus_sandwich(std::uint64_t seed, int families);

// Second-degree homogeneity of the privatized Hellinger modulus on convex
// (mixture-grid) families, k in {2, 3}, with grid slack 1e-6.
CheckResult check_homogeneity(std::uint64_t seed, int families);

// omega_TV(eps)/eps stays above the mixture-path constant on convex families
// with non-constant linear functionals.
CheckResult check_linear_lower_bound(std::uint64_t seed, int families);

// omega_TV(eps e^{-alpha/2}) <= privatized omega_H(eps).
CheckResult check_privatized_modulus_bound(std::uint64_t seed, int families);

// G is symmetric, strictly increasing in each argument, with s < G < t.
CheckResult check_g_properties(std::uint64_t seed, int trials);

std::vector<CheckResult> run_all_checks(std::uint64_t seed);

}  // namespace ldp
