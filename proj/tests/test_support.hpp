#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ldp/channels.hpp"

namespace ldp::testing {

// Independent composite-Simpson oracle (kept separate from the library's
// quadrature so kernel and density checks do not share a code path with the
// implementation they verify).
template <typename Fn>
double simpson(Fn f, double a, double b, int nodes = 10000) {
  if (nodes % 2 != 0) ++nodes;
  const double h = (b - a) / nodes;
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < nodes; i += 2) odd += f(a + i * h);
  for (int i = 2; i < nodes; i += 2) even += f(a + i * h);
  return (f(a) + f(b) + 4.0 * odd + 2.0 * even) * h / 3.0;
}

inline DiscreteDist bernoulli(double p) {
  return DiscreteDist::from_scalars({0.0, 1.0}, {1.0 - p, p});
}

inline Representer constant_slope(double sup, double lo, double hi) {
  return Representer([](std::span<const double> x) { return x[0]; }, sup,
                     Domain::interval(lo, hi));
}

}  // namespace ldp::testing
