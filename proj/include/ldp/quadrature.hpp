#pragma once

#include <cstddef>

namespace ldp {

// Composite Simpson rule on [a, b] with n subintervals (n rounded up to even).
template <typename Fn>
double integrate(Fn f, double a, double b, std::size_t n = 4096) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = a + h * static_cast<double>(i);
    acc += f(x) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  return acc * h / 3.0;
}

}  // namespace ldp
