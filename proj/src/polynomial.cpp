#include "ldp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldp {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

Polynomial Polynomial::monomial(std::size_t degree, double coeff) {
  std::vector<double> c(degree + 1, 0.0);
  c[degree] = coeff;
  return Polynomial(std::move(c));
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    acc = acc * x + coeffs_[i];
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() == 1) return Polynomial();
  std::vector<double> c(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    c[i - 1] = coeffs_[i] * static_cast<double>(i);
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> c(coeffs_.size() + 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    c[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
  }
  return Polynomial(std::move(c));
}

double Polynomial::integrate_unit() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); i += 2) {
    acc += 2.0 * coeffs_[i] / static_cast<double>(i + 1);
  }
  return acc;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  std::vector<double> c(coeffs_.size() + other.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) {
      c[i + j] += coeffs_[i] * other.coeffs_[j];
    }
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<double> c(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) c[i] += other.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + other * -1.0;
}

Polynomial Polynomial::operator*(double scale) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= scale;
  return Polynomial(std::move(c));
}

double Polynomial::max_abs(double a, double b) const {
  constexpr int kScan = 20000;
  double best = 0.0;
  double best_x = a;
  for (int i = 0; i <= kScan; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / kScan;
    const double v = std::abs((*this)(x));
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  // Golden-section refinement around the best scan cell.
  const double step = (b - a) / kScan;
  double lo = std::max(a, best_x - step);
  double hi = std::min(b, best_x + step);
  constexpr double kPhi = 0.6180339887498949;
  for (int it = 0; it < 200; ++it) {
    const double x1 = hi - kPhi * (hi - lo);
    const double x2 = lo + kPhi * (hi - lo);
    if (std::abs((*this)(x1)) < std::abs((*this)(x2))) {
      lo = x1;
    } else {
      hi = x2;
    }
  }
  return std::max(best, std::abs((*this)(0.5 * (lo + hi))));
}

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial one_minus_x2_pow(std::size_t power) {
  Polynomial acc({1.0});
  const Polynomial base({1.0, 0.0, -1.0});
  for (std::size_t i = 0; i < power; ++i) acc = acc * base;
  return acc;
}

std::vector<double> solve_linear_system(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-14) {
      throw std::runtime_error("singular linear system");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double acc = b[row];
    for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
    x[row] = acc / a[row][row];
  }
  return x;
}

}  // namespace ldp
