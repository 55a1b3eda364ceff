#pragma once

#include <cstddef>
#include <vector>

namespace ldp {

// Dense univariate polynomial, coefficients in increasing degree order.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial monomial(std::size_t degree, double coeff = 1.0);

  double operator()(double x) const;
  std::size_t degree() const { return coeffs_.size() - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  Polynomial derivative() const;
  Polynomial antiderivative() const;  // constant term 0

  // Exact integral over [-1, 1].
  double integrate_unit() const;

  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(double scale) const;

  // Max of |p| over [a, b] via dense scan with local refinement.
  double max_abs(double a, double b) const;

 private:
  void trim();
  std::vector<double> coeffs_;
};

// (1 - x^2)^power expanded into coefficients.
Polynomial one_minus_x2_pow(std::size_t power);

// Solve a small dense linear system in place (partial pivoting).
// Throws std::runtime_error on a singular matrix.
std::vector<double> solve_linear_system(std::vector<std::vector<double>> a,
                                        std::vector<double> b);

}  // namespace ldp
