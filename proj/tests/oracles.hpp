#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical routines.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Truncated Taylor series sum_k A^k / k! with a fixed, generous order.
inline Matrix taylor_exp(const Matrix& a, int order = 80) {
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= order; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Random matrix with i.i.d. standard complex Gaussian entries.
inline Matrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, int n) {
  const Matrix m = random_matrix(rng, n);
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_anti_hermitian(std::mt19937_64& rng, int n) {
  const Matrix m = random_matrix(rng, n);
  return 0.5 * (m - m.adjoint());
}

inline Matrix random_density(std::mt19937_64& rng, int n) {
  const Matrix m = random_matrix(rng, n);
  Matrix rho = m * m.adjoint();
  return rho / rho.trace();
}

/// Eigenvalues of a 2x2 Hermitian matrix from its characteristic polynomial,
/// ascending.
inline std::vector<double> charpoly_eigenvalues_2(const Matrix& h) {
  const double a = h(0, 0).real(), d = h(1, 1).real();
  const double off = std::norm(h(0, 1));
  const double mean = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off);
  return {mean - rad, mean + rad};
}

/// Eigenvalues of a 3x3 Hermitian matrix via the trigonometric solution of
/// its characteristic cubic, ascending.
inline std::vector<double> charpoly_eigenvalues_3(const Matrix& h) {
  const double tr = h.trace().real();
  // Coefficients of lambda^3 - c2 lambda^2 + c1 lambda - c0.
  const double c2 = tr;
  double c1 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) c1 += (h(i, i) * h(j, j) - h(i, j) * h(j, i)).real();
  const double c0 = h.determinant().real();
  // Depressed cubic x^3 + p x + q with lambda = x + c2/3.
  const double p = c1 - c2 * c2 / 3.0;
  const double q = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
  std::vector<double> out;
  if (std::abs(p) < 1e-300) {
    const double x = std::cbrt(-q);
    out = {x + c2 / 3.0, x + c2 / 3.0, x + c2 / 3.0};
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) out.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + c2 / 3.0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Dark state of cosh(r) S + e^{i phi} sinh(r) S^+ for S = |1><0| + |0><-1|
/// in the ordering {|1>, |0>, |-1>}: solving the middle row of R v = 0 by
/// hand gives v proportional to cosh r |1> - e^{i phi} sinh r |-1>.
inline Vector xi_dark_state(double r, double phi) {
  const double norm = std::sqrt(std::cosh(2.0 * r));
  Vector v = Vector::Zero(3);
  v(0) = std::cosh(r) / norm;
  v(2) = -std::exp(Complex(0.0, phi)) * std::sinh(r) / norm;
  return v;
}

/// A unit vector orthogonal to xi_dark_state in span{|1>, |-1>}.
inline Vector xi_bright_state(double r, double phi) {
  const double norm = std::sqrt(std::cosh(2.0 * r));
  Vector v = Vector::Zero(3);
  v(0) = std::sinh(r) / norm;
  v(2) = std::exp(Complex(0.0, phi)) * std::cosh(r) / norm;
  return v;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace oracle
