#pragma once

// Test-only helpers: independent oracles and random problem generators.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "coupledfix/contractivity.hpp"
#include "coupledfix/operators.hpp"

namespace coupledfix::testing {

/// Gaussian elimination with partial pivoting on (I - A - B) x = c.
inline std::vector<double> solve_fixed_point_by_elimination(const Matrix& a, const Matrix& b, const Vector& c) {
  const std::size_t n = a.dim();
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = (i == j ? 1.0 : 0.0) - a(i, j) - b(i, j);
    m[i][n] = c[i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t k = col; k <= n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = m[i][n];
    for (std::size_t k = i + 1; k < n; ++k) s -= m[i][k] * x[k];
    x[i] = s / m[i][i];
  }
  return x;
}

/// sqrt of the dominant eigenvalue of M^T M by power iteration.
inline double spectral_norm_by_power_iteration(const Matrix& m, int iters = 5000) {
  const std::size_t n = m.dim();
  std::vector<double> v(n, 1.0), w(n), z(n);
  for (std::size_t i = 0; i < n; ++i) v[i] += 0.01 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[i] += m(i, j) * v[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i) z[j] += m(i, j) * w[i];
    }
    double nz = 0.0;
    for (double e : z) nz += e * e;
    nz = std::sqrt(nz);
    if (nz == 0.0) return 0.0;
    lambda = nz;
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / nz;
  }
  return std::sqrt(lambda);
}

inline Matrix random_matrix(SampleStream& s, std::size_t d) {
  std::vector<double> data(d * d);
  for (double& e : data) e = 2.0 * s.unit() - 1.0;
  return Matrix(d, std::move(data));
}

inline Matrix scaled_to_norm(const Matrix& m, double target) {
  const double cur = spectral_norm(m);
  std::vector<double> data = m.data();
  for (double& e : data) e *= target / cur;
  return Matrix(m.dim(), std::move(data));
}

struct RandomLinearProblem {
  BivariateOperator op;
  Vector fixed_point;
  Vector x0;
  Vector y0;
};

/// F(x,y) = A x + B y + c with |A| + |B| = total_norm, split at a random ratio,
/// on the cube [-10, 10]^d. c is small enough to keep the fixed point inside.
inline RandomLinearProblem random_linear_problem(std::uint64_t seed, std::size_t d, double total_norm) {
  SampleStream s(seed);
  const double split = 0.1 + 0.8 * s.unit();
  Matrix a = scaled_to_norm(random_matrix(s, d), split * total_norm);
  Matrix b = scaled_to_norm(random_matrix(s, d), (1.0 - split) * total_norm);
  std::vector<double> c(d);
  for (double& e : c) e = 0.1 * (s.unit() - 0.5) * (1.0 - total_norm);
  Box box = Box::cube(d, -10.0, 10.0);
  Vector shift(c);
  Vector p(solve_fixed_point_by_elimination(a, b, shift));
  Vector x0 = s.point(Box::cube(d, -5.0, 5.0));
  Vector y0 = s.point(Box::cube(d, -5.0, 5.0));
  return {make_linear_operator(a, b, shift, box), p, x0, y0};
}

}  // namespace coupledfix::testing
