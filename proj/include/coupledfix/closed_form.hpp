#pragma once

// Analytic iterate formulas for the built-in scalar examples. The parameter
// lambda is always the weight on the operator image, the same quantity as
// SchemeConfig::theta, so oracle and engine are compared at equal values.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coupledfix {

enum class OracleKind {
  // Double Picard iteration for F(x,y) = (x-2y)/3.
  picard_example_2_1,
  // Diagonal Krasnoselskij iteration for F(x,y) = -(x+y)/2: x_n = (1-2l)^n x_0.
  krasnoselskij_example_4_1,
  // The printed double-Krasnoselskij formula
  //   x_n = [(1-l)^n (x0-y0) + (1-2l)^n (x0+y0)] / 2,
  //   y_n = [(1-l)^n (y0-x0) + (1-2l)^n (x0+y0)] / 2.
  // It is the exact solution of the recursion for F(x,y) = -(x+y)/2; for
  // F(x,y) = (x-2y)/3 the difference x_n - y_n is invariant instead.
  double_krasnoselskij_example_2_1,
};

inline std::string_view to_string(OracleKind k) {
  switch (k) {
    case OracleKind::picard_example_2_1: return "picard_example_2_1";
    case OracleKind::krasnoselskij_example_4_1: return "krasnoselskij_example_4_1";
    case OracleKind::double_krasnoselskij_example_2_1: return "double_krasnoselskij_example_2_1";
  }
  throw std::invalid_argument("unknown oracle kind");
}

struct ScalarPair {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ScalarPair&, const ScalarPair&) = default;
};

struct OracleHandle {
  OracleKind kind;
  double x0 = 0.0;
  double y0 = 0.0;  // ignored by krasnoselskij_example_4_1 (diagonal)
  double lambda = 0.5;  // ignored by picard_example_2_1
};

namespace detail {

// Repeated multiplication keeps the rounding path close to the engine's.
inline double ipow(double base, long n) {
  double r = 1.0;
  for (long i = 0; i < n; ++i) r *= base;
  return r;
}

inline void require_open_lambda(const OracleHandle& h) {
  if (!(h.lambda > 0.0 && h.lambda < 1.0)) {
    throw std::out_of_range("oracle lambda must lie in (0, 1)");
  }
}

}  // namespace detail

inline ScalarPair oracle_iterate(const OracleHandle& h, long n) {
  if (n < 0) throw std::out_of_range("oracle index must be >= 0");
  if (n == 0) {
    if (h.kind == OracleKind::krasnoselskij_example_4_1) return {h.x0, h.x0};
    return {h.x0, h.y0};
  }
  switch (h.kind) {
    case OracleKind::picard_example_2_1: {
      const double p = detail::ipow(-1.0 / 3.0, n);
      const double s = h.x0 + h.y0;
      return {0.5 * (h.x0 - h.y0 + p * s), 0.5 * (h.y0 - h.x0 + p * s)};
    }
    case OracleKind::krasnoselskij_example_4_1: {
      detail::require_open_lambda(h);
      const double x = detail::ipow(1.0 - 2.0 * h.lambda, n) * h.x0;
      return {x, x};
    }
    case OracleKind::double_krasnoselskij_example_2_1: {
      detail::require_open_lambda(h);
      const double p1 = detail::ipow(1.0 - h.lambda, n);
      const double p2 = detail::ipow(1.0 - 2.0 * h.lambda, n);
      const double s = h.x0 + h.y0;
      return {0.5 * (p1 * (h.x0 - h.y0) + p2 * s), 0.5 * (p1 * (h.y0 - h.x0) + p2 * s)};
    }
  }
  throw std::invalid_argument("unknown oracle kind");
}

inline ScalarPair oracle_limit(const OracleHandle& h) {
  switch (h.kind) {
    case OracleKind::picard_example_2_1:
      return {0.5 * (h.x0 - h.y0), 0.5 * (h.y0 - h.x0)};
    case OracleKind::krasnoselskij_example_4_1:
    case OracleKind::double_krasnoselskij_example_2_1:
      if (!(h.lambda > 0.0 && h.lambda < 1.0)) {
        throw std::domain_error("closed form does not converge for lambda outside (0, 1)");
      }
      return {0.0, 0.0};
  }
  throw std::invalid_argument("unknown oracle kind");
}

}  // namespace coupledfix
