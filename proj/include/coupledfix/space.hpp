#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coupledfix {

/// Raised when two operands of different dimension are combined.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Element of R^d. Coordinates are always finite; d >= 1.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
  Vector(std::initializer_list<double> coords) : coords_(coords) { validate(); }

  static Vector zeros(std::size_t dim) { return Vector(std::vector<double>(dim, 0.0)); }
  static Vector filled(std::size_t dim, double value) {
    return Vector(std::vector<double>(dim, value));
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }
  const std::vector<double>& data() const noexcept { return coords_; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  void validate() const {
    if (coords_.empty()) throw std::invalid_argument("vector must have dimension >= 1");
    for (double c : coords_) {
      if (!std::isfinite(c)) throw std::domain_error("vector coordinate is not finite");
    }
  }

  std::vector<double> coords_;
};

inline void require_same_dim(const Vector& x, const Vector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                         std::to_string(y.dim()));
  }
}

inline double inner(const Vector& x, const Vector& y) {
  require_same_dim(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm(const Vector& x) { return std::sqrt(inner(x, x)); }

inline double squared_norm(const Vector& x) { return inner(x, x); }

namespace detail {

template <class Op>
std::vector<double> zip(const Vector& x, const Vector& y, Op op) {
  require_same_dim(x, y);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = op(x[i], y[i]);
  return out;
}

// Same as zip but allows non-finite results; callers decide how to report them.
template <class Op>
std::vector<double> zip_raw(std::span<const double> x, std::span<const double> y, Op op) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = op(x[i], y[i]);
  return out;
}

}  // namespace detail

inline Vector operator+(const Vector& x, const Vector& y) {
  return Vector(detail::zip(x, y, [](double a, double b) { return a + b; }));
}

inline Vector operator-(const Vector& x, const Vector& y) {
  return Vector(detail::zip(x, y, [](double a, double b) { return a - b; }));
}

inline Vector operator*(double s, const Vector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = s * x[i];
  return Vector(std::move(out));
}

inline double distance(const Vector& x, const Vector& y) { return norm(x - y); }

inline void require_unit_interval(double lambda, const char* name = "lambda") {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::out_of_range(std::string(name) + " must lie in [0, 1]");
  }
}

/// lambda*x + (1-lambda)*y, componentwise.
inline Vector convex_combination(double lambda, const Vector& x, const Vector& y) {
  require_unit_interval(lambda);
  const double mu = 1.0 - lambda;
  return Vector(detail::zip(x, y, [&](double a, double b) { return lambda * a + mu * b; }));
}

/// Floating-point defect of the Hilbert-space identity
///   |l x + (1-l) y - z|^2 = l|x-z|^2 + (1-l)|y-z|^2 - l(1-l)|x-y|^2.
/// The identity holds exactly; the return value is LHS - RHS as evaluated.
inline double lemma18_defect(double lambda, const Vector& x, const Vector& y, const Vector& z) {
  require_unit_interval(lambda);
  require_same_dim(x, y);
  require_same_dim(x, z);
  const double lhs = squared_norm(convex_combination(lambda, x, y) - z);
  const double rhs = lambda * squared_norm(x - z) + (1.0 - lambda) * squared_norm(y - z) -
                     lambda * (1.0 - lambda) * squared_norm(x - y);
  return lhs - rhs;
}

/// Product of closed intervals [lower_i, upper_i].
class Box {
 public:
  Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_dim(lower_, upper_);
    for (std::size_t i = 0; i < lower_.dim(); ++i) {
      if (lower_[i] > upper_[i]) throw std::invalid_argument("box is empty: lower > upper");
    }
  }

  /// [lo, hi]^dim
  static Box cube(std::size_t dim, double lo, double hi) {
    return Box(Vector::filled(dim, lo), Vector::filled(dim, hi));
  }

  std::size_t dim() const noexcept { return lower_.dim(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  bool is_degenerate() const noexcept {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (lower_[i] < upper_[i]) return false;
    }
    return true;
  }

  /// Membership with an absolute slack per coordinate.
  bool contains(const Vector& x, double slack = 0.0) const {
    require_same_dim(x, lower_);
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i] < lower_[i] - slack || x[i] > upper_[i] + slack) return false;
    }
    return true;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

inline Vector project_box(const Vector& x, const Box& c) {
  require_same_dim(x, c.lower());
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::clamp(x[i], c.lower()[i], c.upper()[i]);
  return Vector(std::move(out));
}

}  // namespace coupledfix
