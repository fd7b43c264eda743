#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coupledfix/closed_form.hpp"
#include "coupledfix/space.hpp"

namespace coupledfix {

struct CoupledPair {
  Vector x;
  Vector y;

  CoupledPair() = default;
  CoupledPair(Vector x_, Vector y_) : x(std::move(x_)), y(std::move(y_)) { require_same_dim(x, y); }

  std::size_t dim() const noexcept { return x.dim(); }
  friend bool operator==(const CoupledPair&, const CoupledPair&) = default;
};

/// The evaluator returned a NaN or infinite coordinate.
class OperatorDefect : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
    if (n_ == 0 || data_.size() != n_ * n_) throw std::invalid_argument("matrix must be square and non-empty");
  }
  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) throw std::invalid_argument("matrix must be square");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), std::move(flat));
  }
  static Matrix zeros(std::size_t n) { return Matrix(n, std::vector<double>(n * n, 0.0)); }

  std::size_t dim() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(n_, n_);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c) m(r, c) = (*this)(r, c);
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Largest singular value.
inline double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.to_eigen());
  return svd.singularValues()(0);
}

/// Parameters of F(x,y) = A x + B y + c.
struct LinearSpec {
  Matrix a;
  Matrix b;
  Vector shift;
  double a_norm = 0.0;
  double b_norm = 0.0;
};

using Evaluator = std::function<std::vector<double>(const Vector&, const Vector&)>;

class BivariateOperator {
 public:
  BivariateOperator(std::string name, Box domain, Evaluator evaluator, bool range_in_domain)
      : name_(std::move(name)),
        domain_(std::move(domain)),
        evaluator_(std::move(evaluator)),
        range_in_domain_(range_in_domain) {}

  const std::string& name() const noexcept { return name_; }
  const Box& domain() const noexcept { return domain_; }
  std::size_t dim() const noexcept { return domain_.dim(); }
  bool range_in_domain() const noexcept { return range_in_domain_; }
  const std::vector<CoupledPair>& known_coupled_fixed_points() const noexcept { return known_; }
  const std::vector<OracleKind>& closed_forms() const noexcept { return closed_forms_; }
  const std::optional<LinearSpec>& linear() const noexcept { return linear_; }

  BivariateOperator& with_fixed_point(CoupledPair p) {
    if (p.dim() != dim()) throw DimensionError("fixed point dimension differs from operator");
    known_.push_back(std::move(p));
    return *this;
  }
  BivariateOperator& with_closed_form(OracleKind k) {
    closed_forms_.push_back(k);
    return *this;
  }
  BivariateOperator& with_linear(LinearSpec spec) {
    linear_ = std::move(spec);
    return *this;
  }

  /// Raw evaluation; coordinates may be non-finite.
  std::vector<double> eval_raw(const Vector& x, const Vector& y) const {
    if (x.dim() != dim() || y.dim() != dim()) {
      throw DimensionError("operator '" + name_ + "' expects dimension " + std::to_string(dim()));
    }
    auto out = evaluator_(x, y);
    if (out.size() != dim()) throw OperatorDefect("operator '" + name_ + "' returned wrong dimension");
    return out;
  }

  Vector operator()(const Vector& x, const Vector& y) const {
    auto out = eval_raw(x, y);
    for (double v : out) {
      if (!std::isfinite(v)) throw OperatorDefect("operator '" + name_ + "' produced a non-finite value");
    }
    return Vector(std::move(out));
  }

 private:
  std::string name_;
  Box domain_;
  Evaluator evaluator_;
  bool range_in_domain_;
  std::vector<CoupledPair> known_;
  std::vector<OracleKind> closed_forms_;
  std::optional<LinearSpec> linear_;
};

inline Vector eval(const BivariateOperator& f, const Vector& x, const Vector& y) { return f(x, y); }

inline bool is_coupled_fixed_point(const BivariateOperator& f, const CoupledPair& p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  return distance(f(p.x, p.y), p.x) <= tol && distance(f(p.y, p.x), p.y) <= tol;
}

/// Solves (I - A - B) x = c. Throws when the system is singular.
inline Vector linear_fixed_point(const Matrix& a, const Matrix& b, const Vector& c) {
  const std::size_t n = a.dim();
  if (b.dim() != n || c.dim() != n) throw DimensionError("linear operator dimensions disagree");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - a.to_eigen() - b.to_eigen();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw std::domain_error("I - A - B is singular");
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(c.data().data(), n);
  Eigen::VectorXd sol = lu.solve(rhs);
  return Vector(std::vector<double>(sol.data(), sol.data() + n));
}

namespace detail {

// Interval image of the box under F: exact bounds of each output coordinate.
inline bool linear_maps_box_into_itself(const Matrix& a, const Matrix& b, const Vector& c, const Box& box) {
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i) {
    double lo = c[i], hi = c[i];
    for (std::size_t j = 0; j < n; ++j) {
      for (double coef : {a(i, j), b(i, j)}) {
        const double p = coef * box.lower()[j];
        const double q = coef * box.upper()[j];
        lo += std::min(p, q);
        hi += std::max(p, q);
      }
    }
    if (lo < box.lower()[i] || hi > box.upper()[i]) return false;
  }
  return true;
}

}  // namespace detail

/// F(x,y) = A x + B y + c on the given box. When |A| + |B| < 1 (spectral
/// norms) the equal-component fixed point is attached.
inline BivariateOperator make_linear_operator(Matrix a, Matrix b, Vector shift, Box domain,
                                              std::string name = "linear") {
  const std::size_t n = a.dim();
  if (b.dim() != n || shift.dim() != n || domain.dim() != n) {
    throw DimensionError("linear operator: A, B, c and domain must share one dimension");
  }
  const bool self_map = detail::linear_maps_box_into_itself(a, b, shift, domain);
  LinearSpec spec{a, b, shift, spectral_norm(a), spectral_norm(b)};
  Evaluator ev = [a, b, shift](const Vector& x, const Vector& y) {
    const std::size_t d = a.dim();
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
      double s = shift[i];
      for (std::size_t j = 0; j < d; ++j) s += a(i, j) * x[j] + b(i, j) * y[j];
      out[i] = s;
    }
    return out;
  };
  BivariateOperator op(std::move(name), std::move(domain), std::move(ev), self_map);
  if (spec.a_norm + spec.b_norm < 1.0) {
    Vector p = linear_fixed_point(a, b, shift);
    op.with_fixed_point(CoupledPair(p, p));
  }
  op.with_linear(std::move(spec));
  return op;
}

// Built-in scalar examples.

/// F(x,y) = (x - 2y)/3 on [-1, 1]. Weakly nonexpansive with a = 1/3, b = 2/3.
/// Every (c, -c) is a coupled fixed point; (0, 0) is the only one with equal components.
inline BivariateOperator example_2_1() {
  BivariateOperator op(
      "example_2_1", Box::cube(1, -1.0, 1.0),
      [](const Vector& x, const Vector& y) { return std::vector<double>{(x[0] - 2.0 * y[0]) / 3.0}; },
      true);
  op.with_fixed_point({Vector{0.0}, Vector{0.0}})
      .with_fixed_point({Vector{1.0}, Vector{-1.0}})
      .with_fixed_point({Vector{-1.0}, Vector{1.0}})
      .with_closed_form(OracleKind::picard_example_2_1)
      .with_closed_form(OracleKind::double_krasnoselskij_example_2_1);
  return op;
}

/// F(x,y) = 4 - x^2 - 2y on [-4, 4]. Maps outside the box (F(-4,4) = -20).
inline BivariateOperator example_2_2() {
  BivariateOperator op(
      "example_2_2", Box::cube(1, -4.0, 4.0),
      [](const Vector& x, const Vector& y) { return std::vector<double>{4.0 - x[0] * x[0] - 2.0 * y[0]}; },
      false);
  op.with_fixed_point({Vector{-4.0}, Vector{-4.0}})
      .with_fixed_point({Vector{1.0}, Vector{1.0}})
      .with_fixed_point({Vector{-1.0}, Vector{2.0}})
      .with_fixed_point({Vector{2.0}, Vector{-1.0}});
  return op;
}

/// F(x,y) = -(x+y)/2 on [-1, 1].
inline BivariateOperator example_4_1() {
  BivariateOperator op(
      "example_4_1", Box::cube(1, -1.0, 1.0),
      [](const Vector& x, const Vector& y) { return std::vector<double>{-(x[0] + y[0]) / 2.0}; }, true);
  op.with_fixed_point({Vector{0.0}, Vector{0.0}}).with_closed_form(OracleKind::krasnoselskij_example_4_1);
  return op;
}

inline std::vector<std::string> operator_names() {
  return {"example_2_1", "example_2_2", "example_4_1", "linear"};
}

/// Registry lookup for the parameter-free operators. "linear" needs a LinearSpec
/// and is built with make_linear_operator.
inline BivariateOperator make_operator(std::string_view name) {
  if (name == "example_2_1") return example_2_1();
  if (name == "example_2_2") return example_2_2();
  if (name == "example_4_1") return example_4_1();
  if (name == "linear") throw std::invalid_argument("operator 'linear' requires A, B, c and box bounds");
  throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

}  // namespace coupledfix
