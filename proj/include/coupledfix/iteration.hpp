#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coupledfix/operators.hpp"
#include "coupledfix/space.hpp"

namespace coupledfix {

enum class Scheme { picard_double, krasnoselskij_diagonal, krasnoselskij_double };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::picard_double: return "picard_double";
    case Scheme::krasnoselskij_diagonal: return "krasnoselskij_diagonal";
    case Scheme::krasnoselskij_double: return "krasnoselskij_double";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  for (Scheme k : {Scheme::picard_double, Scheme::krasnoselskij_diagonal, Scheme::krasnoselskij_double}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline bool is_krasnoselskij(Scheme s) { return s != Scheme::picard_double; }
inline bool is_diagonal(Scheme s) { return s == Scheme::krasnoselskij_diagonal; }

enum class Status { converged, max_iter_reached, diverged_nonfinite, left_domain };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_iter_reached: return "max_iter_reached";
    case Status::diverged_nonfinite: return "diverged_nonfinite";
    case Status::left_domain: return "left_domain";
  }
  return "?";
}

inline std::optional<Status> parse_status(std::string_view s) {
  for (Status k : {Status::converged, Status::max_iter_reached, Status::diverged_nonfinite, Status::left_domain}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// theta is the weight on the operator image: x+ = (1 - theta) x + theta F.
struct SchemeConfig {
  Scheme scheme = Scheme::krasnoselskij_diagonal;
  double theta = 0.5;
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  bool guard_domain = false;
  std::uint64_t seed = 0;

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

inline void validate(const SchemeConfig& cfg) {
  if (is_krasnoselskij(cfg.scheme) && !(cfg.theta > 0.0 && cfg.theta < 1.0)) {
    throw std::invalid_argument("theta must lie in (0, 1)");
  }
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

inline constexpr std::size_t kTraceCap = 100000;
inline constexpr double kCycleTolerance = 1e-12;
inline constexpr double kCycleResidualRetention = 0.5;
inline constexpr double kResidualRoundingFloor = 16 * std::numeric_limits<double>::epsilon();

struct IterationTrace {
  // Iteration index of each stored entry; consecutive unless the trace was thinned.
  std::vector<std::size_t> steps;
  std::vector<CoupledPair> iterates;
  std::vector<double> residuals;
  std::optional<std::vector<double>> distances;
  Status status = Status::max_iter_reached;
  SchemeConfig config;
  std::string operator_name;
  // Projection onto the domain was applied after every step.
  bool guarded = false;
  // picard_double stopped on x_{n+2} == x_n (within tolerance) without converging.
  bool cycle_detected = false;

  std::size_t size() const noexcept { return iterates.size(); }
  const CoupledPair& final_pair() const { return iterates.back(); }
  double final_residual() const { return residuals.back(); }
  std::size_t iterations() const { return steps.empty() ? 0 : steps.back(); }

  friend bool operator==(const IterationTrace&, const IterationTrace&) = default;
};

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

inline std::vector<double> relax(const Vector& x, const std::vector<double>& fx, double theta) {
  std::vector<double> out(x.dim());
  const double keep = 1.0 - theta;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep * x[i] + theta * fx[i];
  return out;
}

class TraceRecorder {
 public:
  TraceRecorder(IterationTrace& t, const std::optional<CoupledPair>& reference) : t_(t), ref_(reference) {
    if (ref_) t_.distances.emplace();
  }

  void record(std::size_t n, const Vector& x, const Vector& y, double residual) {
    last_ = Entry{n, CoupledPair(x, y), residual};
    if (n % stride_ != 0) return;
    push(*last_);
    if (t_.size() >= kTraceCap) thin();
  }

  // The last evaluated iterate is always kept.
  void finish() {
    if (last_ && (t_.steps.empty() || t_.steps.back() != last_->n)) push(*last_);
  }

 private:
  struct Entry {
    std::size_t n;
    CoupledPair p;
    double r;
  };

  void push(const Entry& e) {
    t_.steps.push_back(e.n);
    t_.iterates.push_back(e.p);
    t_.residuals.push_back(e.r);
    if (ref_) t_.distances->push_back(std::max(distance(e.p.x, ref_->x), distance(e.p.y, ref_->y)));
  }

  void thin() {
    stride_ *= 2;
    std::size_t k = 0;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (t_.steps[i] % stride_ != 0) continue;
      t_.steps[k] = t_.steps[i];
      t_.iterates[k] = t_.iterates[i];
      t_.residuals[k] = t_.residuals[i];
      if (ref_) (*t_.distances)[k] = (*t_.distances)[i];
      ++k;
    }
    t_.steps.resize(k);
    t_.iterates.resize(k);
    t_.residuals.resize(k);
    if (ref_) t_.distances->resize(k);
  }

  IterationTrace& t_;
  const std::optional<CoupledPair>& ref_;
  std::size_t stride_ = 1;
  std::optional<Entry> last_;
};

// Shared driver. For the diagonal scheme y is tied to x and F is evaluated once.
inline IterationTrace run_scheme(const BivariateOperator& f, const Vector& x0, const Vector& y0,
                                 const SchemeConfig& cfg, const std::optional<CoupledPair>& reference) {
  validate(cfg);
  const Box& c = f.domain();
  if (x0.dim() != f.dim() || y0.dim() != f.dim()) throw DimensionError("initial point dimension differs from operator");
  if (!c.contains(x0)) throw std::invalid_argument("x0 lies outside the operator domain");
  if (!c.contains(y0)) throw std::invalid_argument("y0 lies outside the operator domain");
  if (reference && reference->dim() != f.dim()) throw DimensionError("reference dimension differs from operator");

  IterationTrace t;
  t.config = cfg;
  t.operator_name = f.name();
  t.guarded = cfg.guard_domain || !f.range_in_domain();
  TraceRecorder rec(t, reference);

  const bool diagonal = is_diagonal(cfg.scheme);
  const bool picard = cfg.scheme == Scheme::picard_double;
  Vector x = x0;
  Vector y = diagonal ? x0 : y0;
  std::optional<CoupledPair> back1, back2;  // iterates n-1 and n-2
  double res1 = 0.0, res2 = 0.0;

  for (std::size_t n = 0;; ++n) {
    auto fx = f.eval_raw(x, y);
    auto fy = diagonal ? fx : f.eval_raw(y, x);
    if (!all_finite(fx) || !all_finite(fy)) {
      t.status = Status::diverged_nonfinite;
      break;
    }
    const double rx = distance(x, Vector(fx));
    const double residual = diagonal ? rx : std::max(rx, distance(y, Vector(fy)));
    if (!std::isfinite(residual)) {
      t.status = Status::diverged_nonfinite;
      break;
    }
    rec.record(n, x, y, residual);

    if (residual <= cfg.tol) {
      t.status = Status::converged;
      break;
    }
    // A convergent oscillation also returns close to x_{n-2}; a genuine cycle keeps its residual.
    if (picard && back2 && residual >= kCycleResidualRetention * res2) {
      const double scale = 1.0 + std::max({norm(x), norm(y), norm(back2->x), norm(back2->y)});
      if (distance(x, back2->x) <= kCycleTolerance * scale && distance(y, back2->y) <= kCycleTolerance * scale) {
        t.cycle_detected = true;
        t.status = Status::max_iter_reached;
        break;
      }
    }
    if (n == cfg.max_iter) {
      t.status = Status::max_iter_reached;
      break;
    }

    std::vector<double> nx = picard ? fx : relax(x, fx, cfg.theta);
    std::vector<double> ny = diagonal ? nx : (picard ? fy : relax(y, fy, cfg.theta));
    if (!all_finite(nx) || !all_finite(ny)) {
      t.status = Status::diverged_nonfinite;
      break;
    }
    Vector next_x(std::move(nx));
    Vector next_y(std::move(ny));
    if (t.guarded) {
      next_x = project_box(next_x, c);
      next_y = diagonal ? next_x : project_box(next_y, c);
    } else {
      const double slack = 1e-12 * (1.0 + std::max(norm(next_x), norm(next_y)));
      if (!c.contains(next_x, slack) || !c.contains(next_y, slack)) {
        t.status = Status::left_domain;
        break;
      }
    }
    back2 = std::move(back1);
    back1 = CoupledPair(x, y);
    res2 = res1;
    res1 = residual;
    x = std::move(next_x);
    y = std::move(next_y);
  }
  rec.finish();
  return t;
}

inline void require_scheme(const SchemeConfig& cfg, Scheme s) {
  if (cfg.scheme != s) {
    throw std::invalid_argument("scheme mismatch: expected " + std::string(to_string(s)) + ", got " +
                                std::string(to_string(cfg.scheme)));
  }
}

}  // namespace detail

/// x_{n+1} = (1 - theta) x_n + theta F(x_n, x_n); stored pairs are (x_n, x_n).
inline IterationTrace krasnoselskij_diagonal(const BivariateOperator& f, const Vector& x0, const SchemeConfig& cfg,
                                             const std::optional<Vector>& reference = std::nullopt) {
  detail::require_scheme(cfg, Scheme::krasnoselskij_diagonal);
  std::optional<CoupledPair> ref;
  if (reference) ref = CoupledPair(*reference, *reference);
  return detail::run_scheme(f, x0, x0, cfg, ref);
}

/// x_{n+1} = F(x_n, y_n), y_{n+1} = F(y_n, x_n). The limit, when it exists,
/// need not be a coupled fixed point.
inline IterationTrace picard_double(const BivariateOperator& f, const Vector& x0, const Vector& y0,
                                    const SchemeConfig& cfg, const std::optional<CoupledPair>& reference = std::nullopt) {
  detail::require_scheme(cfg, Scheme::picard_double);
  return detail::run_scheme(f, x0, y0, cfg, reference);
}

/// Both components relaxed: x+ = (1-theta) x + theta F(x,y), y+ = (1-theta) y + theta F(y,x).
inline IterationTrace krasnoselskij_double(const BivariateOperator& f, const Vector& x0, const Vector& y0,
                                           const SchemeConfig& cfg,
                                           const std::optional<CoupledPair>& reference = std::nullopt) {
  detail::require_scheme(cfg, Scheme::krasnoselskij_double);
  return detail::run_scheme(f, x0, y0, cfg, reference);
}

/// Dispatch on cfg.scheme. y0 is ignored for the diagonal scheme.
inline IterationTrace run_iteration(const BivariateOperator& f, const Vector& x0, const Vector& y0,
                                    const SchemeConfig& cfg, const std::optional<CoupledPair>& reference = std::nullopt) {
  return detail::run_scheme(f, x0, is_diagonal(cfg.scheme) ? x0 : y0, cfg, reference);
}

// Trace diagnostics.

struct DiagnosticViolation {
  std::size_t n = 0;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct DiagnosticReport {
  std::size_t checks = 0;
  std::vector<DiagnosticViolation> violations;

  bool passed() const noexcept { return violations.empty(); }
};

/// Checks, for each consecutive pair of stored iterates and a^2 = theta(1-theta),
///   a^2 r_n^2 <= D_n - D_{n+1} + 1e-9 scale   and   sqrt(D_{n+1}) <= sqrt(D_n) + 1e-12 sqrt(scale),
/// where D_n = |x_n - p|^2 (diagonal) or |x_n - p|^2 + |y_n - p|^2 (double).
/// For the double scheme r_n is the larger component residual, which only
/// weakens the left side.
inline DiagnosticReport verify_fejer_monotonicity(const IterationTrace& trace, const Vector& p) {
  if (!is_krasnoselskij(trace.config.scheme)) {
    throw std::invalid_argument("Fejer check requires a Krasnoselskij trace");
  }
  const bool diagonal = is_diagonal(trace.config.scheme);
  const double theta = trace.config.theta;
  const double a2 = theta * (1.0 - theta);
  auto dist2 = [&](const CoupledPair& q) {
    const double dx = squared_norm(q.x - p);
    return diagonal ? dx : dx + squared_norm(q.y - p);
  };

  DiagnosticReport rep;
  if (trace.size() == 0) return rep;
  const double scale = std::max(1.0, dist2(trace.iterates.front()));
  const double root_scale = std::sqrt(scale);
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    if (trace.steps[k + 1] != trace.steps[k] + 1) continue;
    const double dn = dist2(trace.iterates[k]);
    const double dn1 = dist2(trace.iterates[k + 1]);
    const double r = trace.residuals[k];
    ++rep.checks;
    const double lhs = a2 * r * r;
    if (lhs > dn - dn1 + 1e-9 * scale) {
      rep.violations.push_back({trace.steps[k], "a^2 |x_n - F|^2 <= D_n - D_n+1", lhs, dn - dn1});
    }
    ++rep.checks;
    if (std::sqrt(dn1) > std::sqrt(dn) + 1e-12 * root_scale) {
      rep.violations.push_back({trace.steps[k], "|x_n+1 - p| <= |x_n - p|", std::sqrt(dn1), std::sqrt(dn)});
    }
  }
  return rep;
}

namespace detail {

inline double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline DiagnosticReport verify_residual_decay(const IterationTrace& trace) {
  DiagnosticReport rep;
  if (trace.size() == 0) return rep;
  const auto& r = trace.residuals;
  if (trace.status == Status::converged) {
    ++rep.checks;
    if (r.back() > trace.config.tol) rep.violations.push_back({trace.steps.back(), "final residual <= tol", r.back(), trace.config.tol});
  }
  double running = r.front();
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double next = std::min(running, r[k]);
    ++rep.checks;
    if (next > running) rep.violations.push_back({trace.steps[k], "running minimum nonincreasing", next, running});
    running = next;
  }
  if (r.size() >= 50) {
    const std::size_t w = r.size() / 10;
    const double head = detail::median({r.begin(), r.begin() + static_cast<std::ptrdiff_t>(w)});
    const double tail = detail::median({r.end() - static_cast<std::ptrdiff_t>(w), r.end()});
    // A tail already at rounding level has nothing left to decay.
    const auto& last = trace.final_pair();
    const double floor = kResidualRoundingFloor * (1.0 + std::max(norm(last.x), norm(last.y)));
    ++rep.checks;
    if (!(tail < head) && tail > floor) rep.violations.push_back({trace.steps.back(), "tail median < head median", tail, head});
  }
  return rep;
}

}  // namespace coupledfix
