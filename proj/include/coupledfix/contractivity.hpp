#pragma once

// Empirical estimation of the constants (a, b) in
//   |F(x,y) - F(u,v)| <= a|x-u| + b|y-v|
// and classification against three contractivity conditions. Estimates are
// sampled lower bounds; refutations carry concrete witnesses.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "coupledfix/operators.hpp"
#include "coupledfix/space.hpp"

namespace coupledfix {

inline constexpr double kRefutationMargin = 1e-9;
inline constexpr double kMinArgumentDistance = 1e-12;

/// mt19937_64 with a fixed double construction (53 high bits), so streams are
/// reproducible across platforms and standard libraries.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Vector point(const Box& box) {
    std::vector<double> c(box.dim());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double lo = box.lower()[i], hi = box.upper()[i];
      c[i] = lo + (hi - lo) * unit();
    }
    return Vector(std::move(c));
  }

 private:
  std::mt19937_64 engine_;
};

struct Quadruple {
  Vector x, y, u, v;
};

enum class Condition {
  first_argument,      // y = v; ratio |F(x,y)-F(u,y)| / |x-u|
  second_argument,     // x = u; ratio |F(x,y)-F(x,v)| / |y-v|
  weakly_nonexpansive, // ratio |dF| / max(|x-u|, |y-v|)
  nonexpansive,        // ratio |dF| / ((|x-u| + |y-v|)/2)
};

inline std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::first_argument: return "first_argument";
    case Condition::second_argument: return "second_argument";
    case Condition::weakly_nonexpansive: return "weakly_nonexpansive";
    case Condition::nonexpansive: return "nonexpansive";
  }
  return "?";
}

struct Witness {
  Condition condition;
  Quadruple q;
  double ratio = 0.0;
};

enum class Label {
  contraction_candidate,
  weakly_nonexpansive_candidate,
  nonexpansive_candidate,
  refuted_weakly_nonexpansive,
  refuted_nonexpansive,
  refuted_contraction,
};

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::contraction_candidate: return "contraction_candidate";
    case Label::weakly_nonexpansive_candidate: return "weakly_nonexpansive_candidate";
    case Label::nonexpansive_candidate: return "nonexpansive_candidate";
    case Label::refuted_weakly_nonexpansive: return "refuted_weakly_nonexpansive";
    case Label::refuted_nonexpansive: return "refuted_nonexpansive";
    case Label::refuted_contraction: return "refuted_contraction";
  }
  return "?";
}

struct ContractivityReport {
  double a_hat = 0.0;
  double b_hat = 0.0;
  std::size_t samples_used = 0;
  std::uint64_t seed = 0;
  // Maximizers of the two axis ratios; absent only when every ratio was 0.
  std::optional<Witness> first_axis;
  std::optional<Witness> second_axis;
  std::vector<Witness> violations;
  std::set<Label> classification;
  // a_hat + b_hat within the refutation margin of 1: labels near the boundary
  // depend on sampling noise.
  bool boundary = false;

  bool has(Label l) const { return classification.count(l) != 0; }
};

/// Ratio of the stated condition at q, evaluated from scratch.
inline double witness_ratio(const BivariateOperator& f, Condition c, const Quadruple& q) {
  const double dx = distance(q.x, q.u);
  const double dy = distance(q.y, q.v);
  switch (c) {
    case Condition::first_argument: return distance(f(q.x, q.y), f(q.u, q.y)) / dx;
    case Condition::second_argument: return distance(f(q.x, q.y), f(q.x, q.v)) / dy;
    case Condition::weakly_nonexpansive: return distance(f(q.x, q.y), f(q.u, q.v)) / std::max(dx, dy);
    case Condition::nonexpansive: return distance(f(q.x, q.y), f(q.u, q.v)) / (0.5 * (dx + dy));
  }
  throw std::invalid_argument("unknown condition");
}

/// True when the stored witness still violates its inequality by more than
/// the refutation margin. Axis witnesses are not violations on their own.
inline bool confirms_violation(const BivariateOperator& f, const Witness& w) {
  const double dx = distance(w.q.x, w.q.u);
  const double dy = distance(w.q.y, w.q.v);
  const double lhs = distance(f(w.q.x, w.q.y), f(w.q.u, w.q.v));
  switch (w.condition) {
    case Condition::weakly_nonexpansive: return lhs > std::max(dx, dy) + kRefutationMargin;
    case Condition::nonexpansive: return lhs > 0.5 * (dx + dy) + kRefutationMargin;
    default: return false;
  }
}

namespace detail {

// Draws (x, u) with |x - u| >= kMinArgumentDistance; the third point is shared.
inline Quadruple draw_axis_pair(SampleStream& s, const Box& box, bool vary_first) {
  for (;;) {
    Vector a = s.point(box);
    Vector b = s.point(box);
    Vector fixed = s.point(box);
    if (distance(a, b) < kMinArgumentDistance) continue;
    if (vary_first) return {a, fixed, b, fixed};
    return {fixed, a, fixed, b};
  }
}

inline void axis_sweep(const BivariateOperator& f, std::size_t n, std::uint64_t seed, Condition c,
                       double& best, std::optional<Witness>& witness) {
  SampleStream s(seed);
  const bool first = c == Condition::first_argument;
  for (std::size_t i = 0; i < n; ++i) {
    Quadruple q = draw_axis_pair(s, f.domain(), first);
    const double r = witness_ratio(f, c, q);
    if (r > best) {
      best = r;
      witness = Witness{c, std::move(q), r};
    }
  }
}

}  // namespace detail

/// Axis-restricted sampling: n_samples draws with y = v for a_hat and
/// n_samples with x = u for b_hat. Stream seeds are seed and seed + 1, so a
/// larger n_samples extends the same sample sequence.
inline ContractivityReport estimate_constants(const BivariateOperator& f, std::size_t n_samples,
                                              std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (f.domain().is_degenerate()) throw std::invalid_argument("cannot vary arguments: domain is a single point");
  ContractivityReport r;
  r.seed = seed;
  r.samples_used = n_samples;
  detail::axis_sweep(f, n_samples, seed, Condition::first_argument, r.a_hat, r.first_axis);
  detail::axis_sweep(f, n_samples, seed + 1, Condition::second_argument, r.b_hat, r.second_axis);
  return r;
}

/// General quadruples drawn uniformly from C^4 (stream seed + 2).
inline std::vector<Quadruple> sample_quadruples(const Box& box, std::size_t n, std::uint64_t seed) {
  SampleStream s(seed + 2);
  std::vector<Quadruple> out;
  out.reserve(n);
  while (out.size() < n) {
    Quadruple q{s.point(box), s.point(box), s.point(box), s.point(box)};
    if (std::max(distance(q.x, q.u), distance(q.y, q.v)) < kMinArgumentDistance) continue;
    out.push_back(std::move(q));
  }
  return out;
}

inline ContractivityReport classify(ContractivityReport report, const std::vector<Quadruple>& general_samples,
                                    const BivariateOperator& f) {
  std::vector<const Quadruple*> quads;
  for (const auto& q : general_samples) quads.push_back(&q);
  if (report.first_axis) quads.push_back(&report.first_axis->q);
  if (report.second_axis) quads.push_back(&report.second_axis->q);

  std::optional<Witness> worst_weak, worst_nonexp;
  for (const Quadruple* q : quads) {
    const double dx = distance(q->x, q->u);
    const double dy = distance(q->y, q->v);
    const double lhs = distance(f(q->x, q->y), f(q->u, q->v));
    const double weak_rhs = std::max(dx, dy);
    const double ne_rhs = 0.5 * (dx + dy);
    if (lhs > weak_rhs + kRefutationMargin) {
      const double ratio = lhs / weak_rhs;
      if (!worst_weak || ratio > worst_weak->ratio) worst_weak = Witness{Condition::weakly_nonexpansive, *q, ratio};
    }
    if (lhs > ne_rhs + kRefutationMargin) {
      const double ratio = lhs / ne_rhs;
      if (!worst_nonexp || ratio > worst_nonexp->ratio) worst_nonexp = Witness{Condition::nonexpansive, *q, ratio};
    }
  }

  const double sum = report.a_hat + report.b_hat;
  report.boundary = std::abs(sum - 1.0) <= kRefutationMargin;
  report.samples_used += general_samples.size();
  report.violations.clear();
  report.classification.clear();

  // Any admissible (a, b) must dominate the attained axis ratios, so a sum
  // above 1 is itself a certificate (the two axis witnesses).
  if (worst_weak || sum > 1.0 + kRefutationMargin) {
    report.classification.insert(Label::refuted_weakly_nonexpansive);
  } else {
    report.classification.insert(Label::weakly_nonexpansive_candidate);
  }
  if (worst_weak) report.violations.push_back(*worst_weak);

  if (worst_nonexp) {
    report.classification.insert(Label::refuted_nonexpansive);
    report.violations.push_back(*worst_nonexp);
  } else {
    report.classification.insert(Label::nonexpansive_candidate);
  }

  // k >= a_hat and l >= b_hat for any admissible k, l, so k + l < 1 is impossible.
  if (sum >= 1.0 - kRefutationMargin) {
    report.classification.insert(Label::refuted_contraction);
  } else {
    report.classification.insert(Label::contraction_candidate);
  }
  return report;
}

/// estimate_constants followed by classify on n_samples general quadruples.
inline ContractivityReport analyze_operator(const BivariateOperator& f, std::size_t n_samples, std::uint64_t seed) {
  return classify(estimate_constants(f, n_samples, seed), sample_quadruples(f.domain(), n_samples, seed), f);
}

}  // namespace coupledfix
