#pragma once

// Problem files and the run/analyze/sweep commands behind the coupledfix tool.
//
// Problem file grammar (one entry per line):
//   line    := blank | comment | key '=' value
//   comment := '#' anything
//   value   := number | 'true' | 'false' | array | bare-word | "quoted string"
//   array   := '[' value (',' value)* ']'        (nested for matrices)
// Keys: operator scheme theta tol max_iter guard_domain seed samples
//       x0 y0 reference out format thetas A B c lower upper

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coupledfix/contractivity.hpp"
#include "coupledfix/io.hpp"
#include "coupledfix/iteration.hpp"
#include "coupledfix/operators.hpp"

namespace coupledfix::cli {

inline constexpr double kBuiltinDefaultTol = 1e-10;
inline constexpr const char* kTolEnvVar = "COUPLEDFIX_DEFAULT_TOL";

/// A malformed problem; field() names the offending key.
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

using RawFields = std::map<std::string, std::string>;

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "operator", "scheme", "theta", "tol", "max_iter", "guard_domain", "seed", "samples", "x0", "y0",
      "reference", "out", "format", "thetas", "A", "B", "c", "lower", "upper"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline RawFields parse_problem_text(std::istream& in) {
  RawFields out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw SpecError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = detail::trim(t.substr(0, eq));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw SpecError(key.empty() ? "line " + std::to_string(lineno) : key, "unknown key");
    }
    out[key] = detail::trim(t.substr(eq + 1));
  }
  return out;
}

inline RawFields parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("problem", "cannot open '" + path + "'");
  return parse_problem_text(in);
}

/// Later entries win.
inline RawFields merge(RawFields base, const RawFields& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

struct ProblemSpec {
  std::string operator_name = "example_4_1";
  std::optional<Matrix> a, b;
  std::optional<Vector> shift, lower, upper;
  SchemeConfig config;
  std::optional<Vector> x0, y0, reference;
  std::size_t samples = 10000;
  std::vector<double> thetas;
  std::string out;  // empty: stdout
  std::string format = "json";
};

namespace detail {

inline nlohmann::json parse_value(const std::string& key, const std::string& raw) {
  try {
    return nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    if (raw.empty()) throw SpecError(key, "missing value");
    return raw;  // bare word
  }
}

inline double as_real(const std::string& key, const nlohmann::json& v) {
  if (!v.is_number()) throw SpecError(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SpecError(key, "expected a finite number");
  return d;
}

inline std::uint64_t as_count(const std::string& key, const nlohmann::json& v) {
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
    throw SpecError(key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline std::vector<double> as_reals(const std::string& key, const nlohmann::json& v) {
  if (v.is_number()) return {as_real(key, v)};
  if (!v.is_array() || v.empty()) throw SpecError(key, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_real(key, e));
  return out;
}

// Accepts "1", "[1, 2]" and the flag-friendly "1,2".
inline std::vector<double> reals_field(const std::string& key, const std::string& raw) {
  auto v = parse_value(key, raw);
  if (v.is_string()) v = parse_value(key, "[" + raw + "]");
  return as_reals(key, v);
}

inline Vector vector_field(const std::string& key, const std::string& raw) {
  return Vector(reals_field(key, raw));
}

inline Matrix matrix_field(const std::string& key, const std::string& raw) {
  const auto v = parse_value(key, raw);
  if (!v.is_array() || v.empty()) throw SpecError(key, "expected a square matrix literal [[...], ...]");
  std::vector<std::vector<double>> rows;
  for (const auto& r : v) rows.push_back(as_reals(key, r));
  try {
    return Matrix::from_rows(rows);
  } catch (const std::invalid_argument& e) {
    throw SpecError(key, e.what());
  }
}

inline bool bool_field(const std::string& key, const std::string& raw) {
  const auto v = parse_value(key, raw);
  if (!v.is_boolean()) throw SpecError(key, "expected true or false");
  return v.get<bool>();
}

}  // namespace detail

/// Built-in tolerance unless COUPLEDFIX_DEFAULT_TOL holds a positive number.
inline double default_tolerance() {
  const char* env = std::getenv(kTolEnvVar);
  if (!env || !*env) return kBuiltinDefaultTol;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw SpecError(kTolEnvVar, "expected a positive number");
  }
  return v;
}

inline ProblemSpec parse_problem(const RawFields& f) {
  using namespace detail;
  ProblemSpec s;
  s.config.tol = default_tolerance();
  auto get = [&](const char* k) -> const std::string* {
    auto it = f.find(k);
    return it == f.end() ? nullptr : &it->second;
  };
  if (auto v = get("operator")) {
    const auto j = parse_value("operator", *v);
    if (!j.is_string()) throw SpecError("operator", "expected an operator name");
    s.operator_name = j.get<std::string>();
    const auto names = operator_names();
    if (std::find(names.begin(), names.end(), s.operator_name) == names.end()) {
      throw SpecError("operator", "unknown operator '" + s.operator_name + "'");
    }
  }
  if (auto v = get("scheme")) {
    const auto j = parse_value("scheme", *v);
    auto sc = j.is_string() ? parse_scheme(j.get<std::string>()) : std::nullopt;
    if (!sc) throw SpecError("scheme", "expected picard_double, krasnoselskij_diagonal or krasnoselskij_double");
    s.config.scheme = *sc;
  }
  if (auto v = get("theta")) s.config.theta = as_real("theta", parse_value("theta", *v));
  if (auto v = get("tol")) s.config.tol = as_real("tol", parse_value("tol", *v));
  if (auto v = get("max_iter")) s.config.max_iter = as_count("max_iter", parse_value("max_iter", *v));
  if (auto v = get("guard_domain")) s.config.guard_domain = bool_field("guard_domain", *v);
  if (auto v = get("seed")) s.config.seed = as_count("seed", parse_value("seed", *v));
  if (auto v = get("samples")) s.samples = as_count("samples", parse_value("samples", *v));
  if (auto v = get("x0")) s.x0 = vector_field("x0", *v);
  if (auto v = get("y0")) s.y0 = vector_field("y0", *v);
  if (auto v = get("reference")) s.reference = vector_field("reference", *v);
  if (auto v = get("thetas")) s.thetas = reals_field("thetas", *v);
  if (auto v = get("A")) s.a = matrix_field("A", *v);
  if (auto v = get("B")) s.b = matrix_field("B", *v);
  if (auto v = get("c")) s.shift = vector_field("c", *v);
  if (auto v = get("lower")) s.lower = vector_field("lower", *v);
  if (auto v = get("upper")) s.upper = vector_field("upper", *v);
  if (auto v = get("out")) {
    const auto j = parse_value("out", *v);
    s.out = j.is_string() ? j.get<std::string>() : *v;
  }
  if (auto v = get("format")) {
    const auto j = parse_value("format", *v);
    s.format = j.is_string() ? j.get<std::string>() : "";
    if (s.format != "json" && s.format != "csv") throw SpecError("format", "expected json or csv");
  }

  if (is_krasnoselskij(s.config.scheme) && !(s.config.theta > 0.0 && s.config.theta < 1.0)) {
    throw SpecError("theta", "must lie in (0, 1)");
  }
  if (!(s.config.tol > 0.0)) throw SpecError("tol", "must be positive");
  if (s.config.max_iter < 1) throw SpecError("max_iter", "must be >= 1");
  for (double t : s.thetas) {
    if (!(t > 0.0 && t < 1.0)) throw SpecError("thetas", "every theta must lie in (0, 1)");
  }
  return s;
}

inline BivariateOperator build_operator(const ProblemSpec& s) {
  if (s.operator_name != "linear") return make_operator(s.operator_name);
  if (!s.a) throw SpecError("A", "required for operator 'linear'");
  if (!s.b) throw SpecError("B", "required for operator 'linear'");
  if (!s.shift) throw SpecError("c", "required for operator 'linear'");
  if (!s.lower) throw SpecError("lower", "required for operator 'linear'");
  if (!s.upper) throw SpecError("upper", "required for operator 'linear'");
  const std::size_t d = s.a->dim();
  if (s.b->dim() != d) throw SpecError("B", "dimension differs from A");
  if (s.shift->dim() != d) throw SpecError("c", "dimension differs from A");
  if (s.lower->dim() != d) throw SpecError("lower", "dimension differs from A");
  if (s.upper->dim() != d) throw SpecError("upper", "dimension differs from A");
  std::optional<Box> box;
  try {
    box.emplace(*s.lower, *s.upper);
  } catch (const std::invalid_argument& e) {
    throw SpecError("upper", e.what());
  }
  return make_linear_operator(*s.a, *s.b, *s.shift, *box);
}

/// Exit code for a finished trace: 0 converged, 2 not converged, 3 diverged or left the domain.
inline int exit_code(Status s) {
  switch (s) {
    case Status::converged: return 0;
    case Status::max_iter_reached: return 2;
    case Status::diverged_nonfinite:
    case Status::left_domain: return 3;
  }
  return 3;
}

inline constexpr int kSpecErrorExit = 1;

/// Runs the configured scheme. Throws SpecError for an incomplete or inconsistent problem.
inline IterationTrace execute(const ProblemSpec& s, const BivariateOperator& f) {
  if (!s.x0) throw SpecError("x0", "initial point is required");
  if (s.x0->dim() != f.dim()) throw SpecError("x0", "dimension differs from the operator");
  if (!f.domain().contains(*s.x0)) throw SpecError("x0", "lies outside the operator domain");
  Vector y0 = *s.x0;
  if (!is_diagonal(s.config.scheme)) {
    if (!s.y0) throw SpecError("y0", "required for " + std::string(to_string(s.config.scheme)));
    if (s.y0->dim() != f.dim()) throw SpecError("y0", "dimension differs from the operator");
    if (!f.domain().contains(*s.y0)) throw SpecError("y0", "lies outside the operator domain");
    y0 = *s.y0;
  }
  std::optional<CoupledPair> ref;
  if (s.reference) {
    if (s.reference->dim() != f.dim()) throw SpecError("reference", "dimension differs from the operator");
    ref = CoupledPair(*s.reference, *s.reference);
  }
  return run_iteration(f, *s.x0, y0, s.config, ref);
}

inline IterationTrace execute(const ProblemSpec& s) { return execute(s, build_operator(s)); }

inline void write_trace(std::ostream& os, const IterationTrace& t, const std::string& format) {
  if (format == "csv") {
    write_trace_csv(os, t);
  } else {
    write_trace_json(os, t);
  }
}

struct SweepRow {
  double theta = 0.0;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  Status status = Status::max_iter_reached;
};

/// One run per theta, evaluated concurrently; rows come back in input order.
inline std::vector<SweepRow> sweep(const ProblemSpec& s) {
  if (s.thetas.empty()) throw SpecError("thetas", "at least one theta is required");
  if (s.config.scheme == Scheme::picard_double) throw SpecError("scheme", "sweep requires a Krasnoselskij scheme");
  const BivariateOperator f = build_operator(s);
  std::vector<std::future<SweepRow>> jobs;
  for (double theta : s.thetas) {
    jobs.push_back(std::async(std::launch::async, [&f, s, theta] {
      ProblemSpec one = s;
      one.config.theta = theta;
      const IterationTrace t = execute(one, f);
      return SweepRow{theta, t.iterations(), t.size() ? t.final_residual() : 0.0, t.status};
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "theta,iterations,final_residual,status\n";
  for (const auto& r : rows) {
    os << format_real(r.theta) << ',' << r.iterations << ',' << format_real(r.final_residual) << ','
       << to_string(r.status) << '\n';
  }
}

/// Worst exit code over the rows.
inline int sweep_exit_code(const std::vector<SweepRow>& rows) {
  int code = 0;
  for (const auto& r : rows) code = std::max(code, exit_code(r.status));
  return code;
}

inline ContractivityReport analyze(const ProblemSpec& s, const BivariateOperator& f) {
  if (s.samples < 1) throw SpecError("samples", "must be >= 1");
  return analyze_operator(f, s.samples, s.config.seed);
}

}  // namespace coupledfix::cli
