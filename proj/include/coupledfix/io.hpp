#pragma once

// Serialization of traces (JSON, CSV) and contractivity reports (JSON).
//
// Trace JSON numbers are written with 17 significant digits, which parses
// back to the identical double.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coupledfix/contractivity.hpp"
#include "coupledfix/iteration.hpp"

namespace coupledfix {

inline std::string format_real(double v) {
  if (!std::isfinite(v)) throw std::domain_error("cannot serialize a non-finite number");
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_array(std::ostream& os, const std::vector<double>& v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_real(v[i]);
  os << ']';
}

inline std::vector<double> read_array(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw std::invalid_argument(std::string("trace field '") + field + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw std::invalid_argument(std::string("trace field '") + field + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw std::invalid_argument(std::string("trace is missing field '") + name + "'");
  return *it;
}

}  // namespace detail

inline void write_trace_json(std::ostream& os, const IterationTrace& t) {
  os << "{\n";
  os << "  \"scheme\": " << nlohmann::json(std::string(to_string(t.config.scheme))).dump() << ",\n";
  os << "  \"theta\": " << format_real(t.config.theta) << ",\n";
  os << "  \"tol\": " << format_real(t.config.tol) << ",\n";
  os << "  \"max_iter\": " << t.config.max_iter << ",\n";
  os << "  \"guard_domain\": " << (t.config.guard_domain ? "true" : "false") << ",\n";
  os << "  \"guarded\": " << (t.guarded ? "true" : "false") << ",\n";
  os << "  \"status\": " << nlohmann::json(std::string(to_string(t.status))).dump() << ",\n";
  os << "  \"cycle_detected\": " << (t.cycle_detected ? "true" : "false") << ",\n";
  os << "  \"iterates\": [";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << (i ? ",\n    " : "\n    ") << "{\"n\": " << t.steps[i] << ", \"x\": ";
    detail::write_array(os, t.iterates[i].x.data());
    os << ", \"y\": ";
    detail::write_array(os, t.iterates[i].y.data());
    os << '}';
  }
  os << (t.size() ? "\n  ],\n" : "],\n");
  os << "  \"residuals\": ";
  detail::write_array(os, t.residuals);
  os << ",\n  \"distances\": ";
  if (t.distances) {
    detail::write_array(os, *t.distances);
  } else {
    os << "null";
  }
  os << ",\n  \"operator_name\": " << nlohmann::json(t.operator_name).dump() << ",\n";
  os << "  \"seed\": " << t.config.seed << "\n}\n";
}

inline std::string trace_to_json(const IterationTrace& t) {
  std::ostringstream os;
  write_trace_json(os, t);
  return os.str();
}

inline IterationTrace trace_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  using detail::field;
  IterationTrace t;
  auto scheme = parse_scheme(field(j, "scheme").get<std::string>());
  if (!scheme) throw std::invalid_argument("trace has an unknown scheme");
  t.config.scheme = *scheme;
  t.config.theta = field(j, "theta").get<double>();
  t.config.tol = field(j, "tol").get<double>();
  t.config.seed = field(j, "seed").get<std::uint64_t>();
  if (j.contains("max_iter")) t.config.max_iter = j["max_iter"].get<std::size_t>();
  if (j.contains("guard_domain")) t.config.guard_domain = j["guard_domain"].get<bool>();
  if (j.contains("guarded")) t.guarded = j["guarded"].get<bool>();
  if (j.contains("cycle_detected")) t.cycle_detected = j["cycle_detected"].get<bool>();
  auto status = parse_status(field(j, "status").get<std::string>());
  if (!status) throw std::invalid_argument("trace has an unknown status");
  t.status = *status;
  t.operator_name = field(j, "operator_name").get<std::string>();
  for (const auto& it : field(j, "iterates")) {
    t.steps.push_back(field(it, "n").get<std::size_t>());
    t.iterates.emplace_back(Vector(detail::read_array(field(it, "x"), "x")),
                            Vector(detail::read_array(field(it, "y"), "y")));
  }
  t.residuals = detail::read_array(field(j, "residuals"), "residuals");
  const auto& d = field(j, "distances");
  if (!d.is_null()) t.distances = detail::read_array(d, "distances");
  if (t.residuals.size() != t.iterates.size()) throw std::invalid_argument("trace residuals and iterates differ in length");
  return t;
}

/// Columns: n, x_0..x_{d-1}, y_0..y_{d-1}, residual, distance_to_target.
inline void write_trace_csv(std::ostream& os, const IterationTrace& t) {
  const std::size_t d = t.size() ? t.iterates.front().dim() : 0;
  os << "n";
  for (std::size_t i = 0; i < d; ++i) os << ",x_" << i;
  for (std::size_t i = 0; i < d; ++i) os << ",y_" << i;
  os << ",residual,distance_to_target\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << t.steps[k];
    for (double v : t.iterates[k].x.data()) os << ',' << format_real(v);
    for (double v : t.iterates[k].y.data()) os << ',' << format_real(v);
    os << ',' << format_real(t.residuals[k]) << ',';
    if (t.distances) os << format_real((*t.distances)[k]);
    os << '\n';
  }
}

inline nlohmann::json witness_to_json(const Witness& w, const char* role) {
  return {{"role", role},
          {"condition", std::string(to_string(w.condition))},
          {"x", w.q.x.data()},
          {"y", w.q.y.data()},
          {"u", w.q.u.data()},
          {"v", w.q.v.data()},
          {"ratio", w.ratio}};
}

inline nlohmann::json report_to_json(const ContractivityReport& r, const std::string& operator_name) {
  nlohmann::json labels = nlohmann::json::array();
  for (Label l : r.classification) labels.push_back(std::string(to_string(l)));
  nlohmann::json witnesses = nlohmann::json::array();
  if (r.first_axis) witnesses.push_back(witness_to_json(*r.first_axis, "first_axis_max"));
  if (r.second_axis) witnesses.push_back(witness_to_json(*r.second_axis, "second_axis_max"));
  for (const auto& w : r.violations) witnesses.push_back(witness_to_json(w, "violation"));
  return {{"operator_name", operator_name},
          {"a_hat", r.a_hat},
          {"b_hat", r.b_hat},
          {"classification", labels},
          {"boundary", r.boundary},
          {"witnesses", witnesses},
          {"seed", r.seed},
          {"samples", r.samples_used}};
}

}  // namespace coupledfix
