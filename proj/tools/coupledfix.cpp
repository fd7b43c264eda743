// coupledfix: run coupled fixed-point iterations, analyze operators, sweep relaxation weights.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coupledfix/cli.hpp"

namespace {

using coupledfix::cli::RawFields;

struct Flags {
  std::string problem;
  RawFields fields;
};

// Each flag maps onto a problem-file key; set flags override the file.
void add_field_flags(CLI::App* cmd, Flags& flags, std::initializer_list<std::pair<const char*, const char*>> opts) {
  cmd->add_option("problem,--problem", flags.problem, "Problem file (key = value lines)");
  for (const auto& [flag, key] : opts) {
    cmd->add_option_function<std::string>(
        flag, [&flags, key = std::string(key)](const std::string& v) { flags.fields[key] = v; },
        "Overrides '" + std::string(key) + "'");
  }
}

RawFields collect(const Flags& flags) {
  RawFields base;
  if (!flags.problem.empty()) base = coupledfix::cli::parse_problem_file(flags.problem);
  return coupledfix::cli::merge(base, flags.fields);
}

// Writes to the spec's output path, or stdout when none is given.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw coupledfix::cli::SpecError("out", "cannot open '" + path + "' for writing");
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  namespace cf = coupledfix;
  CLI::App app{"Coupled fixed points of bivariate operators by Picard and Krasnoselskij iterations"};
  app.require_subcommand(1);

  Flags run_flags, analyze_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "Iterate one scheme and write the trace");
  add_field_flags(run, run_flags,
                  {{"--operator", "operator"}, {"--scheme", "scheme"}, {"--theta", "theta"}, {"--x0", "x0"},
                   {"--y0", "y0"}, {"--tol", "tol"}, {"--max-iter", "max_iter"}, {"--seed", "seed"},
                   {"--reference", "reference"}, {"--guard-domain", "guard_domain"}, {"--out", "out"},
                   {"--format", "format"}});
  auto* analyze = app.add_subcommand("analyze", "Estimate contractivity constants and classify an operator");
  add_field_flags(analyze, analyze_flags,
                  {{"--operator", "operator"}, {"--samples", "samples"}, {"--seed", "seed"}, {"--out", "out"}});
  auto* sweep = app.add_subcommand("sweep", "Run one scheme for several theta values");
  add_field_flags(sweep, sweep_flags,
                  {{"--operator", "operator"}, {"--scheme", "scheme"}, {"--thetas", "thetas"}, {"--x0", "x0"},
                   {"--y0", "y0"}, {"--tol", "tol"}, {"--max-iter", "max_iter"}, {"--seed", "seed"},
                   {"--guard-domain", "guard_domain"}, {"--out", "out"}});
  auto* list = app.add_subcommand("list-operators", "List built-in operators");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::cout << "example_2_1  F(x,y) = (x - 2y)/3 on [-1,1]\n"
                << "example_2_2  F(x,y) = 4 - x^2 - 2y on [-4,4] (not a self-map)\n"
                << "example_4_1  F(x,y) = -(x + y)/2 on [-1,1]\n"
                << "linear       F(x,y) = A x + B y + c on [lower, upper] (problem file)\n";
      return 0;
    }
    if (run->parsed()) {
      const auto spec = cf::cli::parse_problem(collect(run_flags));
      const auto trace = cf::cli::execute(spec);
      emit(spec.out, [&](std::ostream& os) { cf::cli::write_trace(os, trace, spec.format); });
      std::cerr << "status: " << cf::to_string(trace.status) << " after " << trace.iterations() << " iterations";
      if (trace.cycle_detected) std::cerr << " (2-cycle detected)";
      std::cerr << '\n';
      return cf::cli::exit_code(trace.status);
    }
    if (analyze->parsed()) {
      const auto spec = cf::cli::parse_problem(collect(analyze_flags));
      const auto op = cf::cli::build_operator(spec);
      const auto report = cf::cli::analyze(spec, op);
      emit(spec.out, [&](std::ostream& os) { os << cf::report_to_json(report, op.name()).dump(2) << '\n'; });
      return 0;
    }
    if (sweep->parsed()) {
      const auto spec = cf::cli::parse_problem(collect(sweep_flags));
      const auto rows = cf::cli::sweep(spec);
      emit(spec.out, [&](std::ostream& os) { cf::cli::write_sweep_csv(os, rows); });
      return cf::cli::sweep_exit_code(rows);
    }
  } catch (const cf::cli::SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cf::cli::kSpecErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cf::cli::kSpecErrorExit;
  }
  return 0;
}
