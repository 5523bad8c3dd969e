// Declarative convergence studies: a problem, a kappa sequence, a reference
// solve, one CSV row per (kappa, scheme). The reference is solved once and
// shared by every scheme, so scheme comparisons see the identical target.
#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/error_metrics.hpp"
#include "peristatic/kernel.hpp"
#include "peristatic/lattice.hpp"
#include "peristatic/material.hpp"
#include "peristatic/peri_operator.hpp"
#include "peristatic/system.hpp"
#include "peristatic/weights.hpp"

namespace peristatic {

struct ProblemSpec {
  BoxDomain domain{};
  Region theta = Region::box({0, 0}, {0, 0});
  VectorField load{};
  ScalarField k_field{};
  ScalarField l_field{};
  Kernel kernel = Kernel::inverse_distance(1.0);

  double delta() const { return kernel.delta(); }
};

struct StudyConfig {
  ProblemSpec problem{};
  std::vector<double> kappas;
  double reference_kappa = 0.0;
  std::vector<WeightScheme> schemes;
  WeightScheme reference_scheme = WeightScheme::paac;
  SolverParams solver{};

  void validate() const {
    if (kappas.empty()) throw ConfigError("study: kappas must be nonempty");
    if (schemes.empty()) throw ConfigError("study: schemes must be nonempty");
    for (double k : kappas)
      if (!(reference_kappa < k))
        throw ConfigError("study: reference_kappa must be smaller than every kappa");
  }
};

struct StudyRow {
  double kappa = 0.0;
  WeightScheme scheme = WeightScheme::paac;
  double l2_error = 0.0;
  int cg_iterations = 0;
  double residual = 0.0;
  double wall_time = 0.0;
  int dof_count = 0;
};

inline std::string study_csv_header() {
  return "kappa,scheme,l2_error,cg_iterations,residual,wall_time,dof_count";
}

inline std::string to_csv(const StudyRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%d,%.17g,%.17g,%d", row.kappa,
                to_string(row.scheme), row.l2_error, row.cg_iterations, row.residual,
                row.wall_time, row.dof_count);
  return buf;
}

// Full pipeline for one (problem, kappa, scheme) instance.
inline std::pair<PiecewiseConstantField, SolveStats> run_problem(const ProblemSpec& problem,
                                                                 double kappa, WeightScheme scheme,
                                                                 const SolverParams& solver) {
  Lattice lattice = classify_constrained(build_lattice(problem.domain, kappa), problem.theta);
  const WeightTable weights = build_weights(lattice, problem.kernel, scheme);
  const NodalMaterial material =
      compute_nodal_material(lattice, problem.kernel, weights, problem.k_field, problem.l_field);
  const MatrixFreeOperator op(lattice, problem.kernel, weights, material);
  ReducedSystem system(op, build_rhs(lattice, problem.load));
  auto [field, stats] = solve_cg(system, solver, problem.kernel, weights);
  return {PiecewiseConstantField{std::move(lattice), std::move(field)}, stats};
}

// Solves the reference once, then every (kappa, scheme) in order. Rows are
// streamed (and flushed) to `csv` as they complete; a failure flushes a
// trailing "# aborted" marker and rethrows. `on_row` sees each solved field,
// e.g. for binary dumps.
inline std::vector<StudyRow> run_convergence_study(
    const StudyConfig& config, std::ostream* csv = nullptr,
    PiecewiseConstantField* reference_out = nullptr,
    const std::function<void(const StudyRow&, const PiecewiseConstantField&)>& on_row = nullptr) {
  config.validate();
  std::vector<StudyRow> rows;
  if (csv) *csv << study_csv_header() << "\n" << std::flush;
  try {
    auto [reference, ref_stats] =
        run_problem(config.problem, config.reference_kappa, config.reference_scheme, config.solver);
    if (!ref_stats.converged)
      throw NotConverged("study: reference solve did not converge (residual " +
                         std::to_string(ref_stats.final_relative_residual) + ")");
    for (double kappa : config.kappas) {
      for (WeightScheme scheme : config.schemes) {
        auto [field, stats] = run_problem(config.problem, kappa, scheme, config.solver);
        if (!stats.converged)
          throw NotConverged("study: solve did not converge at kappa=" + std::to_string(kappa));
        StudyRow row;
        row.kappa = kappa;
        row.scheme = scheme;
        row.l2_error = l2_diff(field, reference);
        row.cg_iterations = stats.iterations;
        row.residual = stats.final_relative_residual;
        row.wall_time = stats.wall_seconds;
        row.dof_count = 2 * field.lattice.free_count();
        rows.push_back(row);
        if (csv) *csv << to_csv(row) << "\n" << std::flush;
        if (on_row) on_row(row, field);
      }
    }
    if (reference_out) *reference_out = std::move(reference);
  } catch (...) {
    if (csv) *csv << "# aborted: study failed before completing all rows\n" << std::flush;
    throw;
  }
  return rows;
}

// The two built-in benchmark problems: a short bar pulled on the right and
// held on the left, and the same bar with a soft circular inclusion.
inline ProblemSpec builtin_problem(const std::string& name) {
  const double delta = 1.0 / 20.0;
  ProblemSpec p;
  p.domain = {{0.0, 0.0}, {2.0, 1.0}};
  p.kernel = Kernel::inverse_distance(delta);
  p.theta = Region::box({0.0, 0.0}, {2.0 * delta, 1.0});
  p.load.background = {0.0, 0.0};
  p.load.overrides.push_back({Region::box({2.0 - 2.0 * delta, 0.0}, {2.0 * delta, 1.0}), Vec2{100.0, 0.0}});
  p.k_field.background = 100.0;
  p.l_field.background = 800.0;
  if (name == "bar") return p;
  if (name == "inclusion") {
    const Region ball = Region::disc({1.0, 0.5}, 0.3);
    p.k_field.overrides.push_back({ball, 0.01});
    p.l_field.overrides.push_back({ball, 0.08});
    return p;
  }
  throw UnknownProblem("builtin_problem: unknown problem '" + name + "' (expected bar or inclusion)");
}

// Scaled default study: runtime-bounded reference at kappa = 1/160.
inline StudyConfig builtin_study(const std::string& name) {
  StudyConfig c;
  c.problem = builtin_problem(name);
  c.kappas = {1.0 / 40.0, 1.0 / 60.0, 1.0 / 80.0};
  c.reference_kappa = 1.0 / 160.0;
  c.schemes = {WeightScheme::paac, WeightScheme::fa};
  c.reference_scheme = WeightScheme::paac;
  return c;
}

// The full experiment: kappa_n = 1/(40 + 20 n) for n = 0..7 against a
// reference at 1/360. Multi-hour; opt-in.
inline StudyConfig paper_profile(const std::string& name) {
  StudyConfig c = builtin_study(name);
  c.kappas.clear();
  for (int n = 0; n <= 7; ++n) c.kappas.push_back(1.0 / (40.0 + 20.0 * n));
  c.reference_kappa = 1.0 / 360.0;
  return c;
}

}  // namespace peristatic
