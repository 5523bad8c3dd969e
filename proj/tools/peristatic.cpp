// peristatic command-line tool: single solves, convergence studies, weight
// table dumps and the verification suite.
//
// Exit codes: 0 ok, 1 configuration error, 2 solver non-convergence,
// 3 I/O error, 4 weight validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <peristatic/checks.hpp>
#include <peristatic/config.hpp>
#include <peristatic/field_io.hpp>
#include <peristatic/peristatic.hpp>

namespace {

using namespace peristatic;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitIo = 3;
constexpr int kExitWeights = 4;

double parse_kappa(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

RunConfig resolve_config(const std::string& config_path, const std::string& builtin) {
  if (!config_path.empty()) return load_run_config(config_path);
  if (!builtin.empty()) {
    RunConfig rc;
    rc.study = builtin_study(builtin);
    return rc;
  }
  throw ConfigError("either --config or --builtin is required");
}

WeightScheme parse_scheme(const std::string& s) {
  if (s == "FA" || s == "fa") return WeightScheme::fa;
  if (s == "PAAC" || s == "paac") return WeightScheme::paac;
  if (s == "custom") return WeightScheme::custom;
  throw ConfigError("unknown scheme '" + s + "' (expected FA, PAAC or custom)");
}

std::vector<std::tuple<int, int, double>> load_weight_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open weight table '" + path + "'");
  std::vector<std::tuple<int, int, double>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(tok);
    if (cols.size() < 3) continue;
    // Accept both "i,j,w" and the dump format "i,j,dx,dy,w".
    entries.push_back({std::stoi(cols[0]), std::stoi(cols[1]), std::stod(cols.back())});
  }
  return entries;
}

struct PipelineResult {
  PiecewiseConstantField field;
  SolveStats stats;
};

// run_problem with custom-table support; validation gates custom tables.
PipelineResult solve_instance(const RunConfig& rc, double kappa, WeightScheme scheme) {
  const ProblemSpec& problem = rc.study.problem;
  if (scheme != WeightScheme::custom) {
    auto [field, stats] = run_problem(problem, kappa, scheme, rc.study.solver);
    return {std::move(field), stats};
  }
  if (rc.custom_weights_path.empty())
    throw ConfigError("scheme custom requires the custom_weights config field");
  Lattice lattice = classify_constrained(build_lattice(problem.domain, kappa), problem.theta);
  WeightTable weights =
      WeightTable::custom(lattice, problem.kernel.delta(), load_weight_csv(rc.custom_weights_path));
  const auto violations = validate_weights(weights, lattice);
  if (!violations.empty() && !rc.allow_invalid_weights) {
    std::ostringstream msg;
    msg << "custom weight table violates " << violations.front().rule << " on pair ("
        << violations.front().i << ", " << violations.front().j << ")";
    throw Error(msg.str());
  }
  const NodalMaterial material =
      compute_nodal_material(lattice, problem.kernel, weights, problem.k_field, problem.l_field);
  const MatrixFreeOperator op(lattice, problem.kernel, weights, material);
  ReducedSystem system(op, build_rhs(lattice, problem.load));
  auto [field, stats] = solve_cg(system, rc.study.solver, problem.kernel, weights);
  return {PiecewiseConstantField{std::move(lattice), std::move(field)}, stats};
}

int cmd_solve(const std::string& config_path, const std::string& builtin, const std::string& kappa_s,
              const std::string& scheme_s, const std::string& out_path) {
  RunConfig rc = resolve_config(config_path, builtin);
  const double kappa = kappa_s.empty() ? rc.study.kappas.front() : parse_kappa(kappa_s);
  const WeightScheme scheme = scheme_s.empty() ? rc.study.schemes.front() : parse_scheme(scheme_s);

  PipelineResult result = solve_instance(rc, kappa, scheme);
  const Lattice& lat = result.field.lattice;
  std::printf("solve kappa=%.17g scheme=%s cells=%d dof_count=%d cg_iterations=%d "
              "residual=%.17g l2=%.17g wall_time=%.3f\n",
              kappa, to_string(scheme), lat.cell_count(), 2 * lat.free_count(),
              result.stats.iterations, result.stats.final_relative_residual,
              l2_norm(result.field), result.stats.wall_seconds);
  if (!result.stats.converged) {
    std::cerr << "peristatic: solver did not converge within the iteration budget\n";
    return kExitNoConvergence;
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "peristatic: cannot open output path '" << out_path << "'\n";
      return kExitIo;
    }
    write_field(f, lat, result.field.values);
    if (!f) {
      std::cerr << "peristatic: failed writing '" << out_path << "'\n";
      return kExitIo;
    }
  }
  return kExitOk;
}

int cmd_study(const std::string& config_path, const std::string& builtin, const std::string& profile,
              const std::string& out_path, const std::string& fields_dir) {
  RunConfig rc = resolve_config(config_path, builtin);
  if (!profile.empty()) {
    if (profile != "paper") throw ConfigError("unknown profile '" + profile + "'");
    StudyConfig full = paper_profile(builtin.empty() ? "bar" : builtin);
    full.problem = rc.study.problem;
    full.solver = rc.study.solver;
    rc.study = full;
    long long cost = 0;
    auto work = [&](double kappa) {
      const double n = rc.study.problem.domain.extent.x * rc.study.problem.domain.extent.y /
                       (kappa * kappa);
      const double stencil = kPi * std::pow(rc.study.problem.delta() / kappa + 1.0, 2.0);
      return static_cast<long long>(n * stencil);
    };
    cost += work(rc.study.reference_kappa);
    for (double k : rc.study.kappas) cost += 2 * work(k);
    std::cerr << "peristatic: paper profile: n = 0..7 with reference kappa = 1/360; roughly "
              << cost / 1000000 << "M bond visits per solver iteration in total. "
              << "Expect hours of runtime.\n";
  }

  const std::string csv_path = !out_path.empty() ? out_path : rc.csv_path;
  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) {
      std::cerr << "peristatic: cannot open CSV output '" << csv_path << "'\n";
      return kExitIo;
    }
    csv = &file;
  }

  const std::string dump_dir = !fields_dir.empty() ? fields_dir : rc.fields_dir;
  std::function<void(const StudyRow&, const PiecewiseConstantField&)> on_row;
  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    on_row = [dump_dir](const StudyRow& row, const PiecewiseConstantField& field) {
      char name[128];
      std::snprintf(name, sizeof(name), "field_%s_nx%d.pdf1", to_string(row.scheme),
                    field.lattice.nx());
      std::ofstream f(std::filesystem::path(dump_dir) / name, std::ios::binary);
      if (!f) throw Error("cannot write field dump in '" + dump_dir + "'");
      write_field(f, field.lattice, field.values);
    };
  }

  PiecewiseConstantField reference;
  run_convergence_study(rc.study, csv, &reference, on_row);
  if (!dump_dir.empty()) {
    std::ofstream f(std::filesystem::path(dump_dir) / "reference.pdf1", std::ios::binary);
    if (!f) {
      std::cerr << "peristatic: cannot write reference dump\n";
      return kExitIo;
    }
    write_field(f, reference.lattice, reference.values);
  }
  return kExitOk;
}

int cmd_weights(const std::string& config_path, const std::string& builtin, const std::string& kappa_s,
                const std::string& scheme_s, const std::string& out_path) {
  RunConfig rc = resolve_config(config_path, builtin);
  const double kappa = kappa_s.empty() ? rc.study.kappas.front() : parse_kappa(kappa_s);
  const WeightScheme scheme = scheme_s.empty() ? rc.study.schemes.front() : parse_scheme(scheme_s);

  Lattice lattice = build_lattice(rc.study.problem.domain, kappa);
  std::optional<WeightTable> table;
  if (scheme == WeightScheme::custom) {
    if (rc.custom_weights_path.empty())
      throw ConfigError("scheme custom requires the custom_weights config field");
    table.emplace(WeightTable::custom(lattice, rc.study.problem.kernel.delta(),
                                      load_weight_csv(rc.custom_weights_path)));
  } else {
    table.emplace(build_weights(lattice, rc.study.problem.kernel, scheme));
  }

  const auto violations = validate_weights(*table, lattice);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "peristatic: weight violation " << v.rule << " at (" << v.i << ", " << v.j
                << ") value " << v.value << "\n";
    return kExitWeights;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "peristatic: cannot open output '" << out_path << "'\n";
      return kExitIo;
    }
    out = &file;
  }
  *out << "i,j,dx,dy,w\n";
  char buf[160];
  table->for_each_stored([&](int i, int j, double w) {
    const Vec2 d = lattice.midpoint(j) - lattice.midpoint(i);
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", i, j, d.x, d.y, w);
    *out << buf;
  });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peristatic: meshfree static state-based peridynamics on uniform 2-D lattices"};
  app.require_subcommand(1);

  unsigned threads = 0;
  std::string config_path, builtin, kappa_s, scheme_s, out_path, fields_dir, profile;
  std::string level = "quick", inject;
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads,
                    "cap internal parallelism (default: hardware, or PERISTATIC_THREADS)");
  };

  auto* solve = app.add_subcommand("solve", "run one (kappa, scheme) solve and dump the field");
  solve->add_option("--config", config_path, "JSON run configuration");
  solve->add_option("--builtin", builtin, "built-in problem: bar or inclusion");
  solve->add_option("--kappa", kappa_s, "grid spacing, e.g. 0.025 or 1/40");
  solve->add_option("--scheme", scheme_s, "FA, PAAC or custom");
  solve->add_option("--out", out_path, "binary field dump path (PDF1)");
  add_threads(solve);

  auto* study = app.add_subcommand("study", "run a convergence study and write the CSV");
  study->add_option("--config", config_path, "JSON run configuration");
  study->add_option("--builtin", builtin, "built-in problem: bar or inclusion");
  study->add_option("--profile", profile, "'paper' = full kappa sequence with reference 1/360");
  study->add_option("--out", out_path, "CSV output path (default: stdout)");
  study->add_option("--fields-dir", fields_dir, "directory for per-run binary field dumps");
  add_threads(study);

  auto* weights = app.add_subcommand("weights", "dump a weight table as CSV (validates first)");
  weights->add_option("--config", config_path, "JSON run configuration");
  weights->add_option("--builtin", builtin, "built-in problem: bar or inclusion");
  weights->add_option("--kappa", kappa_s, "grid spacing, e.g. 0.025 or 1/40");
  weights->add_option("--scheme", scheme_s, "FA, PAAC or custom");
  weights->add_option("--out", out_path, "CSV output path (default: stdout)");
  add_threads(weights);

  auto* check = app.add_subcommand("check", "run the verification suites");
  check->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  check->add_option("--inject", inject, "inject a fault (weight-asymmetry) to exercise the failure path");
  add_threads(check);

  CLI11_PARSE(app, argc, argv);
  if (threads != 0) peristatic::set_threads(threads);

  try {
    if (solve->parsed()) return cmd_solve(config_path, builtin, kappa_s, scheme_s, out_path);
    if (study->parsed()) return cmd_study(config_path, builtin, profile, out_path, fields_dir);
    if (weights->parsed()) return cmd_weights(config_path, builtin, kappa_s, scheme_s, out_path);
    if (check->parsed()) {
      const auto results = peristatic::run_checks(level, inject);
      return peristatic::report_checks(results, std::cout) == 0 ? kExitOk : 1;
    }
  } catch (const peristatic::ConfigError& e) {
    std::cerr << "peristatic: " << e.what() << "\n";
    return kExitConfig;
  } catch (const peristatic::UnknownProblem& e) {
    std::cerr << "peristatic: " << e.what() << "\n";
    return kExitConfig;
  } catch (const peristatic::NotConverged& e) {
    std::cerr << "peristatic: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "peristatic: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const peristatic::Error& e) {
    const std::string what = e.what();
    std::cerr << "peristatic: " << what << "\n";
    if (what.find("A4(") != std::string::npos) return kExitWeights;
    if (what.find("cannot open") != std::string::npos || what.find("cannot write") != std::string::npos)
      return kExitIo;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "peristatic: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
