// Self-check suites behind the `check` CLI subcommand: structural operator
// identities, oracle comparisons and SPD checks at desk scale ("quick"),
// plus the refinement sweeps ("full"). Each check prints one machine-readable
// line; a fault can be injected to exercise the failure path.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/dense_linalg.hpp"
#include "peristatic/error_metrics.hpp"
#include "peristatic/oracle.hpp"
#include "peristatic/study.hpp"
#include "peristatic/system.hpp"

namespace peristatic {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace check_detail {

// A bar-shaped instance on [0,2]x[0,1] with delta tied to the lattice
// (delta = 2.5 kappa keeps kappa < delta/sqrt(2) at any size).
struct Instance {
  Lattice lattice;
  Kernel kernel;
  WeightTable weights;
  NodalMaterial material;
};

inline Instance make_instance(int nx, WeightScheme scheme, const std::string& material_name,
                              bool classify = false) {
  const double kappa = 2.0 / nx;
  Lattice lat = build_lattice({{0.0, 0.0}, {2.0, 1.0}}, kappa);
  Kernel ker = Kernel::inverse_distance(2.5 * kappa);
  if (classify) lat = classify_constrained(lat, Region::box({0, 0}, {2.0 * ker.delta(), 1.0}));
  WeightTable w = build_weights(lat, ker, scheme);
  ScalarField kf, lf;
  kf.background = 100.0;
  lf.background = 800.0;
  if (material_name == "inclusion") {
    const Region ball = Region::disc({1.0, 0.5}, 0.3);
    kf.overrides.push_back({ball, 0.01});
    lf.overrides.push_back({ball, 0.08});
  } else if (material_name == "bond") {
    lf.background = 400.0;  // l = 4k: every tau vanishes
  }
  NodalMaterial mat = compute_nodal_material(lat, ker, w, kf, lf);
  return {std::move(lat), std::move(ker), std::move(w), std::move(mat)};
}

inline DisplacementField random_field(int n_nodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DisplacementField u(2 * static_cast<std::size_t>(n_nodes));
  for (double& x : u) x = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  return u;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

}  // namespace check_detail

inline std::vector<CheckResult> run_checks(const std::string& level,
                                           const std::string& inject = "") {
  using namespace check_detail;
  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  };

  // A4 validation of both built-in schemes, with an optional injected fault
  // that must be caught and named.
  {
    Instance inst = make_instance(20, WeightScheme::paac, "bar");
    auto viol = validate_weights(inst.weights, inst.lattice);
    Instance fa = make_instance(20, WeightScheme::fa, "bar");
    auto viol_fa = validate_weights(fa.weights, fa.lattice);
    std::string detail = "violations=" + std::to_string(viol.size() + viol_fa.size());
    bool pass = viol.empty() && viol_fa.empty();
    if (inject == "weight-asymmetry") {
      std::vector<std::tuple<int, int, double>> entries;
      inst.weights.for_each_stored([&](int i, int j, double w) { entries.push_back({i, j, w}); });
      // halve one fractional annulus weight in one direction only, so the
      // injected fault is purely an asymmetry
      for (auto& e : entries)
        if (std::get<2>(e) > 0.2 && std::get<2>(e) < 0.8) {
          std::get<2>(e) *= 0.5;
          break;
        }
      auto bad = WeightTable::custom(inst.lattice, inst.kernel.delta(), entries);
      auto v = validate_weights(bad, inst.lattice);
      pass = false;
      detail = "injected fault detected: " + (v.empty() ? std::string("NOT CAUGHT") : v.front().rule);
    }
    add("weights.A4", pass, detail);
  }

  // Quarter-disc analytic case for the exact disc-box area.
  {
    const double r = 0.37;
    const double area = circle_box_area({1.0, 2.0}, r, {1.0, 2.0}, {1.0 + r, 2.0 + r});
    const double expect = kPi * r * r / 4.0;
    const double rel = std::abs(area - expect) / expect;
    add("geometry.quarter-disc", rel <= 1e-12, fmt("rel=%.3g", rel));
  }

  // Operator symmetry and the potential identity on a 10x5 instance.
  {
    Instance inst = make_instance(10, WeightScheme::paac, "bar");
    MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
    double worst_sym = 0.0, worst_pot = 0.0;
    for (int t = 0; t < 5; ++t) {
      const auto u = random_field(inst.lattice.cell_count(), 100 + t);
      const auto v = random_field(inst.lattice.cell_count(), 200 + t);
      const auto au = op.apply(u);
      const auto av = op.apply(v);
      const double lhs = dot(au, v), rhs = dot(u, av);
      worst_sym = std::max(worst_sym, std::abs(lhs - rhs) / std::abs(lhs));
      const double q = dot(u, au);
      worst_pot = std::max(worst_pot, std::abs(q - 2.0 * op.energy(u)) / std::abs(q));
    }
    add("operator.symmetry", worst_sym <= 1e-10, fmt("rel=%.3g", worst_sym));
    add("operator.potential-identity", worst_pot <= 1e-10, fmt("rel=%.3g", worst_pot));
  }

  // Rigid motions are annihilated (constants and the skew field).
  {
    Instance inst = make_instance(10, WeightScheme::paac, "bar");
    MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
    DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
    const double row_sum = dense.max_abs_row_sum();
    const int n = inst.lattice.cell_count();
    double worst = 0.0, scale = 0.0;
    for (int mode = 0; mode < 3; ++mode) {
      DisplacementField u(2 * static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const Vec2 x = inst.lattice.midpoint(i);
        if (mode == 0) u[2 * i] = 1.0;
        if (mode == 1) u[2 * i + 1] = 1.0;
        if (mode == 2) {
          u[2 * i] = -x.y;
          u[2 * i + 1] = x.x;
        }
      }
      for (double x : u) scale = std::max(scale, std::abs(x));
      const auto v = op.apply(u);
      for (double x : v) worst = std::max(worst, std::abs(x));
    }
    const double bound = 1e-9 * scale * row_sum;
    add("operator.null-space", worst <= bound, fmt("max=%.3g bound=%.3g", worst, bound));
  }

  // Bond-based degeneracy: with l = 4k the full assembly is bitwise the
  // I1-only assembly, and the full apply equals the bond-only apply.
  {
    Instance inst = make_instance(6, WeightScheme::paac, "bond");
    DenseOperator full = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material,
                                        OperatorTerms::full);
    DenseOperator bond = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material,
                                        OperatorTerms::bond_only);
    const bool bitwise = std::memcmp(full.data().data(), bond.data().data(),
                                     full.data().size() * sizeof(double)) == 0;
    MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
    const auto u = random_field(inst.lattice.cell_count(), 42);
    const auto vf = op.apply(u, OperatorTerms::full);
    const auto vb = op.apply(u, OperatorTerms::bond_only);
    bool same = true;
    for (std::size_t i = 0; i < vf.size(); ++i)
      if (vf[i] != vb[i]) same = false;
    add("operator.bond-based", bitwise && same,
        std::string("dense_bitwise=") + (bitwise ? "yes" : "no") + " apply_equal=" + (same ? "yes" : "no"));
  }

  // Dense vs matrix-free on small instances, all schemes and materials.
  {
    double worst = 0.0;
    for (auto scheme : {WeightScheme::fa, WeightScheme::paac}) {
      for (const char* material : {"bar", "inclusion"}) {
        Instance inst = make_instance(6, scheme, material);
        MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
        DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
        const int dim = dense.dim();
        const double ref = dense.max_abs();
        for (int c = 0; c < dim; ++c) {
          DisplacementField e(dim, 0.0);
          e[c] = 1.0;
          const auto col = op.apply(e, OperatorTerms::full);
          for (int r = 0; r < dim; ++r)
            worst = std::max(worst, std::abs(col[r] - dense.at(r, c)) / ref);
        }
      }
    }
    add("operator.dense-matrix-free", worst <= 1e-12, fmt("rel=%.3g", worst));
  }

  // SPD of the reduced dense matrix on an 8x4 bar instance.
  {
    Instance inst = make_instance(8, WeightScheme::paac, "bar", true);
    DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
    const int nf = inst.lattice.free_count();
    std::vector<double> reduced(static_cast<std::size_t>(2 * nf) * (2 * nf));
    for (int fr = 0; fr < nf; ++fr)
      for (int fc = 0; fc < nf; ++fc) {
        const Mat2 b = dense.block(inst.lattice.free_cells()[fr], inst.lattice.free_cells()[fc]);
        reduced[(2 * fr) * (2 * nf) + 2 * fc] = b.a00;
        reduced[(2 * fr) * (2 * nf) + 2 * fc + 1] = b.a01;
        reduced[(2 * fr + 1) * (2 * nf) + 2 * fc] = b.a10;
        reduced[(2 * fr + 1) * (2 * nf) + 2 * fc + 1] = b.a11;
      }
    const double lam = smallest_eigenvalue(reduced, static_cast<std::size_t>(2 * nf));
    add("system.spd", lam > 0.0, fmt("lambda_min=%.6g", lam));
  }

  // CG against a dense Cholesky solve.
  {
    Instance inst = make_instance(6, WeightScheme::paac, "bar", true);
    MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
    VectorField load;
    load.overrides.push_back({Region::box({2.0 - 2.0 * inst.kernel.delta(), 0.0},
                                          {2.0 * inst.kernel.delta(), 1.0}),
                              Vec2{100.0, 0.0}});
    ReducedSystem sys(op, build_rhs(inst.lattice, load));
    SolverParams params;
    params.tol = 1e-12;
    auto [field, stats] = solve_cg(sys, params, inst.kernel, inst.weights);

    DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
    const int nf = inst.lattice.free_count();
    std::vector<double> reduced(static_cast<std::size_t>(2 * nf) * (2 * nf));
    for (int fr = 0; fr < nf; ++fr)
      for (int fc = 0; fc < nf; ++fc) {
        const Mat2 b = dense.block(inst.lattice.free_cells()[fr], inst.lattice.free_cells()[fc]);
        reduced[(2 * fr) * (2 * nf) + 2 * fc] = b.a00;
        reduced[(2 * fr) * (2 * nf) + 2 * fc + 1] = b.a01;
        reduced[(2 * fr + 1) * (2 * nf) + 2 * fc] = b.a10;
        reduced[(2 * fr + 1) * (2 * nf) + 2 * fc + 1] = b.a11;
      }
    const auto direct = cholesky_solve(reduced, sys.rhs());
    double num = 0.0, den = 0.0;
    for (int f = 0; f < nf; ++f) {
      const int c = inst.lattice.free_cells()[f];
      num += (field[2 * c] - direct[2 * f]) * (field[2 * c] - direct[2 * f]) +
             (field[2 * c + 1] - direct[2 * f + 1]) * (field[2 * c + 1] - direct[2 * f + 1]);
      den += direct[2 * f] * direct[2 * f] + direct[2 * f + 1] * direct[2 * f + 1];
    }
    const double rel = std::sqrt(num / den);
    add("system.cg-vs-direct", stats.converged && rel <= 1e-8, fmt("rel=%.3g", rel));
  }

  // Exact cross-grid L2 difference vs the common refinement.
  {
    std::mt19937_64 rng(9);
    auto rnd = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
    const BoxDomain unit{{0, 0}, {1, 1}};
    PiecewiseConstantField f{build_lattice(unit, 0.5), {}};
    PiecewiseConstantField g{build_lattice(unit, 1.0 / 3.0), {}};
    f.values.resize(2 * f.lattice.cell_count());
    g.values.resize(2 * g.lattice.cell_count());
    for (double& v : f.values) v = rnd();
    for (double& v : g.values) v = rnd();
    const double measured = l2_diff(f, g);
    Lattice fine = build_lattice(unit, 1.0 / 6.0);
    double sum = 0.0;
    for (int i = 0; i < fine.cell_count(); ++i) {
      const Vec2 x = fine.midpoint(i);
      const int fi = f.lattice.cell_index(static_cast<int>(x.x / 0.5), static_cast<int>(x.y / 0.5));
      const int gi = g.lattice.cell_index(static_cast<int>(x.x * 3.0), static_cast<int>(x.y * 3.0));
      sum += fine.cell_volume() * (f.value(fi) - g.value(gi)).norm_sq();
    }
    const double expect = std::sqrt(sum);
    const double rel = std::abs(measured - expect) / expect;
    add("metrics.cross-grid", rel <= 1e-12, fmt("rel=%.3g", rel));
  }

  if (level == "full") {
    // m^num refinement toward the analytic interior value 2 pi delta^3 / 3.
    {
      const double delta = 0.05;
      const double target = 2.0 * kPi * delta * delta * delta / 3.0;
      std::vector<double> errs;
      for (int div : {4, 8, 16}) {
        const double kappa = delta / div;
        Lattice lat = build_lattice({{0, 0}, {4 * delta, 4 * delta}}, kappa);
        Kernel ker = Kernel::inverse_distance(delta);
        WeightTable w = build_weights(lat, ker, WeightScheme::paac);
        ScalarField kf, lf;
        kf.background = 100.0;
        lf.background = 800.0;
        NodalMaterial mat = compute_nodal_material(lat, ker, w, kf, lf);
        const int center = lat.cell_index(lat.nx() / 2, lat.ny() / 2);
        errs.push_back(std::abs(mat.m[center] - target) / target);
      }
      const bool mono = errs[0] > errs[1] && errs[1] > errs[2];
      add("material.m-refinement", mono,
          fmt("rel_errs=%.3g,%.3g", errs[0], errs[1]) + fmt(",%.3g", errs[2]));
    }

    // One-point I1 and I2 against the Gauss-8 oracle at fixed geometry,
    // kappa halved three times: strictly decreasing relative error.
    {
      const double delta = 0.2;
      Kernel ker = Kernel::inverse_distance(delta);
      const QuadratureRule rule(8);
      const Vec2 xi{0.0, 0.0}, xj{0.1, 0.04}, xm{0.05, -0.06};
      std::vector<double> e1, e2;
      for (double kappa : {0.02, 0.01, 0.005, 0.0025}) {
        const CellGeom ci{xi, kappa}, cj{xj, kappa}, cm{xm, kappa};
        const double vol = kappa * kappa;
        const Mat2 o1 = oracle_I1(ci, cj, 2.0, ker, rule);
        const Mat2 n1 = i1_block(xj - xi, vol, vol, ker.rho(xj - xi), 2.0, 2.0, 1.0);
        e1.push_back((o1 - n1).max_abs() / o1.max_abs());
        const Mat2 o2 = oracle_I2(ci, cj, cm, 3.0, ker, rule);
        const Mat2 n2 = i2_block(xj - xi, xm - xi, vol, vol, vol, 3.0, ker.rho(xj - xi),
                                 ker.rho(xm - xi), 1.0, 1.0);
        e2.push_back((o2 - n2).max_abs() / o2.max_abs());
      }
      bool mono = true;
      for (std::size_t s = 1; s < e1.size(); ++s)
        if (!(e1[s] < e1[s - 1] && e2[s] < e2[s - 1])) mono = false;
      add("oracle.quadrature-consistency", mono,
          fmt("I1 first/last=%.3g/%.3g", e1.front(), e1.back()) +
              fmt(" I2 first/last=%.3g/%.3g", e2.front(), e2.back()));
    }

    // Oracle self-consistency: doubling the order moves results <= 1e-10.
    {
      const double delta = 0.2;
      Kernel ker = Kernel::inverse_distance(delta);
      const CellGeom ci{{0.0, 0.0}, 0.01}, cj{{0.1, 0.04}, 0.01};
      const Mat2 a = oracle_I1(ci, cj, 1.0, ker, QuadratureRule(8));
      const Mat2 b = oracle_I1(ci, cj, 1.0, ker, QuadratureRule(16));
      const double rel = (a - b).max_abs() / b.max_abs();
      add("oracle.self-consistency", rel <= 1e-10, fmt("rel=%.3g", rel));
    }

    // Weight refinement: the aggregate deviation from the horizon indicator
    // shrinks with kappa at an interior node.
    {
      const double delta = 0.05;
      std::vector<double> dev;
      for (int div : {4, 8, 16}) {
        const double kappa = delta / div;
        Lattice lat = build_lattice({{0, 0}, {4 * delta, 4 * delta}}, kappa);
        Kernel ker = Kernel::inverse_distance(delta);
        WeightTable w = build_weights(lat, ker, WeightScheme::paac);
        const int center = lat.cell_index(lat.nx() / 2, lat.ny() / 2);
        const Vec2 xi = lat.midpoint(center);
        double acc = 0.0;
        for (int j : neighbors(lat, center, delta + kappa)) {
          const double dist = (lat.midpoint(j) - xi).norm();
          const double chi = dist < delta ? 1.0 : 0.0;
          acc += lat.cell_volume() * std::abs(w.weight(center, j) - chi);
        }
        dev.push_back(acc);
      }
      const bool mono = dev[0] > dev[1] && dev[1] > dev[2];
      add("weights.refinement", mono, fmt("dev=%.3g..%.3g", dev.front(), dev.back()));
    }

    // Jacobi preconditioning does not lose to plain CG on the bar problem.
    {
      const ProblemSpec bar = builtin_problem("bar");
      SolverParams with, without;
      with.precond = Preconditioner::jacobi;
      without.precond = Preconditioner::none;
      auto [f1, s1] = run_problem(bar, 1.0 / 40.0, WeightScheme::paac, with);
      auto [f2, s2] = run_problem(bar, 1.0 / 40.0, WeightScheme::paac, without);
      add("system.jacobi-helps", s1.converged && s2.converged && s1.iterations <= s2.iterations,
          "jacobi=" + std::to_string(s1.iterations) + " plain=" + std::to_string(s2.iterations));
    }

    // Entry-level assembly consistency on the admissible pair set, at fixed
    // physical pair distances (>= 0.25) so refinement actually bites.
    {
      const double delta = 0.45;
      Kernel ker = Kernel::inverse_distance(delta);
      const QuadratureRule rule(8);
      std::vector<double> devs;
      for (double kappa : {1.0 / 8.0, 1.0 / 16.0}) {
        Lattice lat = build_lattice({{0, 0}, {1, 1}}, kappa);
        const double vol = lat.cell_volume();
        double worst = 0.0;
        for (int i = 0; i < lat.cell_count(); ++i) {
          for (int j : neighbors(lat, i, delta)) {
            if (j < i) continue;
            const CellGeom ci = cell_geom(lat, i), cj = cell_geom(lat, j);
            const Vec2 bond = lat.midpoint(j) - lat.midpoint(i);
            if (bond.norm() < 0.25) continue;
            if (oracle_detail::adjacent(ci, cj) || !oracle_detail::pair_in_horizon(ci, cj, delta))
              continue;
            const Mat2 gauss = oracle_I1(ci, cj, 1.0, ker, rule);
            const Mat2 one_point = i1_block(bond, vol, vol, ker.rho(bond), 1.0, 1.0, 1.0);
            worst = std::max(worst, (gauss - one_point).max_abs() / gauss.max_abs());
          }
        }
        devs.push_back(worst);
      }
      add("oracle.assembly-consistency", devs[1] < devs[0],
          fmt("dev(1/8)=%.3g dev(1/16)=%.3g", devs[0], devs[1]));
    }
  }

  return results;
}

inline int report_checks(const std::vector<CheckResult>& results, std::ostream& out) {
  int failures = 0;
  for (const auto& r : results) {
    out << "CHECK " << r.name << " " << (r.pass ? "PASS" : "FAIL") << " " << r.detail << "\n";
    if (!r.pass) ++failures;
  }
  out << "SUMMARY checks=" << results.size() << " failures=" << failures << "\n";
  return failures;
}

}  // namespace peristatic
