#include <doctest.h>

#include <peristatic/dense_linalg.hpp>
#include <peristatic/study.hpp>
#include <peristatic/system.hpp>

#include "test_helpers.hpp"

using namespace peristatic;

namespace {

struct BarInstance {
  Lattice lattice;
  Kernel kernel;
  WeightTable weights;
  NodalMaterial material;
  VectorField load;
};

// Bar-shaped data on [0,2]x[0,1] with delta = 2.5 kappa: constraint strip on
// the left, load strip on the right.
BarInstance make_bar(int nx) {
  const double kappa = 2.0 / nx;
  const double delta = 2.5 * kappa;
  Kernel ker = Kernel::inverse_distance(delta);
  Lattice lat = classify_constrained(build_lattice({{0, 0}, {2, 1}}, kappa),
                                     Region::box({0, 0}, {2.0 * delta, 1.0}));
  WeightTable w = build_weights(lat, ker, WeightScheme::paac);
  ScalarField kf, lf;
  kf.background = 100.0;
  lf.background = 800.0;
  NodalMaterial mat = compute_nodal_material(lat, ker, w, kf, lf);
  VectorField load;
  load.overrides.push_back({Region::box({2.0 - 2.0 * delta, 0.0}, {2.0 * delta, 1.0}), Vec2{100.0, 0.0}});
  return {std::move(lat), std::move(ker), std::move(w), std::move(mat), std::move(load)};
}

std::vector<double> reduced_dense(const DenseOperator& dense, const Lattice& lat) {
  const int nf = lat.free_count();
  std::vector<double> r(static_cast<std::size_t>(2 * nf) * (2 * nf));
  for (int fr = 0; fr < nf; ++fr)
    for (int fc = 0; fc < nf; ++fc) {
      const Mat2 b = dense.block(lat.free_cells()[fr], lat.free_cells()[fc]);
      r[(2 * fr) * (2 * nf) + 2 * fc] = b.a00;
      r[(2 * fr) * (2 * nf) + 2 * fc + 1] = b.a01;
      r[(2 * fr + 1) * (2 * nf) + 2 * fc] = b.a10;
      r[(2 * fr + 1) * (2 * nf) + 2 * fc + 1] = b.a11;
    }
  return r;
}

}  // namespace

TEST_CASE("build_rhs: load scaling and masking") {
  BarInstance inst = make_bar(8);
  VectorField zero;
  for (double v : build_rhs(inst.lattice, zero)) CHECK(v == 0.0);

  const auto rhs = build_rhs(inst.lattice, inst.load);
  const double vol = inst.lattice.cell_volume();
  for (int f = 0; f < inst.lattice.free_count(); ++f) {
    const Vec2 x = inst.lattice.midpoint(inst.lattice.free_cells()[f]);
    if (x.x >= 2.0 - 2.0 * inst.kernel.delta()) {
      CHECK(rhs[2 * f] == 100.0 * vol);
    } else {
      CHECK(rhs[2 * f] == 0.0);
    }
    CHECK(rhs[2 * f + 1] == 0.0);
  }

  // single free cell
  Lattice tiny = build_lattice({{0, 0}, {1, 1}}, 1.0);
  VectorField b12;
  b12.background = {1.0, 2.0};
  const auto r = build_rhs(tiny, b12);
  CHECK(r[0] == tiny.cell_volume() * 1.0);
  CHECK(r[1] == tiny.cell_volume() * 2.0);
}

TEST_CASE("reduced apply equals mask-embed-apply-drop") {
  BarInstance inst = make_bar(8);
  MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
  ReducedSystem sys(op, build_rhs(inst.lattice, inst.load));
  test_util::Uniform u(4);
  std::vector<double> x(sys.dim());
  for (double& v : x) v = u.symmetric();
  std::vector<double> y;
  sys.apply(x, y);

  DisplacementField full = sys.embed(x);
  const auto fv = op.apply(full);
  for (int f = 0; f < inst.lattice.free_count(); ++f) {
    const int c = inst.lattice.free_cells()[f];
    CHECK(y[2 * f] == fv[2 * c]);
    CHECK(y[2 * f + 1] == fv[2 * c + 1]);
  }
}

TEST_CASE("cg: zero rhs, convergence against a dense direct solve") {
  BarInstance inst = make_bar(6);
  MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);

  ReducedSystem zero_sys(op, std::vector<double>(2 * inst.lattice.free_count(), 0.0));
  auto [zfield, zstats] = solve_cg(zero_sys, {}, inst.kernel, inst.weights);
  CHECK(zstats.iterations == 0);
  for (double v : zfield) CHECK(v == 0.0);

  ReducedSystem sys(op, build_rhs(inst.lattice, inst.load));
  SolverParams params;
  params.tol = 1e-12;
  auto [field, stats] = solve_cg(sys, params, inst.kernel, inst.weights);
  CHECK(stats.converged);
  CHECK(stats.final_relative_residual <= 1e-12);

  DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
  const auto direct = cholesky_solve(reduced_dense(dense, inst.lattice), sys.rhs());
  double num = 0.0, den = 0.0;
  for (int f = 0; f < inst.lattice.free_count(); ++f) {
    const int c = inst.lattice.free_cells()[f];
    const double dx = field[2 * c] - direct[2 * f];
    const double dy = field[2 * c + 1] - direct[2 * f + 1];
    num += dx * dx + dy * dy;
    den += direct[2 * f] * direct[2 * f] + direct[2 * f + 1] * direct[2 * f + 1];
  }
  CHECK(std::sqrt(num / den) <= 1e-8);

  // constrained nodes are embedded as exact zeros
  for (int i = 0; i < inst.lattice.cell_count(); ++i)
    if (inst.lattice.constrained(i)) {
      CHECK(field[2 * i] == 0.0);
      CHECK(field[2 * i + 1] == 0.0);
    }
}

TEST_CASE("reduced dense matrix is symmetric positive definite") {
  BarInstance inst = make_bar(8);
  DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
  const auto reduced = reduced_dense(dense, inst.lattice);
  const double lam = smallest_eigenvalue(reduced, 2 * static_cast<std::size_t>(inst.lattice.free_count()));
  CHECK(lam > 0.0);
}

TEST_CASE("jacobi blocks match the dense diagonal and are SPD") {
  BarInstance inst = make_bar(8);
  MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
  JacobiPreconditioner precond(op, inst.kernel, inst.weights);
  DenseOperator dense = assemble_dense(inst.lattice, inst.kernel, inst.weights, inst.material);
  for (int f = 0; f < inst.lattice.free_count(); ++f) {
    const Mat2 expect = dense.block(inst.lattice.free_cells()[f], inst.lattice.free_cells()[f]);
    const Mat2 got = precond.diagonal_block(f);
    CHECK((got - expect).max_abs() <= 1e-12 * expect.max_abs());
    // SPD of a symmetric 2x2: positive trace and determinant
    CHECK(got.a00 + got.a11 > 0.0);
    CHECK(got.a00 * got.a11 - got.a01 * got.a10 > 0.0);
  }

  // constant material: interior diagonal blocks identical
  const int span = inst.weights.stencil_span();
  Mat2 ref{};
  bool have_ref = false;
  for (int f = 0; f < inst.lattice.free_count(); ++f) {
    const int i = inst.lattice.free_cells()[f];
    const int ix = inst.lattice.cell_ix(i), iy = inst.lattice.cell_iy(i);
    if (ix < span || iy < span || ix >= inst.lattice.nx() - span || iy >= inst.lattice.ny() - span)
      continue;
    if (!have_ref) {
      ref = precond.diagonal_block(f);
      have_ref = true;
    }
    CHECK((precond.diagonal_block(f) - ref).max_abs() <= 1e-12 * ref.max_abs());
  }
}

TEST_CASE("jacobi preconditioning does not increase iteration count") {
  const ProblemSpec bar = builtin_problem("bar");
  SolverParams with_precond, without;
  with_precond.precond = Preconditioner::jacobi;
  without.precond = Preconditioner::none;
  auto [f1, s1] = run_problem(bar, 1.0 / 40.0, WeightScheme::paac, with_precond);
  auto [f2, s2] = run_problem(bar, 1.0 / 40.0, WeightScheme::paac, without);
  CHECK(s1.converged);
  CHECK(s2.converged);
  CHECK(s1.iterations <= s2.iterations);
}

TEST_CASE("mirror symmetry: traversal order does not bias the solution") {
  // Solve the bar, then the x-mirrored bar; fields must agree under the
  // mirror map to CG tolerance.
  BarInstance inst = make_bar(10);
  MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
  ReducedSystem sys(op, build_rhs(inst.lattice, inst.load));
  SolverParams params;
  params.tol = 1e-12;
  auto [field, stats] = solve_cg(sys, params, inst.kernel, inst.weights);

  const double delta = inst.kernel.delta();
  Kernel ker = Kernel::inverse_distance(delta);
  Lattice mlat = classify_constrained(build_lattice({{0, 0}, {2, 1}}, inst.lattice.kappa()),
                                      Region::box({2.0 - 2.0 * delta, 0.0}, {2.0 * delta, 1.0}));
  WeightTable mw = build_weights(mlat, ker, WeightScheme::paac);
  ScalarField kf, lf;
  kf.background = 100.0;
  lf.background = 800.0;
  NodalMaterial mmat = compute_nodal_material(mlat, ker, mw, kf, lf);
  MatrixFreeOperator mop(mlat, ker, mw, mmat);
  VectorField mload;
  mload.overrides.push_back({Region::box({0.0, 0.0}, {2.0 * delta, 1.0}), Vec2{-100.0, 0.0}});
  ReducedSystem msys(mop, build_rhs(mlat, mload));
  auto [mfield, mstats] = solve_cg(msys, params, ker, mw);

  CHECK(stats.converged);
  CHECK(mstats.converged);
  double scale = 0.0;
  for (double v : field) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < inst.lattice.cell_count(); ++i) {
    const int ix = inst.lattice.cell_ix(i), iy = inst.lattice.cell_iy(i);
    const int mi = mlat.cell_index(mlat.nx() - 1 - ix, iy);
    CHECK(std::abs(field[2 * i] + mfield[2 * mi]) <= 1e-10 * scale);
    CHECK(std::abs(field[2 * i + 1] - mfield[2 * mi + 1]) <= 1e-10 * scale);
  }
}

TEST_CASE("solver rejects a bad tolerance") {
  BarInstance inst = make_bar(6);
  MatrixFreeOperator op(inst.lattice, inst.kernel, inst.weights, inst.material);
  ReducedSystem sys(op, build_rhs(inst.lattice, inst.load));
  SolverParams params;
  params.tol = 0.0;
  CHECK_THROWS_AS(solve_cg(sys, params, inst.kernel, inst.weights), Error);
}
