// Reduced linear system over the free nodes and its conjugate-gradient
// solver. The reduced operator is the full matrix-free apply with constrained
// entries forced to zero on input and dropped on output, which equals the
// row/column-deleted matrix. Solutions are embedded back with exact zeros on
// constrained nodes.
#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/material.hpp"
#include "peristatic/peri_operator.hpp"

namespace peristatic {

enum class Preconditioner { none, jacobi };

struct SolverParams {
  double tol = 1e-10;          // relative residual target
  int max_iter = 0;            // 0 = 20 * sqrt(reduced dimension)
  Preconditioner precond = Preconditioner::jacobi;
};

struct SolveStats {
  int iterations = 0;
  double final_relative_residual = 0.0;
  double wall_seconds = 0.0;
  bool converged = true;
};

// Entry for free node i is V_i * b(x_i); constrained nodes are omitted.
inline std::vector<double> build_rhs(const Lattice& lattice, const VectorField& load) {
  std::vector<double> rhs(2 * static_cast<std::size_t>(lattice.free_count()));
  const double vol = lattice.cell_volume();
  for (int f = 0; f < lattice.free_count(); ++f) {
    const Vec2 b = load(lattice.midpoint(lattice.free_cells()[f]));
    rhs[2 * f] = vol * b.x;
    rhs[2 * f + 1] = vol * b.y;
  }
  return rhs;
}

class ReducedSystem {
 public:
  ReducedSystem(const MatrixFreeOperator& op, std::vector<double> rhs)
      : op_(&op), rhs_(std::move(rhs)) {
    if (static_cast<int>(rhs_.size()) != 2 * op.lattice().free_count())
      throw DimensionMismatch("ReducedSystem: rhs size does not match free node count");
  }

  const MatrixFreeOperator& op() const { return *op_; }
  const Lattice& lattice() const { return op_->lattice(); }
  const std::vector<double>& rhs() const { return rhs_; }
  int dim() const { return static_cast<int>(rhs_.size()); }

  // y = B~ x on free-node vectors.
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const Lattice& lat = lattice();
    full_u_.assign(2 * static_cast<std::size_t>(lat.cell_count()), 0.0);
    for (int f = 0; f < lat.free_count(); ++f) {
      const int c = lat.free_cells()[f];
      full_u_[2 * c] = x[2 * f];
      full_u_[2 * c + 1] = x[2 * f + 1];
    }
    op_->apply(full_u_, full_v_);
    y.resize(x.size());
    for (int f = 0; f < lat.free_count(); ++f) {
      const int c = lat.free_cells()[f];
      y[2 * f] = full_v_[2 * c];
      y[2 * f + 1] = full_v_[2 * c + 1];
    }
  }

  // Embeds a reduced vector into the full lattice (zeros on constrained nodes).
  DisplacementField embed(const std::vector<double>& x) const {
    const Lattice& lat = lattice();
    DisplacementField u(2 * static_cast<std::size_t>(lat.cell_count()), 0.0);
    for (int f = 0; f < lat.free_count(); ++f) {
      const int c = lat.free_cells()[f];
      u[2 * c] = x[2 * f];
      u[2 * c + 1] = x[2 * f + 1];
    }
    return u;
  }

 private:
  const MatrixFreeOperator* op_;
  std::vector<double> rhs_;
  mutable DisplacementField full_u_, full_v_;
};

// Inverted 2x2 diagonal blocks of B^num over the free nodes. The diagonal
// block of node i is assembled directly:
//   V_i tau_i g_i g_i^T
//   + sum_m V_m V_i^2 tau_m rho_mi^2 w_mi^2 e_mi e_mi^T
//   + sum_m I1_im.
class JacobiPreconditioner {
 public:
  JacobiPreconditioner(const MatrixFreeOperator& op, const Kernel& kernel,
                       const WeightTable& weights) {
    const Lattice& lat = op.lattice();
    const NodalMaterial& mat = op.material();
    const double vol = lat.cell_volume();
    inv_.resize(lat.free_count());
    diag_.resize(lat.free_count());
    for (int f = 0; f < lat.free_count(); ++f) {
      const int i = lat.free_cells()[f];
      const Vec2 xi = lat.midpoint(i);
      Mat2 blk = outer(op.g(i), op.g(i)) * (vol * mat.tau[i]);
      weights.for_each_neighbor(i, [&](int m, double w) {
        const Vec2 bim = lat.midpoint(m) - xi;
        const double rho = kernel.rho(bim);
        if (mat.tau[m] != 0.0)
          blk += outer(bim, bim) * (vol * vol * vol * mat.tau[m] * rho * rho * w * w);
        blk += i1_block(bim, vol, vol, rho, mat.alpha[i], mat.alpha[m], w);
      });
      diag_[f] = blk;
      const double det = blk.a00 * blk.a11 - blk.a01 * blk.a10;
      const double scale = blk.max_abs();
      if (!(std::abs(det) > 1e-30 * scale * scale))
        throw SingularBlock("jacobi_precondition: singular diagonal block at node " + std::to_string(i));
      inv_[f] = Mat2{blk.a11, -blk.a01, -blk.a10, blk.a00} * (1.0 / det);
    }
  }

  const Mat2& diagonal_block(int f) const { return diag_[f]; }

  void apply(const std::vector<double>& r, std::vector<double>& z) const {
    z.resize(r.size());
    for (std::size_t f = 0; f < inv_.size(); ++f) {
      const Vec2 zi = inv_[f] * Vec2{r[2 * f], r[2 * f + 1]};
      z[2 * f] = zi.x;
      z[2 * f + 1] = zi.y;
    }
  }

 private:
  std::vector<Mat2> inv_;
  std::vector<Mat2> diag_;
};

inline JacobiPreconditioner jacobi_precondition(const ReducedSystem& system, const Kernel& kernel,
                                                const WeightTable& weights) {
  return JacobiPreconditioner(system.op(), kernel, weights);
}

namespace cg_detail {
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace cg_detail

// Preconditioned conjugate gradient; returns the solution embedded on the
// full lattice. The residual reported in the stats is recomputed from a
// fresh apply after the iteration ends.
inline std::pair<DisplacementField, SolveStats> solve_cg(const ReducedSystem& system,
                                                         const SolverParams& params,
                                                         const Kernel& kernel,
                                                         const WeightTable& weights) {
  using clock = std::chrono::steady_clock;
  if (!(params.tol > 0.0 && params.tol < 1.0)) throw Error("solve_cg: tol must be in (0, 1)");
  const auto t0 = clock::now();
  const int n = system.dim();
  SolveStats stats;

  std::vector<double> x(n, 0.0);
  const std::vector<double>& b = system.rhs();
  const double bnorm = std::sqrt(cg_detail::dot(b, b));
  if (bnorm == 0.0) {
    stats.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return {system.embed(x), stats};
  }

  const int max_iter =
      params.max_iter > 0 ? params.max_iter : static_cast<int>(std::ceil(20.0 * std::sqrt(double(n))));
  std::optional<JacobiPreconditioner> precond;
  if (params.precond == Preconditioner::jacobi) precond.emplace(system.op(), kernel, weights);

  std::vector<double> r = b;  // x0 = 0
  std::vector<double> z, p, ap;
  if (precond)
    precond->apply(r, z);
  else
    z = r;
  p = z;
  double rz = cg_detail::dot(r, z);

  int it = 0;
  double rel = 1.0;
  for (; it < max_iter; ++it) {
    rel = std::sqrt(cg_detail::dot(r, r)) / bnorm;
    if (rel <= params.tol) break;
    system.apply(p, ap);
    const double pap = cg_detail::dot(p, ap);
    if (!(pap > 0.0)) break;  // loss of positive definiteness; bail out
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    if (precond)
      precond->apply(r, z);
    else
      z = r;
    const double rz_new = cg_detail::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  // Independent residual check.
  system.apply(x, ap);
  double rr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = ap[i] - b[i];
    rr += d * d;
  }
  stats.iterations = it;
  stats.final_relative_residual = std::sqrt(rr) / bnorm;
  stats.converged = stats.final_relative_residual <= params.tol;
  stats.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return {system.embed(x), stats};
}

}  // namespace peristatic
