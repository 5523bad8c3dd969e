// The discrete quadratic form B^num, realized three ways that are checked
// against each other by the test suite:
//
//   * assemble_dense   - literal block assembly, the bounded-size oracle
//   * MatrixFreeOperator::apply - production path, O(N * stencil)
//   * MatrixFreeOperator::energy - potential form, u^T B u = 2 * energy(u)
//
// apply returns the algebraic matrix product B^num u. The per-volume operator
// form carries an extra 1/V_i per block; that convention is never mixed in
// here.
//
// The matrix-free apply uses the operator's split into a bond part and three
// dilatation couplings. With the per-node scalars
//
//   theta_i = sum_j w_ij V_j rho_ij (x_j - x_i) . (u_j - u_i)
//   g_i     = sum_j w_ij V_j rho_ij (x_j - x_i)
//
// the three couplings collapse algebraically (their g.u parts cancel) to
//
//   v_i = V_i sum_j w_ij V_j rho_ij [ (alpha_i + alpha_j)
//             * (e_ij . (u_i - u_j)) / ||e_ij||^2  -  tau_j theta_j ] e_ij
//         - V_i tau_i theta_i g_i,
//
// which is exactly the dense matrix product, at O(N * stencil) instead of
// O(N * stencil^2). Every per-node sum runs in fixed row-major neighbor
// order, so results are bit-identical for any thread count.
#pragma once

#include <cmath>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/kernel.hpp"
#include "peristatic/lattice.hpp"
#include "peristatic/material.hpp"
#include "peristatic/parallel.hpp"
#include "peristatic/weights.hpp"

namespace peristatic {

// Displacements are stored node-major: (u_i^x, u_i^y) contiguous, row-major
// cell order, length 2 * cell_count.
using DisplacementField = std::vector<double>;

// One-point value of the I^1 integral for a pair (bond stiffness block).
inline Mat2 i1_block(Vec2 bond, double vol_i, double vol_j, double rho, double alpha_i,
                     double alpha_j, double w) {
  const double r2 = bond.norm_sq();
  return outer(bond, bond) * (vol_i * vol_j * rho * (alpha_i + alpha_j) * w / r2);
}

// One-point value of the I^2 integral for a triple centered at i.
inline Mat2 i2_block(Vec2 bond_ij, Vec2 bond_im, double vol_i, double vol_j, double vol_m,
                     double tau_i, double rho_ij, double rho_im, double w_ij, double w_im) {
  return outer(bond_ij, bond_im) * (vol_i * vol_j * vol_m * tau_i * rho_ij * rho_im * w_ij * w_im);
}

inline Mat2 integral_I1_num(const Lattice& lattice, const Kernel& kernel, const WeightTable& weights,
                            const NodalMaterial& mat, int i, int j) {
  const Vec2 bond = lattice.midpoint(j) - lattice.midpoint(i);
  const double v = lattice.cell_volume();
  return i1_block(bond, v, v, kernel.rho(bond), mat.alpha[i], mat.alpha[j], weights.weight(i, j));
}

inline Mat2 integral_I2_num(const Lattice& lattice, const Kernel& kernel, const WeightTable& weights,
                            const NodalMaterial& mat, int i, int j, int m) {
  const Vec2 xi = lattice.midpoint(i);
  const Vec2 bij = lattice.midpoint(j) - xi;
  const Vec2 bim = lattice.midpoint(m) - xi;
  const double v = lattice.cell_volume();
  return i2_block(bij, bim, v, v, v, mat.tau[i], kernel.rho(bij), kernel.rho(bim),
                  weights.weight(i, j), weights.weight(i, m));
}

// Which terms to assemble / apply. `automatic` drops the dilatation terms
// exactly when every tau is 0 (bond-based data), which also makes the full
// assembly bit-identical to the bond-only one.
enum class OperatorTerms { automatic_terms, full, bond_only };

class DenseOperator {
 public:
  explicit DenseOperator(int n_nodes)
      : n_(n_nodes), a_(static_cast<std::size_t>(2 * n_nodes) * (2 * n_nodes), 0.0) {}

  int node_count() const { return n_; }
  int dim() const { return 2 * n_; }
  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * dim() + c]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * dim() + c]; }
  const std::vector<double>& data() const { return a_; }

  void add_block(int i, int j, const Mat2& b) {
    at(2 * i, 2 * j) += b.a00;
    at(2 * i, 2 * j + 1) += b.a01;
    at(2 * i + 1, 2 * j) += b.a10;
    at(2 * i + 1, 2 * j + 1) += b.a11;
  }

  Mat2 block(int i, int j) const {
    return {at(2 * i, 2 * j), at(2 * i, 2 * j + 1), at(2 * i + 1, 2 * j), at(2 * i + 1, 2 * j + 1)};
  }

  DisplacementField apply(const DisplacementField& u) const {
    if (static_cast<int>(u.size()) != dim()) throw DimensionMismatch("DenseOperator::apply");
    DisplacementField v(u.size(), 0.0);
    for (int r = 0; r < dim(); ++r) {
      double s = 0.0;
      for (int c = 0; c < dim(); ++c) s += at(r, c) * u[c];
      v[r] = s;
    }
    return v;
  }

  double max_abs_row_sum() const {
    double best = 0.0;
    for (int r = 0; r < dim(); ++r) {
      double s = 0.0;
      for (int c = 0; c < dim(); ++c) s += std::abs(at(r, c));
      if (s > best) best = s;
    }
    return best;
  }

  double max_abs() const {
    double best = 0.0;
    for (double x : a_)
      if (std::abs(x) > best) best = std::abs(x);
    return best;
  }

 private:
  int n_;
  std::vector<double> a_;
};

// Literal assembly of B^num block by block. Off-diagonal blocks:
// sum_m I2_mij - sum_m I2_imj - sum_m I2_jim - I1_ij; diagonal blocks:
// double I2 sum plus sum_m I2_mii plus sum_m I1_im. O(N * stencil^2);
// guarded as the oracle path.
inline DenseOperator assemble_dense(const Lattice& lattice, const Kernel& kernel,
                                    const WeightTable& weights, const NodalMaterial& mat,
                                    OperatorTerms terms = OperatorTerms::full) {
  const int n = lattice.cell_count();
  if (n > 5000) throw TooLargeForDense("assemble_dense: more than 5000 cells");
  const bool with_state = terms != OperatorTerms::bond_only;
  const double vol = lattice.cell_volume();
  const double v3 = vol * vol * vol;

  // Midpoints and per-node candidate lists, reused across blocks.
  std::vector<Vec2> x(n);
  for (int i = 0; i < n; ++i) x[i] = lattice.midpoint(i);
  std::vector<std::vector<std::pair<int, double>>> nbrs(n);
  for (int i = 0; i < n; ++i)
    weights.for_each_neighbor(i, [&](int j, double w) { nbrs[i].push_back({j, w}); });

  DenseOperator op(n);
  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t ii = b; ii < e; ++ii) {
          const int i = static_cast<int>(ii);
          for (int j = 0; j < n; ++j) {
            Mat2 acc{};
            if (i == j) {
              if (with_state && mat.tau[i] != 0.0) {
                for (const auto& [nn, w_in] : nbrs[i]) {
                  const Vec2 bin = x[nn] - x[i];
                  const double rin = kernel.rho(bin);
                  for (const auto& [m, w_im] : nbrs[i]) {
                    const Vec2 bim = x[m] - x[i];
                    acc += outer(bin, bim) * (v3 * mat.tau[i] * rin * kernel.rho(bim) * w_in * w_im);
                  }
                }
              }
              if (with_state) {
                for (const auto& [m, w_mi] : nbrs[i]) {
                  if (mat.tau[m] == 0.0) continue;
                  const Vec2 bmi = x[i] - x[m];
                  const double rmi = kernel.rho(bmi);
                  acc += outer(bmi, bmi) * (v3 * mat.tau[m] * rmi * rmi * w_mi * w_mi);
                }
              }
              for (const auto& [m, w_im] : nbrs[i]) {
                const Vec2 bim = x[m] - x[i];
                acc += i1_block(bim, vol, vol, kernel.rho(bim), mat.alpha[i], mat.alpha[m], w_im);
              }
            } else {
              const Vec2 bij = x[j] - x[i];
              const double w_ij = weights.weight(i, j);
              if (with_state) {
                // sum over m interacting with both i and j, centered at m
                for (const auto& [m, w_mi] : nbrs[i]) {
                  if (m == j || mat.tau[m] == 0.0) continue;
                  const double w_mj = weights.weight(m, j);
                  if (w_mj == 0.0) continue;
                  const Vec2 bmi = x[i] - x[m];
                  const Vec2 bmj = x[j] - x[m];
                  acc += outer(bmi, bmj) * (v3 * mat.tau[m] * kernel.rho(bmi) * kernel.rho(bmj) * w_mi * w_mj);
                }
                if (mat.tau[i] != 0.0 && w_ij > 0.0) {
                  const double rij = kernel.rho(bij);
                  for (const auto& [m, w_im] : nbrs[i]) {
                    const Vec2 bim = x[m] - x[i];
                    acc += outer(bim, bij) * (-v3 * mat.tau[i] * kernel.rho(bim) * rij * w_im * w_ij);
                  }
                }
                if (mat.tau[j] != 0.0 && w_ij > 0.0) {
                  const Vec2 bji = x[i] - x[j];
                  const double rji = kernel.rho(bji);
                  for (const auto& [m, w_jm] : nbrs[j]) {
                    const Vec2 bjm = x[m] - x[j];
                    acc += outer(bji, bjm) * (-v3 * mat.tau[j] * rji * kernel.rho(bjm) * w_jm * w_ij);
                  }
                }
              }
              if (w_ij > 0.0)
                acc += i1_block(bij, vol, vol, kernel.rho(bij), mat.alpha[i], mat.alpha[j], w_ij) * -1.0;
            }
            op.add_block(i, j, acc);
          }
        }
      },
      1);
  return op;
}

namespace op_detail {
// Dispatches the hot loops on a concrete rho(r^2) evaluator.
template <class F>
auto with_rho(const Kernel& kernel, const F& f) {
  switch (kernel.variant()) {
    case KernelVariant::inverse_distance:
      return f([](double r2) { return 1.0 / std::sqrt(r2); });
    case KernelVariant::constant: {
      const double c = kernel.rho_at_distance(1.0);
      return f([c](double) { return c; });
    }
    default: {
      const Kernel* k = &kernel;
      return f([k](double r2) { return k->rho_at_distance(std::sqrt(r2)); });
    }
  }
}
}  // namespace op_detail

class MatrixFreeOperator {
 public:
  MatrixFreeOperator(const Lattice& lattice, const Kernel& kernel, const WeightTable& weights,
                     const NodalMaterial& mat)
      : lattice_(&lattice), kernel_(&kernel), weights_(&weights), mat_(&mat) {
    const int n = lattice.cell_count();
    mx_.resize(n);
    my_.resize(n);
    for (int i = 0; i < n; ++i) {
      const Vec2 p = lattice.midpoint(i);
      mx_[i] = p.x;
      my_[i] = p.y;
    }
    gx_.assign(n, 0.0);
    gy_.assign(n, 0.0);
    const double vol = lattice.cell_volume();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
      for (std::size_t ii = b; ii < e; ++ii) {
        const int i = static_cast<int>(ii);
        double gx = 0.0, gy = 0.0;
        weights.for_each_neighbor(i, [&](int j, double w) {
          const Vec2 bond{mx_[j] - mx_[i], my_[j] - my_[i]};
          const double c = w * vol * kernel.rho(bond);
          gx += c * bond.x;
          gy += c * bond.y;
        });
        gx_[i] = gx;
        gy_[i] = gy;
      }
    });
    has_state_ = false;
    for (int i = 0; i < n; ++i)
      if (mat.tau[i] != 0.0) {
        has_state_ = true;
        break;
      }
  }

  const Lattice& lattice() const { return *lattice_; }
  const NodalMaterial& material() const { return *mat_; }
  // Weighted bond-vector sum per node; vanishes on full symmetric stencils.
  Vec2 g(int i) const { return {gx_[i], gy_[i]}; }
  bool has_state_terms() const { return has_state_; }

  // v = B^num u (matrix product convention).
  void apply(const DisplacementField& u, DisplacementField& v,
             OperatorTerms terms = OperatorTerms::automatic_terms) const {
    const int n = lattice_->cell_count();
    if (static_cast<int>(u.size()) != 2 * n) throw DimensionMismatch("MatrixFreeOperator::apply");
    v.assign(u.size(), 0.0);
    const bool state = terms == OperatorTerms::full || (terms == OperatorTerms::automatic_terms && has_state_);
    op_detail::with_rho(*kernel_, [&](auto rho) {
      if (state) {
        std::vector<double> theta(n);
        compute_theta(u, theta, rho);
        pass2(u, theta, v, rho);
      } else {
        pass2_bond_only(u, v, rho);
      }
    });
  }

  DisplacementField apply(const DisplacementField& u,
                          OperatorTerms terms = OperatorTerms::automatic_terms) const {
    DisplacementField v;
    apply(u, v, terms);
    return v;
  }

  // sum_i V_i W^num(u, x_i); satisfies u^T (B u) = 2 * energy(u).
  double energy(const DisplacementField& u) const {
    const int n = lattice_->cell_count();
    if (static_cast<int>(u.size()) != 2 * n) throw DimensionMismatch("MatrixFreeOperator::energy");
    const double vol = lattice_->cell_volume();
    return op_detail::with_rho(*kernel_, [&](auto rho) {
      std::vector<double> theta(n);
      compute_theta(u, theta, rho);
      return deterministic_sum(static_cast<std::size_t>(n), [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        const double ux = u[2 * i], uy = u[2 * i + 1];
        const double dil = theta[i] / mat_->m[i];
        double dev = 0.0;  // weighted squared deviatoric bond terms
        weights_->for_each_neighbor(i, [&](int j, double w) {
          const double ex = mx_[j] - mx_[i];
          const double ey = my_[j] - my_[i];
          const double r2 = ex * ex + ey * ey;
          const double proj = ex * (u[2 * j] - ux) + ey * (u[2 * j + 1] - uy);
          const double q = proj / r2 - dil;
          dev += w * vol * rho(r2) * r2 * q * q;
        });
        const double tr = kDim * dil;
        const double w_density = 0.5 * mat_->k[i] * tr * tr + 0.5 * mat_->alpha[i] * dev;
        return vol * w_density;
      });
    });
  }

 private:
  template <class Rho>
  void compute_theta(const DisplacementField& u, std::vector<double>& theta, const Rho& rho) const {
    const double vol = lattice_->cell_volume();
    parallel_for(static_cast<std::size_t>(theta.size()), [&](std::size_t b, std::size_t e) {
      for (std::size_t ii = b; ii < e; ++ii) {
        const int i = static_cast<int>(ii);
        const double ux = u[2 * i], uy = u[2 * i + 1];
        double th = 0.0;
        weights_->for_each_neighbor(i, [&](int j, double w) {
          const double ex = mx_[j] - mx_[i];
          const double ey = my_[j] - my_[i];
          th += w * vol * rho(ex * ex + ey * ey) *
                (ex * (u[2 * j] - ux) + ey * (u[2 * j + 1] - uy));
        });
        theta[i] = th;
      }
    });
  }

  template <class Rho>
  void pass2(const DisplacementField& u, const std::vector<double>& theta, DisplacementField& v,
             const Rho& rho) const {
    const double vol = lattice_->cell_volume();
    const auto& alpha = mat_->alpha;
    const auto& tau = mat_->tau;
    parallel_for(static_cast<std::size_t>(theta.size()), [&](std::size_t b, std::size_t e) {
      for (std::size_t ii = b; ii < e; ++ii) {
        const int i = static_cast<int>(ii);
        const double ux = u[2 * i], uy = u[2 * i + 1];
        const double ai = alpha[i];
        double vx = 0.0, vy = 0.0;
        weights_->for_each_neighbor(i, [&](int j, double w) {
          const double ex = mx_[j] - mx_[i];
          const double ey = my_[j] - my_[i];
          const double r2 = ex * ex + ey * ey;
          const double proj = ex * (ux - u[2 * j]) + ey * (uy - u[2 * j + 1]);
          const double coef = w * vol * rho(r2) * ((ai + alpha[j]) * proj / r2 - tau[j] * theta[j]);
          vx += coef * ex;
          vy += coef * ey;
        });
        const double ti = vol * tau[i] * theta[i];
        v[2 * i] = vol * vx - ti * gx_[i];
        v[2 * i + 1] = vol * vy - ti * gy_[i];
      }
    });
  }

  template <class Rho>
  void pass2_bond_only(const DisplacementField& u, DisplacementField& v, const Rho& rho) const {
    const double vol = lattice_->cell_volume();
    const auto& alpha = mat_->alpha;
    parallel_for(static_cast<std::size_t>(lattice_->cell_count()), [&](std::size_t b, std::size_t e) {
      for (std::size_t ii = b; ii < e; ++ii) {
        const int i = static_cast<int>(ii);
        const double ux = u[2 * i], uy = u[2 * i + 1];
        const double ai = alpha[i];
        double vx = 0.0, vy = 0.0;
        weights_->for_each_neighbor(i, [&](int j, double w) {
          const double ex = mx_[j] - mx_[i];
          const double ey = my_[j] - my_[i];
          const double r2 = ex * ex + ey * ey;
          const double proj = ex * (ux - u[2 * j]) + ey * (uy - u[2 * j + 1]);
          // grouped exactly like the state-based pass so that tau == 0 data
          // produces the same values on either path
          const double coef = w * vol * rho(r2) * ((ai + alpha[j]) * proj / r2);
          vx += coef * ex;
          vy += coef * ey;
        });
        v[2 * i] = vol * vx;
        v[2 * i + 1] = vol * vy;
      }
    });
  }

  const Lattice* lattice_;
  const Kernel* kernel_;
  const WeightTable* weights_;
  const NodalMaterial* mat_;
  std::vector<double> mx_, my_;
  std::vector<double> gx_, gy_;
  bool has_state_ = false;
};

}  // namespace peristatic
