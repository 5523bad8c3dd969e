// High-order tensorized Gauss-Legendre evaluation of the pair and triple
// integrals behind the one-point rule, on cell geometries where the horizon
// indicator is identically 1 and the integrand is smooth (non-adjacent cells,
// pair fully inside the horizon). Used to validate the one-point blocks and
// the dense assembly at desk scale; material constants are frozen to scalars
// here so the comparison isolates pure quadrature error.
#pragma once

#include <cmath>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/kernel.hpp"
#include "peristatic/lattice.hpp"

namespace peristatic {

// Gauss-Legendre points per axis on the reference interval [-1/2, 1/2];
// weights sum to 1, exact for polynomials of degree <= 2*order - 1.
class QuadratureRule {
 public:
  explicit QuadratureRule(int order) {
    if (order < 1 || order > 64) throw Error("QuadratureRule: order out of range");
    nodes_.resize(order);
    weights_.resize(order);
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        // Legendre recurrence for P_n(x) and P'_n(x).
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes_[i] = -x / 2.0;
      nodes_[n - 1 - i] = x / 2.0;
      weights_[i] = w / 2.0;
      weights_[n - 1 - i] = w / 2.0;
    }
    if (n % 2 == 1) nodes_[n / 2] = 0.0;
  }

  int order() const { return static_cast<int>(nodes_.size()); }
  double node(int q) const { return nodes_[q]; }
  double weight(int q) const { return weights_[q]; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Square cell described by its midpoint and side length.
struct CellGeom {
  Vec2 center{};
  double side = 0.0;
};

namespace oracle_detail {
inline bool adjacent(const CellGeom& a, const CellGeom& b) {
  const double gap = a.side / 2.0 + b.side / 2.0;
  return std::max(std::abs(a.center.x - b.center.x), std::abs(a.center.y - b.center.y)) <= gap;
}
inline bool pair_in_horizon(const CellGeom& a, const CellGeom& b, double delta) {
  return (a.center - b.center).norm() + kSqrt2 * std::max(a.side, b.side) < delta;
}
}  // namespace oracle_detail

// Gauss value of the pair integral with alpha frozen to a constant:
//   int_{cell_i} int_{cell_j} 2 alpha rho(x'-x)/||x'-x||^2 (x'-x)(x'-x)^T.
inline Mat2 oracle_I1(const CellGeom& cell_i, const CellGeom& cell_j, double alpha_const,
                      const Kernel& kernel, const QuadratureRule& rule) {
  if (oracle_detail::adjacent(cell_i, cell_j))
    throw PairNotSmooth("oracle_I1: cells are adjacent");
  if (!oracle_detail::pair_in_horizon(cell_i, cell_j, kernel.delta()))
    throw PairNotSmooth("oracle_I1: pair not fully inside the horizon");

  const int n = rule.order();
  Mat2 acc{};
  for (int ax = 0; ax < n; ++ax) {
    for (int ay = 0; ay < n; ++ay) {
      const Vec2 x{cell_i.center.x + cell_i.side * rule.node(ax),
                   cell_i.center.y + cell_i.side * rule.node(ay)};
      const double wx = rule.weight(ax) * rule.weight(ay);
      for (int bx = 0; bx < n; ++bx) {
        for (int by = 0; by < n; ++by) {
          const Vec2 xp{cell_j.center.x + cell_j.side * rule.node(bx),
                        cell_j.center.y + cell_j.side * rule.node(by)};
          const Vec2 e = xp - x;
          const double r2 = e.norm_sq();
          const double f = 2.0 * alpha_const * kernel.rho(e) / r2;
          acc += outer(e, e) * (wx * rule.weight(bx) * rule.weight(by) * f);
        }
      }
    }
  }
  const double vi = cell_i.side * cell_i.side;
  const double vj = cell_j.side * cell_j.side;
  return acc * (vi * vj);
}

// Gauss value of the triple integral with tau frozen to a constant:
//   int_{cell_i} tau [int_{cell_j} (x'-x) rho(x'-x) dx'] [int_{cell_m} (p-x) rho(p-x) dp]^T dx.
inline Mat2 oracle_I2(const CellGeom& cell_i, const CellGeom& cell_j, const CellGeom& cell_m,
                      double tau_const, const Kernel& kernel, const QuadratureRule& rule) {
  if (oracle_detail::adjacent(cell_i, cell_j) || oracle_detail::adjacent(cell_i, cell_m) ||
      oracle_detail::adjacent(cell_j, cell_m))
    throw TripleNotSmooth("oracle_I2: cells are adjacent");
  if (!oracle_detail::pair_in_horizon(cell_i, cell_j, kernel.delta()) ||
      !oracle_detail::pair_in_horizon(cell_i, cell_m, kernel.delta()))
    throw TripleNotSmooth("oracle_I2: a bond pair is not fully inside the horizon");

  const int n = rule.order();
  auto bond_integral = [&](const CellGeom& cell, Vec2 x) {
    Vec2 acc{};
    for (int bx = 0; bx < n; ++bx) {
      for (int by = 0; by < n; ++by) {
        const Vec2 xp{cell.center.x + cell.side * rule.node(bx),
                      cell.center.y + cell.side * rule.node(by)};
        const Vec2 e = xp - x;
        acc = acc + e * (rule.weight(bx) * rule.weight(by) * kernel.rho(e));
      }
    }
    return acc * (cell.side * cell.side);
  };

  Mat2 acc{};
  for (int ax = 0; ax < n; ++ax) {
    for (int ay = 0; ay < n; ++ay) {
      const Vec2 x{cell_i.center.x + cell_i.side * rule.node(ax),
                   cell_i.center.y + cell_i.side * rule.node(ay)};
      const Vec2 a = bond_integral(cell_j, x);
      const Vec2 b = bond_integral(cell_m, x);
      acc += outer(a, b) * (rule.weight(ax) * rule.weight(ay));
    }
  }
  return acc * (tau_const * cell_i.side * cell_i.side);
}

inline CellGeom cell_geom(const Lattice& lattice, int i) {
  return {lattice.midpoint(i), lattice.kappa()};
}

inline Mat2 oracle_I1(const Lattice& lattice, int i, int j, double alpha_const,
                      const Kernel& kernel, const QuadratureRule& rule) {
  return oracle_I1(cell_geom(lattice, i), cell_geom(lattice, j), alpha_const, kernel, rule);
}

inline Mat2 oracle_I2(const Lattice& lattice, int i, int j, int m, double tau_const,
                      const Kernel& kernel, const QuadratureRule& rule) {
  return oracle_I2(cell_geom(lattice, i), cell_geom(lattice, j), cell_geom(lattice, m), tau_const,
                   kernel, rule);
}

}  // namespace peristatic
