// Uniform subdivision of a conforming box domain into half-open square cells,
// classification of constrained cells, and horizon-candidate enumeration.
//
// Cells are ordered row-major (x fastest). Midpoints are never stored; they
// are recomputed from the closed form origin + kappa*(p + 1/2), which keeps
// them exact by construction. Every cell lies fully inside the domain, so
// each cell volume is exactly kappa^2.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/geometry.hpp"

namespace peristatic {

struct BoxDomain {
  Vec2 origin{};
  Vec2 extent{};  // strictly positive components
};

class Lattice {
 public:
  Lattice() = default;
  Lattice(BoxDomain domain, double kappa, int nx, int ny)
      : domain_(domain),
        kappa_(kappa),
        nx_(nx),
        ny_(ny),
        constrained_(static_cast<std::size_t>(nx) * ny, 0),
        free_index_(static_cast<std::size_t>(nx) * ny, 0) {
    free_cells_.resize(cell_count());
    for (int i = 0; i < cell_count(); ++i) {
      free_index_[i] = i;
      free_cells_[i] = i;
    }
  }

  const BoxDomain& domain() const { return domain_; }
  double kappa() const { return kappa_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int cell_count() const { return nx_ * ny_; }
  double cell_volume() const { return kappa_ * kappa_; }

  int cell_index(int ix, int iy) const { return iy * nx_ + ix; }
  int cell_ix(int i) const { return i % nx_; }
  int cell_iy(int i) const { return i / nx_; }

  Vec2 midpoint(int i) const {
    return {domain_.origin.x + kappa_ * (cell_ix(i) + 0.5),
            domain_.origin.y + kappa_ * (cell_iy(i) + 0.5)};
  }
  void cell_bounds(int i, Vec2& lo, Vec2& hi) const {
    lo = {domain_.origin.x + kappa_ * cell_ix(i), domain_.origin.y + kappa_ * cell_iy(i)};
    hi = {domain_.origin.x + kappa_ * (cell_ix(i) + 1), domain_.origin.y + kappa_ * (cell_iy(i) + 1)};
  }

  bool constrained(int i) const { return constrained_[i] != 0; }
  // Contiguous index among free cells, or -1 when constrained.
  int free_index(int i) const { return free_index_[i]; }
  int free_count() const { return static_cast<int>(free_cells_.size()); }
  const std::vector<std::int32_t>& free_cells() const { return free_cells_; }

  void set_constrained(const std::vector<std::uint8_t>& mask) {
    constrained_ = mask;
    free_cells_.clear();
    for (int i = 0; i < cell_count(); ++i) {
      if (constrained_[i]) {
        free_index_[i] = -1;
      } else {
        free_index_[i] = static_cast<std::int32_t>(free_cells_.size());
        free_cells_.push_back(i);
      }
    }
  }

 private:
  BoxDomain domain_{};
  double kappa_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint8_t> constrained_;
  std::vector<std::int32_t> free_index_;
  std::vector<std::int32_t> free_cells_;
};

// Builds the lattice; the domain extent must be an integer multiple of kappa
// in both axes (relative tolerance 1e-12).
inline Lattice build_lattice(const BoxDomain& domain, double kappa) {
  if (!(kappa > 0.0)) throw NonconformingKappa("build_lattice: kappa must be positive");
  if (!(domain.extent.x > 0.0 && domain.extent.y > 0.0))
    throw Error("build_lattice: domain extent must be positive");
  const double fx = domain.extent.x / kappa;
  const double fy = domain.extent.y / kappa;
  const long long nx = std::llround(fx);
  const long long ny = std::llround(fy);
  if (nx < 1 || std::abs(fx - static_cast<double>(nx)) > 1e-12 * fx)
    throw NonconformingKappa("build_lattice: extent.x is not an integer multiple of kappa");
  if (ny < 1 || std::abs(fy - static_cast<double>(ny)) > 1e-12 * fy)
    throw NonconformingKappa("build_lattice: extent.y is not an integer multiple of kappa");
  return Lattice(domain, kappa, static_cast<int>(nx), static_cast<int>(ny));
}

// Marks cell i constrained iff area(B_i intersect theta) exceeds 1e-14*kappa^2.
// Zero-area contact (theta boundary on a cell edge) never constrains a cell.
// Theta reaching outside the domain is clipped, with a warning.
inline Lattice classify_constrained(Lattice lattice, const Region& theta) {
  Vec2 tlo, thi;
  theta.bounds(tlo, thi);
  const Vec2 dlo = lattice.domain().origin;
  const Vec2 dhi = lattice.domain().origin + lattice.domain().extent;
  const double slack = 1e-12 * (lattice.domain().extent.x + lattice.domain().extent.y);
  if (tlo.x < dlo.x - slack || tlo.y < dlo.y - slack || thi.x > dhi.x + slack ||
      thi.y > dhi.y + slack) {
    std::cerr << "peristatic: warning: constraint region extends outside the domain; "
                 "the part outside is ignored\n";
  }

  const double eps_area = 1e-14 * lattice.cell_volume();
  std::vector<std::uint8_t> mask(lattice.cell_count(), 0);
  for (int i = 0; i < lattice.cell_count(); ++i) {
    Vec2 lo, hi;
    lattice.cell_bounds(i, lo, hi);
    if (theta.overlap_area(lo, hi) > eps_area) mask[i] = 1;
  }
  lattice.set_constrained(mask);
  return lattice;
}

// All j != i with ||x_j - x_i|| < radius + sqrt(2)*kappa/2, in row-major
// order, found by scanning the bounding square of cells.
inline std::vector<int> neighbors(const Lattice& lattice, int i, double radius) {
  if (!(radius > 0.0)) throw Error("neighbors: radius must be positive");
  const double kappa = lattice.kappa();
  const double reach = radius + kSqrt2 * kappa / 2.0;
  const int span = static_cast<int>(std::ceil(reach / kappa));
  const int ix = lattice.cell_ix(i);
  const int iy = lattice.cell_iy(i);
  const Vec2 xi = lattice.midpoint(i);

  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(2 * span + 1) * (2 * span + 1));
  const int y0 = std::max(0, iy - span), y1 = std::min(lattice.ny() - 1, iy + span);
  const int x0 = std::max(0, ix - span), x1 = std::min(lattice.nx() - 1, ix + span);
  for (int jy = y0; jy <= y1; ++jy) {
    for (int jx = x0; jx <= x1; ++jx) {
      const int j = lattice.cell_index(jx, jy);
      if (j == i) continue;
      if ((lattice.midpoint(j) - xi).norm() < reach) out.push_back(j);
    }
  }
  return out;
}

}  // namespace peristatic
