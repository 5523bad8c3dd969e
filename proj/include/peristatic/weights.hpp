// Quadrature weights w_ij replacing the horizon indicator.
//
//   FA:   w_ij = 1 if ||x_j - x_i|| < delta, else 0
//   PAAC: w_ij = area(cell_j intersect B_delta(x_i)) / V_j
//
// On a conforming uniform lattice both depend only on the cell offset
// x_j - x_i, so built-in tables are stored as a small offset stencil instead
// of an explicit (i, j) map; the per-pair view is preserved by the lookup and
// iteration API. Custom tables keep explicit per-pair entries (CSR) and must
// pass the consistency rules below before they are allowed anywhere near the
// operator:
//
//   (a) w_ij = 0 when ||x_i - x_j|| >= delta + sqrt(2) kappa / 2
//   (b) w_ij = 1 when ||x_i - x_j|| <= delta - sqrt(2) kappa / 2
//   (c) 0 <= w_ij <= 1
//   (d) w_ij = w_ji
//
// (a) and (b) are forced exactly during construction; PAAC symmetry (d) is
// exact because one canonical offset orientation is computed and mirrored.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/geometry.hpp"
#include "peristatic/kernel.hpp"
#include "peristatic/lattice.hpp"

namespace peristatic {

enum class WeightScheme { fa, paac, custom };

inline const char* to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::fa: return "FA";
    case WeightScheme::paac: return "PAAC";
    case WeightScheme::custom: return "custom";
  }
  return "?";
}

// FA weight for a single pair: the half-open horizon indicator.
inline double weight_fa(Vec2 x_i, Vec2 x_j, double delta) {
  return (x_j - x_i).norm() < delta ? 1.0 : 0.0;
}

class WeightTable {
 public:
  WeightScheme scheme() const { return scheme_; }
  double delta() const { return delta_; }
  double kappa() const { return kappa_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  bool stencil_backed() const { return scheme_ != WeightScheme::custom; }
  int stencil_span() const { return span_; }

  double stencil_value(int dx, int dy) const {
    if (std::abs(dx) > span_ || std::abs(dy) > span_) return 0.0;
    return stencil_[(dy + span_) * (2 * span_ + 1) + (dx + span_)];
  }

  double weight(int i, int j) const {
    if (i == j) return 0.0;
    if (stencil_backed()) {
      const int dx = j % nx_ - i % nx_;
      const int dy = j / nx_ - i / nx_;
      return stencil_value(dx, dy);
    }
    const auto b = csr_row_.begin() + row_ptr_[i];
    const auto e = csr_row_.begin() + row_ptr_[i + 1];
    auto it = std::lower_bound(b, e, j, [](const Entry& en, int jj) { return en.j < jj; });
    return (it != e && it->j == j) ? it->w : 0.0;
  }

  // Visits the stored positive-weight neighbors of i in row-major j order.
  template <class F>
  void for_each_neighbor(int i, const F& f) const {
    if (stencil_backed()) {
      const int ix = i % nx_;
      const int iy = i / nx_;
      const int side = 2 * span_ + 1;
      const int y0 = std::max(-span_, -iy), y1 = std::min(span_, ny_ - 1 - iy);
      const int x0 = std::max(-span_, -ix), x1 = std::min(span_, nx_ - 1 - ix);
      for (int dy = y0; dy <= y1; ++dy) {
        const double* row = stencil_.data() + (dy + span_) * side + span_;
        const int jbase = i + dy * nx_;
        for (int dx = x0; dx <= x1; ++dx) {
          const double w = row[dx];
          if (w > 0.0) f(jbase + dx, w);
        }
      }
      return;
    }
    for (int e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
      if (csr_row_[e].w > 0.0) f(csr_row_[e].j, csr_row_[e].w);
  }

  // Visits every stored entry, including explicit zeros (dump / validation).
  template <class F>
  void for_each_stored(const F& f) const {
    if (stencil_backed()) {
      const int side = 2 * span_ + 1;
      for (int i = 0; i < nx_ * ny_; ++i) {
        const int ix = i % nx_;
        const int iy = i / nx_;
        const int y0 = std::max(-span_, -iy), y1 = std::min(span_, ny_ - 1 - iy);
        const int x0 = std::max(-span_, -ix), x1 = std::min(span_, nx_ - 1 - ix);
        for (int dy = y0; dy <= y1; ++dy)
          for (int dx = x0; dx <= x1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double w = stencil_[(dy + span_) * side + (dx + span_)];
            if (w > 0.0) f(i, i + dy * nx_ + dx, w);
          }
      }
      return;
    }
    for (int i = 0; i < nx_ * ny_; ++i)
      for (int e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) f(i, csr_row_[e].j, csr_row_[e].w);
  }

  static WeightTable built_in(const Lattice& lattice, const Kernel& kernel, WeightScheme scheme);
  static WeightTable custom(const Lattice& lattice, double delta,
                            const std::vector<std::tuple<int, int, double>>& entries);

 private:
  struct Entry {
    int j;
    double w;
  };

  WeightScheme scheme_ = WeightScheme::fa;
  double delta_ = 0.0;
  double kappa_ = 0.0;
  int nx_ = 0, ny_ = 0;
  int span_ = 0;
  std::vector<double> stencil_;      // built-in schemes
  std::vector<int> row_ptr_;         // custom scheme (CSR)
  std::vector<Entry> csr_row_;
};

inline WeightTable WeightTable::built_in(const Lattice& lattice, const Kernel& kernel,
                                         WeightScheme scheme) {
  const double kappa = lattice.kappa();
  const double delta = kernel.delta();
  if (!(kappa < delta / kSqrt2))
    throw KappaTooLarge("build_weights: kappa must be smaller than delta/sqrt(2)");

  WeightTable t;
  t.scheme_ = scheme;
  t.delta_ = delta;
  t.kappa_ = kappa;
  t.nx_ = lattice.nx();
  t.ny_ = lattice.ny();

  const double half_diag = kSqrt2 * kappa / 2.0;
  const int span = static_cast<int>(std::ceil((delta + half_diag) / kappa));
  t.span_ = span;
  const int side = 2 * span + 1;
  t.stencil_.assign(static_cast<std::size_t>(side) * side, 0.0);

  auto slot = [&](int dx, int dy) -> double& {
    return t.stencil_[(dy + span) * side + (dx + span)];
  };

  for (int dy = 0; dy <= span; ++dy) {
    for (int dx = (dy == 0 ? 1 : -span); dx <= span; ++dx) {
      const double dist = kappa * std::hypot(static_cast<double>(dx), static_cast<double>(dy));
      double w = 0.0;
      if (scheme == WeightScheme::fa) {
        w = dist < delta ? 1.0 : 0.0;
      } else {
        if (dist >= delta + half_diag) {
          w = 0.0;
        } else if (dist <= delta - half_diag) {
          w = 1.0;
        } else {
          const Vec2 c{kappa * dx, kappa * dy};
          const double area = circle_box_area({0.0, 0.0}, delta,
                                              {c.x - kappa / 2.0, c.y - kappa / 2.0},
                                              {c.x + kappa / 2.0, c.y + kappa / 2.0});
          w = std::clamp(area / (kappa * kappa), 0.0, 1.0);
        }
      }
      slot(dx, dy) = w;
      slot(-dx, -dy) = w;
    }
  }
  return t;
}

inline WeightTable WeightTable::custom(const Lattice& lattice, double delta,
                                       const std::vector<std::tuple<int, int, double>>& entries) {
  WeightTable t;
  t.scheme_ = WeightScheme::custom;
  t.delta_ = delta;
  t.kappa_ = lattice.kappa();
  t.nx_ = lattice.nx();
  t.ny_ = lattice.ny();

  std::vector<std::map<int, double>> rows(lattice.cell_count());
  for (const auto& [i, j, w] : entries) {
    if (i < 0 || j < 0 || i >= lattice.cell_count() || j >= lattice.cell_count() || i == j)
      throw Error("WeightTable::custom: bad pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    rows[i][j] = w;
  }
  t.row_ptr_.assign(lattice.cell_count() + 1, 0);
  for (int i = 0; i < lattice.cell_count(); ++i) {
    t.row_ptr_[i + 1] = t.row_ptr_[i] + static_cast<int>(rows[i].size());
    for (const auto& [j, w] : rows[i]) t.csr_row_.push_back({j, w});
  }
  return t;
}

inline WeightTable build_weights(const Lattice& lattice, const Kernel& kernel, WeightScheme scheme) {
  if (scheme == WeightScheme::custom)
    throw Error("build_weights: custom tables are built via WeightTable::custom");
  return WeightTable::built_in(lattice, kernel, scheme);
}

struct WeightViolation {
  int i;
  int j;
  std::string rule;  // "A4(a)" .. "A4(d)"
  double value;
};

// Checks A4(a)-(d) with tolerance 1e-12 on the value comparisons. Empty
// result means the table is admissible.
inline std::vector<WeightViolation> validate_weights(const WeightTable& table,
                                                     const Lattice& lattice) {
  constexpr double tol = 1e-12;
  const double delta = table.delta();
  const double kappa = lattice.kappa();
  const double half_diag = kSqrt2 * kappa / 2.0;
  std::vector<WeightViolation> out;

  if (table.stencil_backed()) {
    // One check per offset; report a representative pair realizing it.
    const int span = table.stencil_span();
    auto pair_for = [&](int dx, int dy, int& i, int& j) {
      const int ix = std::max(0, -dx);
      const int iy = std::max(0, -dy);
      i = lattice.cell_index(ix, iy);
      j = lattice.cell_index(ix + dx, iy + dy);
    };
    for (int dy = -span; dy <= span; ++dy) {
      for (int dx = -span; dx <= span; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (std::abs(dx) >= lattice.nx() || std::abs(dy) >= lattice.ny()) continue;
        const double w = table.stencil_value(dx, dy);
        const double dist = kappa * std::hypot(static_cast<double>(dx), static_cast<double>(dy));
        int i, j;
        if (dist >= delta + half_diag && std::abs(w) > tol) {
          pair_for(dx, dy, i, j);
          out.push_back({i, j, "A4(a)", w});
        }
        if (dist <= delta - half_diag && std::abs(w - 1.0) > tol) {
          pair_for(dx, dy, i, j);
          out.push_back({i, j, "A4(b)", w});
        }
        if (w < -tol || w > 1.0 + tol) {
          pair_for(dx, dy, i, j);
          out.push_back({i, j, "A4(c)", w});
        }
        if (std::abs(w - table.stencil_value(-dx, -dy)) > tol) {
          pair_for(dx, dy, i, j);
          out.push_back({i, j, "A4(d)", w - table.stencil_value(-dx, -dy)});
        }
      }
    }
    return out;
  }

  // Custom tables: stored entries first, then the forced-one ball for (b)
  // (absent entries there are implicit zeros and violate it).
  table.for_each_stored([&](int i, int j, double w) {
    const double dist = (lattice.midpoint(j) - lattice.midpoint(i)).norm();
    if (dist >= delta + half_diag && std::abs(w) > tol) out.push_back({i, j, "A4(a)", w});
    if (w < -tol || w > 1.0 + tol) out.push_back({i, j, "A4(c)", w});
    if (std::abs(w - table.weight(j, i)) > tol)
      out.push_back({i, j, "A4(d)", w - table.weight(j, i)});
  });
  const double forced_one = delta - half_diag;
  if (forced_one > 0.0) {
    for (int i = 0; i < lattice.cell_count(); ++i) {
      for (int j : neighbors(lattice, i, forced_one)) {
        const double dist = (lattice.midpoint(j) - lattice.midpoint(i)).norm();
        if (dist <= forced_one && std::abs(table.weight(i, j) - 1.0) > tol)
          out.push_back({i, j, "A4(b)", table.weight(i, j)});
      }
    }
  }
  return out;
}

}  // namespace peristatic
