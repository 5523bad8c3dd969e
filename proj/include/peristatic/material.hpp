// Input fields (piecewise-constant via region overrides, total on R^2
// through the background value) and the per-node model constants
//
//   m^num_i   = sum_j w_ij V_j rho(x_j - x_i) ||x_j - x_i||^2
//   alpha_i   = l_i / m^num_i
//   tau_i     = (k_i d^2 - l_i) / (m^num_i)^2
//
// evaluated at cell midpoints only (one-point rule). Constrained nodes get
// material too: they participate in the unreduced operator sums.
#pragma once

#include <utility>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/geometry.hpp"
#include "peristatic/kernel.hpp"
#include "peristatic/lattice.hpp"
#include "peristatic/parallel.hpp"
#include "peristatic/weights.hpp"

namespace peristatic {

template <class Value>
struct Field {
  Value background{};
  std::vector<std::pair<Region, Value>> overrides;  // last matching wins

  Value operator()(Vec2 x) const {
    Value v = background;
    for (const auto& [region, value] : overrides)
      if (region.contains(x)) v = value;
    return v;
  }
};

using ScalarField = Field<double>;
using VectorField = Field<Vec2>;

template <class Value>
Value sample_field(const Field<Value>& field, Vec2 x) {
  return field(x);
}

struct NodalMaterial {
  std::vector<double> m;      // m^num per node, > 0
  std::vector<double> alpha;  // l_i / m_i
  std::vector<double> tau;    // (k_i d^2 - l_i) / m_i^2
  std::vector<double> k;
  std::vector<double> l;

  int node_count() const { return static_cast<int>(m.size()); }
};

inline NodalMaterial compute_nodal_material(const Lattice& lattice, const Kernel& kernel,
                                            const WeightTable& weights, const ScalarField& k_field,
                                            const ScalarField& l_field) {
  const int n = lattice.cell_count();
  NodalMaterial mat;
  mat.m.resize(n);
  mat.alpha.resize(n);
  mat.tau.resize(n);
  mat.k.resize(n);
  mat.l.resize(n);

  const double volume = lattice.cell_volume();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    for (std::size_t ii = b; ii < e; ++ii) {
      const int i = static_cast<int>(ii);
      const Vec2 xi = lattice.midpoint(i);
      mat.k[i] = k_field(xi);
      mat.l[i] = l_field(xi);
      double m = 0.0;
      weights.for_each_neighbor(i, [&](int j, double w) {
        const Vec2 bond = lattice.midpoint(j) - xi;
        m += w * volume * kernel.rho(bond) * bond.norm_sq();
      });
      mat.m[i] = m;
      if (!(m > 0.0)) throw DegenerateStencil("compute_nodal_material: m^num <= 0 at node " + std::to_string(i));
      mat.alpha[i] = mat.l[i] / m;
      mat.tau[i] = (mat.k[i] * kDimSq - mat.l[i]) / (m * m);
    }
  });
  return mat;
}

}  // namespace peristatic
