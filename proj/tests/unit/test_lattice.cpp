#include <doctest.h>

#include <peristatic/lattice.hpp>

#include "test_helpers.hpp"

using namespace peristatic;

namespace {
const BoxDomain kBar{{0.0, 0.0}, {2.0, 1.0}};
}

TEST_CASE("build_lattice: cell counts and midpoints") {
  const Lattice a = build_lattice(kBar, 1.0 / 40.0);
  CHECK(a.cell_count() == 3200);
  CHECK(a.nx() == 80);
  CHECK(a.ny() == 40);

  const Lattice b = build_lattice({{0.0, 0.0}, {1.0, 1.0}}, 1.0);
  CHECK(b.cell_count() == 1);
  CHECK(b.midpoint(0).x == doctest::Approx(0.5));
  CHECK(b.midpoint(0).y == doctest::Approx(0.5));
  CHECK(b.cell_volume() == 1.0);

  const Lattice c = build_lattice(kBar, 1.0 / 360.0);
  CHECK(c.cell_count() == 259200);

  CHECK_THROWS_AS(build_lattice(kBar, 0.3), NonconformingKappa);
  CHECK_THROWS_AS(build_lattice(kBar, -1.0), NonconformingKappa);
}

TEST_CASE("lattice: cells tile the box") {
  for (double kappa : {1.0 / 40.0, 1.0 / 60.0, 1.0 / 80.0}) {
    const Lattice lat = build_lattice(kBar, kappa);
    const double total = lat.cell_count() * lat.cell_volume();
    CHECK(std::abs(total - 2.0) <= 1e-12 * 2.0);
  }
}

TEST_CASE("classify_constrained: box region marks whole columns") {
  Lattice lat = build_lattice(kBar, 1.0 / 40.0);
  lat = classify_constrained(lat, Region::box({0.0, 0.0}, {0.1, 1.0}));
  int constrained = 0;
  for (int i = 0; i < lat.cell_count(); ++i)
    if (lat.constrained(i)) {
      ++constrained;
      CHECK(lat.cell_ix(i) < 4);
    }
  CHECK(constrained == 160);
  CHECK(lat.free_count() == 3040);
  // reduced indices are contiguous over the free cells
  int expect = 0;
  for (int i = 0; i < lat.cell_count(); ++i) {
    if (lat.constrained(i)) {
      CHECK(lat.free_index(i) == -1);
    } else {
      CHECK(lat.free_index(i) == expect);
      ++expect;
    }
  }
}

TEST_CASE("classify_constrained: empty region constrains nothing") {
  Lattice lat = build_lattice(kBar, 1.0 / 20.0);
  lat = classify_constrained(lat, Region::box({0.5, 0.5}, {0.0, 0.0}));
  CHECK(lat.free_count() == lat.cell_count());
}

TEST_CASE("classify_constrained: disc region matches exact overlap and Monte Carlo") {
  Lattice lat = build_lattice(kBar, 1.0 / 40.0);
  const Region disc = Region::disc({1.0, 0.5}, 0.3);
  lat = classify_constrained(lat, disc);

  const double eps_area = 1e-14 * lat.cell_volume();
  int positive_overlap = 0;
  for (int i = 0; i < lat.cell_count(); ++i) {
    Vec2 lo, hi;
    lat.cell_bounds(i, lo, hi);
    const double a = disc.overlap_area(lo, hi);
    if (a > eps_area) ++positive_overlap;
    CHECK(lat.constrained(i) == (a > eps_area));
    // Monte Carlo cross-check on boundary cells only (partial overlap).
    if (a > eps_area && a < lat.cell_volume() * (1.0 - 1e-12)) {
      const auto mc = test_util::mc_circle_box_area({1.0, 0.5}, 0.3, lo, hi, 1000000, 1000 + i);
      CHECK(std::abs(a - mc.estimate) <= 4.0 * mc.sigma);
    }
  }
  CHECK(positive_overlap == lat.cell_count() - lat.free_count());
}

TEST_CASE("classify_constrained: region reaching outside the domain is clipped") {
  // warns on stderr but must not throw; only in-domain overlap counts
  Lattice lat = build_lattice({{0, 0}, {2, 1}}, 1.0 / 10.0);
  lat = classify_constrained(lat, Region::disc({0.0, 0.5}, 0.3));
  int constrained = 0;
  for (int i = 0; i < lat.cell_count(); ++i)
    if (lat.constrained(i)) {
      ++constrained;
      CHECK(lat.midpoint(i).x < 0.5);
    }
  CHECK(constrained > 0);
}

TEST_CASE("classify_constrained: enlarging a box region never unmarks") {
  Lattice small = classify_constrained(build_lattice(kBar, 1.0 / 20.0),
                                       Region::box({0.3, 0.2}, {0.4, 0.3}));
  Lattice big = classify_constrained(build_lattice(kBar, 1.0 / 20.0),
                                     Region::box({0.25, 0.15}, {0.6, 0.5}));
  for (int i = 0; i < small.cell_count(); ++i)
    if (small.constrained(i)) CHECK(big.constrained(i));
}

TEST_CASE("neighbors: brute force equality, clipping, symmetry") {
  const Lattice lat = build_lattice(kBar, 1.0 / 80.0);
  const double radius = 1.0 / 20.0;

  const int interior = lat.cell_index(40, 20);
  const auto list = neighbors(lat, interior, radius);

  // brute-force distance scan over all cells
  const double reach = radius + kSqrt2 * lat.kappa() / 2.0;
  std::vector<int> brute;
  for (int j = 0; j < lat.cell_count(); ++j)
    if (j != interior && (lat.midpoint(j) - lat.midpoint(interior)).norm() < reach)
      brute.push_back(j);
  CHECK(list == brute);

  // candidate count close to the analytic stencil area
  const double expect = kPi * reach * reach / lat.cell_volume();
  CHECK(std::abs(static_cast<double>(list.size()) - expect) <= 0.05 * expect);

  // corner node sees strictly fewer candidates
  const auto corner = neighbors(lat, lat.cell_index(0, 0), radius);
  CHECK(corner.size() < list.size());

  // single-cell lattice has no neighbors
  const Lattice single = build_lattice({{0, 0}, {1, 1}}, 1.0);
  CHECK(neighbors(single, 0, 0.5).empty());
}

TEST_CASE("neighbors: candidate relation is symmetric") {
  const Lattice lat = build_lattice({{0, 0}, {1, 1}}, 1.0 / 9.0);
  const double radius = 0.3;
  std::vector<std::vector<int>> lists(lat.cell_count());
  for (int i = 0; i < lat.cell_count(); ++i) lists[i] = neighbors(lat, i, radius);
  for (int i = 0; i < lat.cell_count(); ++i)
    for (int j : lists[i])
      CHECK(std::find(lists[j].begin(), lists[j].end(), i) != lists[j].end());
}
