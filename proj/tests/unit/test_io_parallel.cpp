#include <doctest.h>

#include <cstring>
#include <sstream>

#include <peristatic/field_io.hpp>
#include <peristatic/parallel.hpp>

#include "test_helpers.hpp"

using namespace peristatic;

TEST_CASE("field dump round trip is bit exact") {
  const Lattice lat = build_lattice({{0.25, -1.0}, {1.5, 0.75}}, 0.25);
  test_util::Uniform u(17);
  DisplacementField values(2 * static_cast<std::size_t>(lat.cell_count()));
  for (double& v : values) v = u.symmetric() * 1e3;
  values[0] = 0.0;
  values[1] = -0.0;

  std::ostringstream out(std::ios::binary);
  write_field(out, lat, values);
  const std::string bytes = out.str();
  CHECK(bytes.size() == 4 + 8 + 5 * 8 + values.size() * 8);
  CHECK(bytes.compare(0, 4, "PDF1") == 0);

  std::istringstream in(bytes, std::ios::binary);
  const PiecewiseConstantField f = read_field(in);
  CHECK(f.lattice.nx() == lat.nx());
  CHECK(f.lattice.ny() == lat.ny());
  CHECK(f.lattice.kappa() == lat.kappa());
  CHECK(f.lattice.domain().origin.x == lat.domain().origin.x);
  CHECK(std::memcmp(f.values.data(), values.data(), values.size() * sizeof(double)) == 0);

  std::istringstream bad("nope", std::ios::binary);
  CHECK_THROWS_AS(read_field(bad), Error);
}

TEST_CASE("deterministic_sum is bit-identical across thread counts") {
  std::vector<double> data(100003);
  test_util::Uniform u(23);
  for (double& v : data) v = u.symmetric() * std::exp(8.0 * u.symmetric());
  auto term = [&](std::size_t i) { return data[i]; };

  set_threads(1);
  const double s1 = deterministic_sum(data.size(), term);
  set_threads(3);
  const double s3 = deterministic_sum(data.size(), term);
  set_threads(8);
  const double s8 = deterministic_sum(data.size(), term);
  set_threads(2);
  CHECK(s1 == s3);
  CHECK(s1 == s8);
}

TEST_CASE("parallel_for covers the range exactly once") {
  std::vector<int> hits(10000, 0);
  set_threads(4);
  parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) hits[i] += 1;
  }, 1);
  set_threads(2);
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("parallel_for propagates worker exceptions") {
  set_threads(4);
  CHECK_THROWS_AS(parallel_for(
                      std::size_t{10000},
                      [&](std::size_t b, std::size_t) {
                        if (b > 0) throw Error("worker failure");
                      },
                      1),
                  Error);
  set_threads(2);
}
