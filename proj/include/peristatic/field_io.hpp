// Binary field dump, magic "PDF1": header (nx, ny as int32, then kappa and
// domain origin/extent as f64), followed by 2*nx*ny f64 displacement values
// in node-major (x, y) order over row-major cells. Everything little-endian.
#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "peristatic/core.hpp"
#include "peristatic/error_metrics.hpp"
#include "peristatic/lattice.hpp"

namespace peristatic {

namespace io_detail {
inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_f64(std::ostream& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}
inline double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}
}  // namespace io_detail

inline void write_field(std::ostream& out, const Lattice& lattice, const DisplacementField& u) {
  if (u.size() != 2 * static_cast<std::size_t>(lattice.cell_count()))
    throw DimensionMismatch("write_field");
  out.write("PDF1", 4);
  io_detail::put_u32(out, static_cast<std::uint32_t>(lattice.nx()));
  io_detail::put_u32(out, static_cast<std::uint32_t>(lattice.ny()));
  io_detail::put_f64(out, lattice.kappa());
  io_detail::put_f64(out, lattice.domain().origin.x);
  io_detail::put_f64(out, lattice.domain().origin.y);
  io_detail::put_f64(out, lattice.domain().extent.x);
  io_detail::put_f64(out, lattice.domain().extent.y);
  for (double v : u) io_detail::put_f64(out, v);
}

inline PiecewiseConstantField read_field(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PDF1", 4) != 0) throw Error("read_field: bad magic");
  const int nx = static_cast<int>(io_detail::get_u32(in));
  const int ny = static_cast<int>(io_detail::get_u32(in));
  const double kappa = io_detail::get_f64(in);
  BoxDomain domain;
  domain.origin.x = io_detail::get_f64(in);
  domain.origin.y = io_detail::get_f64(in);
  domain.extent.x = io_detail::get_f64(in);
  domain.extent.y = io_detail::get_f64(in);
  if (nx <= 0 || ny <= 0 || !(kappa > 0.0)) throw Error("read_field: bad header");
  PiecewiseConstantField f{Lattice(domain, kappa, nx, ny), {}};
  f.values.resize(2 * static_cast<std::size_t>(nx) * ny);
  for (double& v : f.values) v = io_detail::get_f64(in);
  if (!in) throw Error("read_field: truncated payload");
  return f;
}

}  // namespace peristatic
