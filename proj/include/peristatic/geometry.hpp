// Axis-aligned boxes, disc/box regions, and the exact disc-rectangle
// intersection area. The area routine is closed-form (circular-segment
// integrals per horizontal strip), not adaptive quadrature: these values end
// up inside every matrix entry, so they have to be deterministic and good to
// ~1e-12 of max(box area, disc area).
#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>

#include "peristatic/core.hpp"

namespace peristatic {

namespace geom_detail {

// Positive x where the circle x^2 + y^2 = r^2 meets the line y = h (h >= 0).
inline double chord_half_width(double h, double r) {
  return (h < r) ? std::sqrt(r * r - h * h) : 0.0;
}

// Antiderivative of x -> sqrt(r^2 - x^2) - h, valid for |x| <= r.
inline double strip_integral(double x, double h, double r) {
  return 0.5 * (std::sqrt(std::max(0.0, 1.0 - (x * x) / (r * r))) * x * r +
                r * r * std::asin(std::clamp(x / r, -1.0, 1.0)) - 2.0 * h * x);
}

// Area of {(x, y) : x0 <= x <= x1, y >= h} inside the origin-centered disc.
inline double area_above(double x0, double x1, double h, double r) {
  const double s = chord_half_width(h, r);
  const double a = std::clamp(x0, -s, s);
  const double b = std::clamp(x1, -s, s);
  return strip_integral(b, h, r) - strip_integral(a, h, r);
}

// Disc at the origin vs. box [x0,x1] x [y0,y1]; recurses to the y >= 0 case.
inline double disc_box_area_origin(double x0, double x1, double y0, double y1, double r) {
  if (y0 < 0.0) {
    if (y1 < 0.0) return disc_box_area_origin(x0, x1, -y1, -y0, r);
    return disc_box_area_origin(x0, x1, 0.0, -y0, r) + disc_box_area_origin(x0, x1, 0.0, y1, r);
  }
  return area_above(x0, x1, y0, r) - area_above(x0, x1, y1, r);
}

}  // namespace geom_detail

// Exact area of disc(center, radius) intersected with [lo.x,hi.x] x [lo.y,hi.y].
inline double circle_box_area(Vec2 center, double radius, Vec2 lo, Vec2 hi) {
  if (radius <= 0.0 || hi.x <= lo.x || hi.y <= lo.y) return 0.0;
  double a = geom_detail::disc_box_area_origin(lo.x - center.x, hi.x - center.x,
                                               lo.y - center.y, hi.y - center.y, radius);
  return std::max(0.0, a);
}

// A constraint / override region: axis-aligned box or open disc.
struct Region {
  enum class Kind { box, disc };

  Kind kind = Kind::box;
  Vec2 origin{};   // box only
  Vec2 extent{};   // box only; zero extent = empty region
  Vec2 center{};   // disc only
  double radius = 0.0;

  static Region box(Vec2 origin, Vec2 extent) {
    if (extent.x < 0.0 || extent.y < 0.0) throw Error("Region: negative box extent");
    Region r;
    r.kind = Kind::box;
    r.origin = origin;
    r.extent = extent;
    return r;
  }

  static Region disc(Vec2 center, double radius) {
    if (radius <= 0.0) throw Error("Region: disc radius must be positive");
    Region r;
    r.kind = Kind::disc;
    r.center = center;
    r.radius = radius;
    return r;
  }

  // Membership: closed for boxes, strict for discs.
  bool contains(Vec2 p) const {
    if (kind == Kind::box) {
      return p.x >= origin.x && p.x <= origin.x + extent.x && p.y >= origin.y &&
             p.y <= origin.y + extent.y;
    }
    return (p - center).norm_sq() < radius * radius;
  }

  // Exact overlap area with the cell [lo, hi].
  double overlap_area(Vec2 lo, Vec2 hi) const {
    if (kind == Kind::box) {
      const double wx = std::min(hi.x, origin.x + extent.x) - std::max(lo.x, origin.x);
      const double wy = std::min(hi.y, origin.y + extent.y) - std::max(lo.y, origin.y);
      if (wx <= 0.0 || wy <= 0.0) return 0.0;
      return wx * wy;
    }
    return circle_box_area(center, radius, lo, hi);
  }

  // Loose bounding box, used only for containment warnings.
  void bounds(Vec2& lo, Vec2& hi) const {
    if (kind == Kind::box) {
      lo = origin;
      hi = origin + extent;
    } else {
      lo = {center.x - radius, center.y - radius};
      hi = {center.x + radius, center.y + radius};
    }
  }
};

}  // namespace peristatic
