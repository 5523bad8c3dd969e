// Small 2-D value types and shared constants used across the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace peristatic {

// Space dimension is fixed to 2; d^2 shows up in the state-based constants.
inline constexpr int kDim = 2;
inline constexpr double kDimSq = 4.0;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  constexpr double norm_sq() const { return x * x + y * y; }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

// 2x2 matrix, row-major.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  constexpr Mat2 operator+(const Mat2& o) const {
    return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11};
  }
  constexpr Mat2 operator-(const Mat2& o) const {
    return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11};
  }
  constexpr Mat2 operator*(double s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
  Mat2& operator+=(const Mat2& o) {
    a00 += o.a00; a01 += o.a01; a10 += o.a10; a11 += o.a11;
    return *this;
  }
  constexpr Vec2 operator*(Vec2 v) const {
    return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y};
  }
  constexpr Mat2 transposed() const { return {a00, a10, a01, a11}; }
  constexpr double max_abs() const {
    double m = std::abs(a00);
    if (std::abs(a01) > m) m = std::abs(a01);
    if (std::abs(a10) > m) m = std::abs(a10);
    if (std::abs(a11) > m) m = std::abs(a11);
    return m;
  }
};

// Outer product a b^T.
inline constexpr Mat2 outer(Vec2 a, Vec2 b) {
  return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

// Base type for every library error; subtypes carry the spec'd error names.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonconformingKappa : Error { using Error::Error; };
struct KappaTooLarge : Error { using Error::Error; };
struct SingularEvaluation : Error { using Error::Error; };
struct DegenerateStencil : Error { using Error::Error; };
struct TooLargeForDense : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct DomainMismatch : Error { using Error::Error; };
struct SingularBlock : Error { using Error::Error; };
struct PairNotSmooth : Error { using Error::Error; };
struct TripleNotSmooth : Error { using Error::Error; };
struct UnknownProblem : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };

}  // namespace peristatic
