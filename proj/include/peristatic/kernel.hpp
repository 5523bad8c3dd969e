// Radial influence function rho and the horizon delta. The horizon cutoff
// chi_[0,delta) is deliberately NOT applied here; it lives in the weight
// table, which lets FA and PAAC share one kernel. rho may therefore be probed
// slightly beyond delta (annulus cells), so polynomial variants clamp
// negative excursions there to 0.
#pragma once

#include <atomic>
#include <cmath>
#include <iostream>
#include <vector>

#include "peristatic/core.hpp"

namespace peristatic {

enum class KernelVariant { inverse_distance, constant, conical, polynomial };

class Kernel {
 public:
  static Kernel inverse_distance(double delta) { return Kernel(KernelVariant::inverse_distance, delta); }

  static Kernel constant(double delta, double value = 1.0) {
    if (value < 0.0) throw Error("Kernel: constant value must be nonnegative");
    Kernel k(KernelVariant::constant, delta);
    k.scale_ = value;
    return k;
  }

  // rho(zeta) = scale * max(0, 1 - ||zeta||/delta).
  static Kernel conical(double delta, double scale) {
    if (!(scale > 0.0)) throw Error("Kernel: conical scale must be positive");
    Kernel k(KernelVariant::conical, delta);
    k.scale_ = scale;
    return k;
  }

  // rho(zeta) = max(0, p(||zeta||)) / ||zeta||^alpha with alpha in {0, 1}.
  // p is given by coefficients c0 + c1 r + c2 r^2 + ... and must be
  // nonnegative on [0, delta] (checked by dense sampling at 1e4 points).
  static Kernel polynomial(double delta, std::vector<double> coeffs, int alpha) {
    if (alpha != 0 && alpha != 1) throw Error("Kernel: polynomial alpha must be 0 or 1");
    if (coeffs.empty()) throw Error("Kernel: polynomial needs at least one coefficient");
    Kernel k(KernelVariant::polynomial, delta);
    k.coeffs_ = std::move(coeffs);
    k.alpha_ = alpha;
    constexpr int kSamples = 10000;
    for (int s = 0; s <= kSamples; ++s) {
      const double r = delta * static_cast<double>(s) / kSamples;
      if (k.poly(r) < 0.0)
        throw Error("Kernel: polynomial is negative inside [0, delta] at r=" + std::to_string(r));
    }
    return k;
  }

  KernelVariant variant() const { return variant_; }
  double delta() const { return delta_; }
  // True when rho ~ 1/r near 0 (evaluation at zero distance is singular).
  bool singular_at_zero() const {
    return variant_ == KernelVariant::inverse_distance ||
           (variant_ == KernelVariant::polynomial && alpha_ == 1);
  }

  double rho_at_distance(double r) const {
    switch (variant_) {
      case KernelVariant::inverse_distance:
        if (r <= 0.0) throw SingularEvaluation("rho: 1/||zeta|| evaluated at zero distance");
        return 1.0 / r;
      case KernelVariant::constant:
        return scale_;
      case KernelVariant::conical:
        return scale_ * std::max(0.0, 1.0 - r / delta_);
      case KernelVariant::polynomial: {
        if (alpha_ == 1 && r <= 0.0)
          throw SingularEvaluation("rho: p(r)/r evaluated at zero distance");
        double v = poly(r);
        if (v < 0.0) {
          log_clamp_once();
          v = 0.0;
        }
        return alpha_ == 1 ? v / r : v;
      }
    }
    return 0.0;
  }

  double rho(Vec2 zeta) const { return rho_at_distance(zeta.norm()); }

 private:
  Kernel(KernelVariant v, double delta) : variant_(v), delta_(delta) {
    if (!(delta > 0.0)) throw Error("Kernel: delta must be positive");
  }

  double poly(double r) const {
    double v = 0.0;
    for (std::size_t c = coeffs_.size(); c-- > 0;) v = v * r + coeffs_[c];
    return v;
  }

  static void log_clamp_once() {
    static std::atomic<bool> logged{false};
    if (!logged.exchange(true))
      std::cerr << "peristatic: note: polynomial kernel clamped to 0 beyond its sign change\n";
  }

  KernelVariant variant_;
  double delta_;
  double scale_ = 1.0;
  std::vector<double> coeffs_;
  int alpha_ = 0;
};

}  // namespace peristatic
