#pragma once

#include <cmath>
#include <utility>

#include "ddlab/numkit.hpp"

namespace ddlab {

// Tuning constants giving 95% asymptotic efficiency under Gaussian errors.
inline constexpr double kHuberDelta95 = 1.345;
inline constexpr double kTukeyK95 = 4.685;

enum class LossKind { squared, huber, tukey };

struct LossSpec {
  LossKind kind = LossKind::squared;
  double tuning = 0.0;  // delta for huber, k for tukey; unused for squared

  static LossSpec squared() { return {LossKind::squared, 0.0}; }
  static LossSpec huber(double delta = kHuberDelta95);
  static LossSpec tukey(double k = kTukeyK95);

  bool operator==(const LossSpec&) const = default;
};

/// Pointwise loss. squared: r^2. huber: r^2/2 inside |r| <= delta, linear
/// continuation outside. tukey: standardized biweight, saturating at 1.
inline double rho(const LossSpec& spec, double r) {
  switch (spec.kind) {
    case LossKind::squared:
      return r * r;
    case LossKind::huber: {
      const double d = spec.tuning;
      const double a = std::abs(r);
      return a <= d ? 0.5 * r * r : d * a - 0.5 * d * d;
    }
    case LossKind::tukey: {
      const double k = spec.tuning;
      if (std::abs(r) > k) return 1.0;
      const double t = 1.0 - (r / k) * (r / k);
      return 1.0 - t * t * t;
    }
  }
  return 0.0;
}

/// Exact derivative of rho.
inline double psi(const LossSpec& spec, double r) {
  switch (spec.kind) {
    case LossKind::squared:
      return 2.0 * r;
    case LossKind::huber: {
      const double d = spec.tuning;
      if (std::abs(r) <= d) return r;
      return r > 0.0 ? d : -d;
    }
    case LossKind::tukey: {
      const double k = spec.tuning;
      if (std::abs(r) > k) return 0.0;
      const double t = 1.0 - (r / k) * (r / k);
      return 6.0 * r / (k * k) * t * t;
    }
  }
  return 0.0;
}

/// (1/n) sum_i rho(y_i - x_i beta).
double objective_value(const LossSpec& spec, const Eigen::Ref<const Matrix>& x,
                       const Eigen::Ref<const Vector>& y,
                       const Eigen::Ref<const Vector>& beta);

/// Objective together with its gradient -(1/n) sum_i psi(r_i) x_i^T.
std::pair<double, Vector> objective_and_gradient(
    const LossSpec& spec, const Eigen::Ref<const Matrix>& x,
    const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& beta);

}  // namespace ddlab
