#pragma once

#include <cmath>
#include <numbers>

namespace rsbound {

/// Bessel function of the first kind, order one. Accurate to a few ulp
/// (absolute, relative to the local envelope) for 0 <= x <= 1e3.
double bessel_j1(double x);

/// Normalized Gaussian density with the given variance.
/// Throws std::invalid_argument if variance <= 0.
double gaussian(double eta, double variance);

/// Gaussian weight G_zeta(eta) = exp(-eta^2 / 2 zeta) / sqrt(2 pi zeta).
class GaussianKernel {
 public:
  explicit GaussianKernel(double variance);

  double variance() const { return variance_; }
  double operator()(double eta) const {
    return norm_ * std::exp(-eta * eta / (2.0 * variance_));
  }

  /// Mass of the kernel outside [-L, L].
  double tail_mass(double half_width) const;

 private:
  double variance_;
  double norm_;
};

/// Phi(s) = exp(-1/s) for s > 0, zero otherwise. Never overflows.
double bump_phi(double s);

/// Smooth step Phi(s) / (Phi(s) + Phi(1 - s)): 0 for s <= 0, 1 for s >= 1.
double bump_theta(double s);

}  // namespace rsbound
