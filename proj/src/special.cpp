#include "rsbound/special.hpp"

#include <math.h>

#include <limits>
#include <stdexcept>
#include <string>

namespace rsbound {

namespace {

// Below this, 1/s exceeds the exponent range of exp() and the result is 0.
constexpr double kPhiUnderflow = 1.0 / 745.2;

}  // namespace

double bessel_j1(double x) {
  // glibc's j1 switches between rational fits and Hankel asymptotics.
  return ::j1(x);
}

double gaussian(double eta, double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("gaussian: variance must be positive, got " +
                                std::to_string(variance));
  }
  return std::exp(-eta * eta / (2.0 * variance)) /
         std::sqrt(2.0 * std::numbers::pi * variance);
}

GaussianKernel::GaussianKernel(double variance) : variance_(variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("GaussianKernel: variance must be positive and finite");
  }
  norm_ = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance_);
}

double GaussianKernel::tail_mass(double half_width) const {
  return std::erfc(half_width / std::sqrt(2.0 * variance_));
}

double bump_phi(double s) {
  if (s <= kPhiUnderflow) return 0.0;
  return std::exp(-1.0 / s);
}

double bump_theta(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  // Phi(s) / (Phi(s) + Phi(1-s)) written as a logistic to avoid 0/0 when
  // both exponentials underflow near the ends.
  const double z = 1.0 / s - 1.0 / (1.0 - s);
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace rsbound
