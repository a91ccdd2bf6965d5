#include "rsbound/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rsbound/special.hpp"

namespace rsbound {

namespace {

constexpr double kSmallU = 1e-4;

std::vector<double> chebyshev_coefficients(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += values[j] * std::cos(std::numbers::pi * static_cast<double>(k) *
                                  (static_cast<double>(j) + 0.5) / static_cast<double>(n));
    }
    c[k] = 2.0 * sum / static_cast<double>(n);
  }
  c[0] *= 0.5;
  return c;
}

double clenshaw(const double* c, std::size_t n, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  const double t2 = 2.0 * t;
  for (std::size_t k = n - 1; k > 0; --k) {
    const double b0 = c[k] + t2 * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(alpha)) throw std::invalid_argument("ModelParams: alpha must be finite");
  if (!(r_ratio >= 1.0) || !std::isfinite(r_ratio)) {
    throw std::invalid_argument("ModelParams: r_ratio must be finite and >= 1, got " +
                                std::to_string(r_ratio));
  }
}

std::array<double, 4> ModelParams::center() const {
  return {0.0, -std::numbers::sqrt2 * r_ratio, 0.0, 0.0};
}

double radial_profile(double r) { return bump_theta(1.0 - r); }

double smearing_f(std::span<const double, 4> x, const ModelParams& params) {
  const auto c = params.center();
  double r2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = x[i] - c[i];
    r2 += d * d;
  }
  return params.alpha * radial_profile(std::sqrt(r2));
}

double profile_h_direct(double u, const QuadratureSpec& spec) {
  if (u == 0.0) return 0.0;
  const int panels = 1 + static_cast<int>(std::abs(u) / std::numbers::pi);
  auto res = integrate_1d(
      [u](double s) { return s * s * radial_profile(s) * bessel_j1(u * s); }, 0.0, 1.0, spec,
      panels);
  return res.value;
}

double profile_moment(int n) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 0.0;
  auto res = integrate_1d(
      [n](double s) { return std::pow(s, n) * radial_profile(s); }, 0.0, 1.0, spec, 8);
  return res.value;
}

QuadratureSpec OnShellProfile::Options::default_spec() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-17;
  spec.max_subdivisions = 4000;
  return spec;
}

OnShellProfile OnShellProfile::build(const Options& options) {
  if (!(options.panel_width > 0.0) || options.nodes_per_panel < 4) {
    throw std::invalid_argument("OnShellProfile: bad panel layout");
  }
  OnShellProfile p;
  p.panel_width_ = options.panel_width;
  p.order_ = static_cast<std::size_t>(options.nodes_per_panel);
  p.slope_ = 0.5 * profile_moment(3);
  p.m5_ = profile_moment(5);
  p.m7_ = profile_moment(7);

  // Locate the decay point of the envelope of |h|.
  const double step = 0.25;
  double last_above = 0.0;
  std::vector<std::pair<double, double>> scan;
  for (double u = step; u <= options.scan_limit; u += step) {
    const double v = std::abs(profile_h_direct(u, options.spec));
    scan.emplace_back(u, v);
    p.peak_ = std::max(p.peak_, v);
    if (u > last_above + 100.0 && u > 50.0) break;
    if (v >= options.decay_threshold * p.peak_) last_above = u;
  }
  // Re-evaluate against the final peak (the scan raised it monotonically).
  last_above = 0.0;
  for (const auto& [u, v] : scan) {
    if (v >= options.decay_threshold * p.peak_) last_above = u;
  }
  const double span = last_above + 2.0 * std::numbers::pi;
  const auto panels = static_cast<std::size_t>(std::ceil(span / p.panel_width_));
  p.u_max_ = static_cast<double>(panels) * p.panel_width_;

  const std::size_t n = p.order_;
  p.coeffs_.reserve(panels * n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < panels; ++i) {
    const double a = static_cast<double>(i) * p.panel_width_;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) /
                                static_cast<double>(n));
      const double u = a + 0.5 * p.panel_width_ * (x + 1.0);
      values[j] = profile_h_direct(u, options.spec) / u;
    }
    const auto c = chebyshev_coefficients(values);
    p.coeffs_.insert(p.coeffs_.end(), c.begin(), c.end());
  }
  return p;
}

const OnShellProfile& OnShellProfile::standard() {
  static const OnShellProfile profile = build();
  return profile;
}

double OnShellProfile::h_over_u(double u) const {
  u = std::abs(u);
  if (u >= u_max_) return 0.0;
  if (u < kSmallU) {
    const double u2 = u * u;
    return slope_ - u2 * m5_ / 16.0 + u2 * u2 * m7_ / 384.0;
  }
  const auto idx = std::min(static_cast<std::size_t>(u / panel_width_), panel_count() - 1);
  const double a = static_cast<double>(idx) * panel_width_;
  const double t = 2.0 * (u - a) / panel_width_ - 1.0;
  return clenshaw(coeffs_.data() + idx * order_, order_, t);
}

double onshell_profile_h(double u) {
  if (u < 0.0) throw std::invalid_argument("onshell_profile_h: u must be >= 0");
  return OnShellProfile::standard().h(u);
}

double radial_transform(double q, const ModelParams& params, const OnShellProfile& profile) {
  constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
  return kFourPiSq * params.alpha * profile.h_over_u(q);
}

std::complex<double> onshell_ft(double k, double mu, const ModelParams& params,
                                const OnShellProfile& profile) {
  if (!(k > 0.0)) throw std::invalid_argument("onshell_ft: k must be positive");
  const double phase = std::numbers::sqrt2 * params.r_ratio * k * mu;
  const double radial = radial_transform(std::numbers::sqrt2 * k, params, profile);
  return {radial * std::cos(phase), radial * std::sin(phase)};
}

}  // namespace rsbound
