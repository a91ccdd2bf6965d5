#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "rsbound/quadrature.hpp"

namespace rsbound {

/// Physical inputs of the spherical toy model. Lengths are in units of the
/// coherent-state radius, so R_coh = 1 and R_det = r_ratio.
struct ModelParams {
  double alpha = 1.0;
  double r_ratio = 1.0;

  void validate() const;
  /// Common center C = (0, -sqrt(2) r_ratio, 0, 0) of the two hyperspheres.
  std::array<double, 4> center() const;
};

/// f(x) = alpha * theta(1 - |x - C|) with the Euclidean 4-norm.
double smearing_f(std::span<const double, 4> x, const ModelParams& params);

/// Radial profile of the smearing function, g(r) = theta(1 - r).
double radial_profile(double r);

/// h(u) = int_0^1 s^2 theta(1 - s) J1(u s) ds evaluated by adaptive quadrature.
double profile_h_direct(double u, const QuadratureSpec& spec);

/// Moment int_0^1 s^n theta(1 - s) ds.
double profile_moment(int n);

/// Tabulated h(u)/u on [0, u_max]: Chebyshev panels of fixed width, zero
/// beyond u_max. The scaled form keeps full relative accuracy at small u.
class OnShellProfile {
 public:
  struct Options {
    double panel_width = 1.0;
    int nodes_per_panel = 20;
    /// u_max is placed where the envelope of |h| drops below this fraction of its peak.
    double decay_threshold = 1e-12;
    double scan_limit = 1000.0;
    QuadratureSpec spec = default_spec();

    static QuadratureSpec default_spec();
  };

  static OnShellProfile build(const Options& options);
  static OnShellProfile build() { return build(Options{}); }
  /// Process-wide profile with default options, built on first use.
  static const OnShellProfile& standard();

  double h(double u) const { return u * h_over_u(u); }
  double h_over_u(double u) const;

  double u_max() const { return u_max_; }
  double peak() const { return peak_; }
  /// lim_{u->0} h(u)/u = (1/2) int s^3 theta(1-s) ds.
  double slope_at_zero() const { return slope_; }
  std::size_t panel_count() const { return coeffs_.size() / order_; }

 private:
  double panel_width_ = 1.0;
  std::size_t order_ = 0;
  double u_max_ = 0.0;
  double peak_ = 0.0;
  double slope_ = 0.0;
  double m5_ = 0.0;
  double m7_ = 0.0;
  std::vector<double> coeffs_;  // Chebyshev coefficients, panel-major
};

/// h(u) from the standard profile.
double onshell_profile_h(double u);

/// Radial part of the 4-D Fourier transform of f at Euclidean momentum
/// magnitude Q: (2 pi)^2 alpha h(Q) / Q.
double radial_transform(double q, const ModelParams& params,
                        const OnShellProfile& profile = OnShellProfile::standard());

/// On-shell transform f~(k, k-vector) with |k-vector| = k and mu the cosine
/// to the x1 axis, convention int d^4x exp(i(k x0 - k.x)) f(x).
/// Throws std::invalid_argument for k <= 0.
std::complex<double> onshell_ft(double k, double mu, const ModelParams& params,
                                const OnShellProfile& profile = OnShellProfile::standard());

}  // namespace rsbound
