#pragma once

// Smeared two-point Wightman functions of the massless field for the
// spherical bump model:
//   W0     = W2(f, f)
//   W(eta) = W2[f, f o Lambda_1(eta)]
// Convention: f~(k) = int d^4x exp(i(k0 x0 - k.x)) f(x), invariant measure
// d^3k / ((2 pi)^3 2|k|).

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rsbound/quadrature.hpp"
#include "rsbound/testfn.hpp"

namespace rsbound {

QuadratureSpec default_overlap_spec();

/// W2(f, f) = 2 pi^2 alpha^2 int_0^inf h(u)^2 / u du.
QuadResult<double> w2_self(const ModelParams& params,
                           const QuadratureSpec& spec = default_overlap_spec());

/// W(eta) via the light-cone form
///   W = 4 pi^2 alpha^2 / sinh|eta| int_0^{|eta|/2} ds int_0^inf q dq
///       exp(2 i r tanh(eta/2) q cosh s) m(q e^-s) m(q e^s),   m(u) = h(u)/u,
/// obtained from the (k, mu) integral by taking the boosted frequency as the
/// second integration variable.
QuadResult<std::complex<double>> boosted_overlap(
    double eta, const ModelParams& params, const QuadratureSpec& spec = default_overlap_spec());

/// W(eta) from the direct (k, mu) integral
///   (1/8 pi^2) int k dk int dmu exp(i sqrt2 r k [mu(cosh eta - 1) + sinh eta])
///              g(sqrt2 k) g(sqrt2 k (cosh eta + mu sinh eta)).
/// Slower and only practical for moderate |eta|; kept as a second route.
QuadResult<std::complex<double>> boosted_overlap_kmu(
    double eta, const ModelParams& params, const QuadratureSpec& spec = default_overlap_spec());

struct OverlapSettings {
  double eta_max = 40.0;
  int nodes_per_panel = 16;
  double tail_threshold = 1e-6;
  double interp_tolerance = 1e-4;
  QuadratureSpec spec = default_overlap_spec();
  /// Worker threads for the build; results do not depend on it.
  int threads = 1;

  void validate() const;
  /// Content hash of everything except alpha and threads (tables are stored
  /// for unit amplitude and scaled by alpha^2).
  std::string hash(double r_ratio) const;
};

/// Boosted overlap sampled on Chebyshev panels in eta, log-graded towards 0.
class OverlapTable {
 public:
  const ModelParams& params() const { return params_; }
  double w0() const { return scale_ * unit_w0_; }
  double eta_max() const { return breaks_.back(); }

  /// Interpolated W(eta); W(-eta) = conj W(eta), zero beyond eta_max.
  std::complex<double> operator()(double eta) const;
  /// W(eta) - W0 without cancellation at small eta.
  std::complex<double> shifted(double eta) const;

  std::span<const double> nodes() const { return nodes_; }
  std::vector<std::complex<double>> node_values() const;
  std::span<const double> node_errors() const { return errors_; }
  std::span<const double> breakpoints() const { return breaks_; }

  /// Largest |interpolant - direct| over the per-panel check points.
  double max_interp_error() const { return scale_ * unit_interp_error_; }
  bool tail_ok() const { return tail_ok_; }
  bool quadrature_converged() const { return quad_ok_; }
  bool interpolation_ok() const { return interp_ok_; }
  bool converged() const { return tail_ok_ && quad_ok_ && interp_ok_; }
  const std::string& settings_hash() const { return hash_; }

  /// Same samples for a different amplitude.
  OverlapTable with_alpha(double alpha) const;

  void save(const std::filesystem::path& file) const;
  static OverlapTable load(const std::filesystem::path& file, double alpha);

 private:
  friend OverlapTable build_overlap_table(const ModelParams&, const OverlapSettings&);
  void fit();

  ModelParams params_;
  double scale_ = 1.0;  // alpha^2
  double unit_w0_ = 0.0;
  std::vector<double> breaks_;
  int order_ = 0;
  std::vector<double> nodes_;
  std::vector<std::complex<double>> unit_values_;  // panel-major, order_ per panel
  std::vector<double> errors_;
  std::vector<std::complex<double>> coeffs_;
  double unit_interp_error_ = 0.0;
  double interp_tolerance_ = 1e-4;
  bool tail_ok_ = true;
  bool quad_ok_ = true;
  bool interp_ok_ = true;
  std::string hash_;
};

/// Panel breakpoints used for a given eta_max.
std::vector<double> overlap_breakpoints(double eta_max);

OverlapTable build_overlap_table(const ModelParams& params, const OverlapSettings& settings);

/// Build, or load from cache_dir when a table with the same settings hash
/// exists; newly built tables are written back. Empty cache_dir disables caching.
OverlapTable cached_overlap_table(const ModelParams& params, const OverlapSettings& settings,
                                  const std::filesystem::path& cache_dir);

}  // namespace rsbound
