#pragma once

// Click-probability bound for coherent states:
//   E_zeta      approximation error of the locally prepared state
//   N(zeta)     exp(pi^2 / 2 zeta)
//   raw(zeta)   (E_zeta + N(zeta) sqrt(p_dark))^2, minimized over zeta.

#include <span>
#include <vector>

#include "rsbound/quadrature.hpp"
#include "rsbound/testfn.hpp"
#include "rsbound/wightman.hpp"

namespace rsbound {

struct ApproxError {
  double value = 0.0;
  /// 1 - I before the square root; may be slightly negative from round-off.
  double radicand = 0.0;
  bool clamped = false;
  /// Half-width L of the explicitly integrated window [-L, L].
  double half_width = 0.0;
  double quad_error = 0.0;
  bool converged = true;
};

/// E_zeta = sqrt(1 - I), I = int (2 G_zeta - G_2zeta) Re exp(W(eta) - W0) d eta.
/// Beyond L = min(eta_max, 12 sqrt(2 zeta)) the exponential is replaced by
/// exp(-W0). Throws std::invalid_argument for zeta <= 0.
ApproxError approx_error_detail(double zeta, const OverlapTable& table);
double approx_error(double zeta, const OverlapTable& table);

/// exp(pi^2 / 2 zeta); +inf once it overflows. Throws for zeta <= 0.
double norm_factor(double zeta);
bool norm_factor_saturates(double zeta);

/// (E + norm sqrt(p_dark))^2. A saturated norm with p_dark = 0 contributes nothing.
double generic_bound(double e, double norm, double p_dark);

/// 1 - exp(-W0) for a coherent state with self overlap W0.
double ideal_click_probability(double w0);
QuadResult<double> p_ideal(const ModelParams& params,
                           const QuadratureSpec& spec = default_overlap_spec());

struct ZetaSearchSpec {
  double zeta_min = 1e-3;
  double zeta_max = 1e8;
  int grid_points = 240;
  /// Golden-section stops once the bracket is this wide relative to zeta.
  double rel_width = 1e-4;

  void validate() const;
};

struct BoundResult {
  double p_dark = 0.0;
  double zeta_star = 0.0;
  double e_zeta = 0.0;
  double raw_bound = 0.0;
  double p_max = 0.0;
  bool converged = true;
  /// The minimum sits on an end of the zeta search box.
  bool boundary_minimum = false;
  /// p_dark = 0: the value E^2 at zeta_min, not a true minimum.
  bool limit_case = false;
};

/// Caches E_zeta on the log grid of a search spec for one table.
class BoundEvaluator {
 public:
  BoundEvaluator(const OverlapTable& table, const ZetaSearchSpec& search, int threads = 1);

  const OverlapTable& table() const { return *table_; }
  const ZetaSearchSpec& search() const { return search_; }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> grid_errors() const { return errors_; }
  bool grid_converged() const { return grid_ok_; }

  BoundResult minimize(double p_dark) const;

 private:
  const OverlapTable* table_;
  ZetaSearchSpec search_;
  std::vector<double> grid_;
  std::vector<double> errors_;
  bool grid_ok_ = true;
};

BoundResult bound_min(double p_dark, const OverlapTable& table,
                      const ZetaSearchSpec& search = ZetaSearchSpec{});

/// bound_min for each p_dark. Every row is also compared against the optima
/// found for the other rows, which makes p_max exactly nondecreasing in p_dark.
std::vector<BoundResult> bound_sweep(std::span<const double> p_darks,
                                     const BoundEvaluator& evaluator, int threads = 1);

}  // namespace rsbound
