#pragma once

// Brute-force cross-checks for the reduced formulas: the on-shell transform
// from a direct 4-D quadrature over the support ball, and smeared overlaps
// from a direct momentum-space integral built on it.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "rsbound/testfn.hpp"

namespace rsbound {

struct OracleBudget {
  /// Gauss-Legendre nodes per axis of the position-space box.
  int position_nodes = 64;
  /// Momentum magnitudes above this are treated as zero.
  double k_max = 24.0;
  int k_panels = 48;
  int mu_panels = 8;
  int nodes_per_panel = 8;
  /// All lengths multiplied by this factor (momenta divided by it).
  double length_scale = 1.0;

  void validate() const;
  OracleBudget halved() const;
};

struct OracleValue {
  std::complex<double> value;
  /// |value - value at half resolution|.
  double error = 0.0;
  long long evaluations = 0;
};

/// int d^4x exp(i(k x0 - kvec.x)) f(x), with |kvec| = k and kvec.e1 = k mu,
/// evaluated on a tensor Gauss grid in coordinates aligned with kvec.
OracleValue ft_onshell_bruteforce(double k, double mu, const ModelParams& params,
                                  const OracleBudget& budget = OracleBudget{});

/// int d^3k / ((2 pi)^3 2k) conj(f~(k)) f~(Lambda_1(eta) k), both factors
/// from ft_onshell_bruteforce.
OracleValue w2_bruteforce(double eta, const ModelParams& params,
                          const OracleBudget& budget = OracleBudget{});

struct OracleReport {
  std::string quantity;
  std::complex<double> main_value;
  std::complex<double> oracle_value;
  double oracle_error = 0.0;
  /// max(|dRe|, |dIm|) / scale, or absolute when scale is zero.
  double deviation = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  long long budget = 0;
  bool pass = false;
};

/// Main-path functions under test; replaceable to check that the gate trips.
struct VerifyTargets {
  std::function<double(const ModelParams&)> self_overlap;
  std::function<std::complex<double>(double, const ModelParams&)> boosted;
  std::function<std::complex<double>(double, double, const ModelParams&)> transform;

  static VerifyTargets main_path();
};

struct VerifyOptions {
  ModelParams params{1.0, 2.0};
  OracleBudget budget;
  VerifyTargets targets = VerifyTargets::main_path();
  int threads = 1;
};

/// Runs the agreement suite: transform at (1.3, 0.4) within 1%, W0 within 1%,
/// W(0.3), W(0.7) within 2% and W(1.5) within 5% of |W0|.
std::vector<OracleReport> run_verification(const VerifyOptions& options);

}  // namespace rsbound
