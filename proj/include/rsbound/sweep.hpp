#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsbound/bound.hpp"
#include "rsbound/wightman.hpp"

namespace rsbound {

/// Raised for invalid user configuration (unknown keys, bad ranges).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> r_ratios{1.0, 2.0};
  double pdark_min = 1e-10;
  double pdark_max = 1.0;
  int pdark_points = 41;
  /// Relative tolerance of the overlap quadratures.
  double tolerance = 1e-10;
  double eta_max = 40.0;
  ZetaSearchSpec search;
  std::filesystem::path out_dir = "rsbound-out";
  /// Empty disables the overlap-table cache.
  std::filesystem::path cache_dir;
  bool svg = true;
  int threads = 1;

  void validate() const;
  std::vector<double> pdark_grid() const;
  OverlapSettings overlap_settings() const;

  /// Applies the flat keys of a JSON object; unknown keys throw ConfigError.
  void apply_json(const std::string& text);
  void apply_json_file(const std::filesystem::path& file);
  /// Documented key list, in schema order.
  static const std::vector<std::string>& json_keys();
};

struct SweepRow {
  double p_dark = 0.0;
  double p_max = 0.0;
  double raw_bound = 0.0;
  double zeta_star = 0.0;
  double e_zeta = 0.0;
  double p_ideal = 0.0;
  std::optional<double> ratio;
  bool converged = true;
  bool boundary_minimum = false;
};

struct SweepCurve {
  ModelParams params;
  std::vector<SweepRow> rows;
  std::string settings_hash;
  double w0 = 0.0;
  double eta_max = 0.0;
  double k_max = 0.0;
  double table_interp_error = 0.0;
  bool table_converged = true;
  bool rows_converged = true;
  int boundary_rows = 0;

  bool converged() const { return table_converged && rows_converged; }
};

inline constexpr const char* kCsvHeader = "p_dark,p_max,raw_bound,zeta_star,e_zeta,p_ideal,ratio";

/// Rows for one table, sorted by p_dark.
SweepCurve sweep_curve(const OverlapTable& table, std::span<const double> p_darks,
                       const ZetaSearchSpec& search, int threads = 1);

/// Builds or loads the table for (alpha, r) and sweeps it.
SweepCurve run_curve(const RunConfig& config, double alpha, double r_ratio);

std::string curve_csv(const SweepCurve& curve);
/// Metadata sidecar; the timestamp lives only here.
std::string curve_metadata_json(const SweepCurve& curve, const RunConfig& config,
                                const std::string& timestamp);
std::string curve_basename(double alpha, double r_ratio);

/// Writes text to a file via a temporary and rename.
void write_text_file(const std::filesystem::path& file, const std::string& text);
std::string utc_timestamp();

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Self-contained SVG line plot with log10 axes. Non-positive points are skipped.
std::string loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

}  // namespace rsbound
