// rsbound: click-probability bounds for local detectors of coherent states.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsbound/bound.hpp"
#include "rsbound/oracle.hpp"
#include "rsbound/special.hpp"
#include "rsbound/sweep.hpp"
#include "rsbound/wightman.hpp"

namespace {

using namespace rsbound;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUnconverged = 2, kBadConfig = 3 };

struct Flags {
  std::vector<double> alphas;
  std::vector<double> ratios;
  double pdark_min = 0.0;
  double pdark_max = 0.0;
  int pdark_points = 0;
  std::string out_dir;
  std::string cache_dir;
  std::string config;
  bool svg = true;
  double tolerance = 0.0;
  int threads = 1;
  std::vector<double> zetas{1e-2, 1e-1, 1.0, std::numbers::pi * std::numbers::pi, 1e2, 1e4};
  std::vector<double> etas{0.0, 0.3, 0.7, 1.5, 3.0};
  bool json_out = false;
};

struct Options {
  CLI::Option* alpha = nullptr;
  CLI::Option* ratio = nullptr;
  CLI::Option* pdark_min = nullptr;
  CLI::Option* pdark_max = nullptr;
  CLI::Option* pdark_points = nullptr;
  CLI::Option* out_dir = nullptr;
  CLI::Option* cache_dir = nullptr;
  CLI::Option* svg = nullptr;
  CLI::Option* tolerance = nullptr;
  CLI::Option* threads = nullptr;
};

void add_common(CLI::App* app, Flags& f, Options& o, bool sweep) {
  o.alpha = app->add_option("--alpha", f.alphas, "Amplitude alpha (repeatable)");
  o.ratio = app->add_option("--ratio", f.ratios, "Size ratio R_det/R_coh >= 1 (repeatable)");
  o.tolerance = app->add_option("--tolerance", f.tolerance, "Relative quadrature tolerance");
  o.threads = app->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  o.cache_dir = app->add_option("--cache-dir", f.cache_dir,
                                "Overlap-table cache directory (env RSBOUND_CACHE_DIR)");
  app->add_option("--config", f.config, "JSON config file with flat keys");
  o.out_dir = app->add_option("--out-dir", f.out_dir, "Output directory");
  if (sweep) {
    o.pdark_min = app->add_option("--pdark-min", f.pdark_min, "Smallest dark-count probability");
    o.pdark_max = app->add_option("--pdark-max", f.pdark_max, "Largest dark-count probability");
    o.pdark_points = app->add_option("--pdark-points", f.pdark_points, "Log-spaced grid points");
    o.svg = app->add_flag("--svg,!--no-svg", f.svg, "Emit SVG plots");
  }
}

// defaults <- config file <- RSBOUND_CACHE_DIR <- flags; the cache defaults to <out-dir>/cache.
RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig c;
  if (!f.config.empty()) c.apply_json_file(f.config);
  if (const char* env = std::getenv("RSBOUND_CACHE_DIR"); env != nullptr && *env != '\0') {
    c.cache_dir = env;
  }
  if (o.alpha && o.alpha->count()) c.alphas = f.alphas;
  if (o.ratio && o.ratio->count()) c.r_ratios = f.ratios;
  if (o.pdark_min && o.pdark_min->count()) c.pdark_min = f.pdark_min;
  if (o.pdark_max && o.pdark_max->count()) c.pdark_max = f.pdark_max;
  if (o.pdark_points && o.pdark_points->count()) c.pdark_points = f.pdark_points;
  if (o.out_dir && o.out_dir->count()) c.out_dir = f.out_dir;
  if (o.cache_dir && o.cache_dir->count()) c.cache_dir = f.cache_dir;
  if (c.cache_dir.empty()) c.cache_dir = c.out_dir / "cache";
  if (o.svg && o.svg->count()) c.svg = f.svg;
  if (o.tolerance && o.tolerance->count()) c.tolerance = f.tolerance;
  if (o.threads && o.threads->count()) c.threads = f.threads;
  c.validate();
  return c;
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void report_curve(const SweepCurve& c) {
  std::fprintf(stderr, "alpha=%g r=%g W0=%.10g p_ideal=%.10g rows=%zu boundary=%d%s\n",
               c.params.alpha, c.params.r_ratio, c.w0, ideal_click_probability(c.w0),
               c.rows.size(), c.boundary_rows, c.converged() ? "" : "  UNCONVERGED");
}

void write_curve(const SweepCurve& curve, const RunConfig& config, const std::string& stamp) {
  const auto base = config.out_dir / curve_basename(curve.params.alpha, curve.params.r_ratio);
  write_text_file(base.string() + ".csv", curve_csv(curve));
  write_text_file(base.string() + ".json", curve_metadata_json(curve, config, stamp));
}

int cmd_curve(const RunConfig& config) {
  if (config.alphas.size() != 1 || config.r_ratios.size() != 1) {
    throw ConfigError("curve takes exactly one --alpha and one --ratio");
  }
  const auto curve = run_curve(config, config.alphas[0], config.r_ratios[0]);
  write_curve(curve, config, utc_timestamp());
  report_curve(curve);
  if (config.svg) {
    PlotSeries s{"alpha=" + fmt(curve.params.alpha, "%g") + ", R_det/R_coh=" +
                     fmt(curve.params.r_ratio, "%g"), {}, {}, false};
    for (const auto& r : curve.rows) {
      s.x.push_back(r.p_dark);
      s.y.push_back(r.p_max);
    }
    const auto base = config.out_dir / curve_basename(curve.params.alpha, curve.params.r_ratio);
    write_text_file(base.string() + ".svg",
                    loglog_svg({s}, "Upper bound on the click probability", "P_dark",
                               "P_click^(max)"));
  }
  return curve.converged() ? kOk : kUnconverged;
}

int cmd_figure1(const RunConfig& config) {
  const auto stamp = utc_timestamp();
  std::vector<PlotSeries> upper;
  std::vector<PlotSeries> lower;
  bool ok = true;
  nlohmann::json index = nlohmann::json::array();
  for (double r : config.r_ratios) {
    for (double a : config.alphas) {
      const auto curve = run_curve(config, a, r);
      write_curve(curve, config, stamp);
      report_curve(curve);
      ok = ok && curve.converged();
      const std::string label = "alpha=" + fmt(a, "%g") + ", R_det/R_coh=" + fmt(r, "%g");
      PlotSeries up{label, {}, {}, r != config.r_ratios.front()};
      PlotSeries lo = up;
      for (const auto& row : curve.rows) {
        up.x.push_back(row.p_dark);
        up.y.push_back(row.p_max);
        if (row.ratio) {
          lo.x.push_back(row.p_dark);
          lo.y.push_back(*row.ratio);
        }
      }
      upper.push_back(std::move(up));
      lower.push_back(std::move(lo));
      index.push_back({{"alpha", a},
                       {"r_ratio", r},
                       {"csv", curve_basename(a, r) + ".csv"},
                       {"converged", curve.converged()}});
    }
  }
  if (config.svg) {
    write_text_file(config.out_dir / "figure1_upper.svg",
                    loglog_svg(upper, "Upper bound on the click probability", "P_dark",
                               "P_click^(max)"));
    write_text_file(config.out_dir / "figure1_lower.svg",
                    loglog_svg(lower, "Bound relative to the ideal detector", "P_dark",
                               "P_click^(max) / P_click^(ideal)"));
  }
  nlohmann::json meta = {{"format", "rsbound-figure1/1"}, {"timestamp", stamp}, {"curves", index}};
  write_text_file(config.out_dir / "figure1.json", meta.dump(2) + "\n");
  return ok ? kOk : kUnconverged;
}

int cmd_verify(const RunConfig& config, const Options& o, bool json_out) {
  VerifyOptions v;
  v.params = {1.0, 2.0};
  if (o.alpha->count()) v.params.alpha = config.alphas.front();
  if (o.ratio->count()) v.params.r_ratio = config.r_ratios.front();
  v.threads = config.threads;
  const auto reports = run_verification(v);
  bool all = true;
  nlohmann::json out = nlohmann::json::array();
  if (!json_out) {
    std::printf("%-26s %-34s %-34s %11s %9s %s\n", "quantity", "main", "oracle", "deviation",
                "tolerance", "result");
  }
  for (const auto& r : reports) {
    all = all && r.pass;
    const std::string m = "(" + fmt(r.main_value.real()) + ", " + fmt(r.main_value.imag()) + ")";
    const std::string q = "(" + fmt(r.oracle_value.real()) + ", " + fmt(r.oracle_value.imag()) + ")";
    if (!json_out) {
      std::printf("%-26s %-34s %-34s %11.3e %9.2e %s\n", r.quantity.c_str(), m.c_str(), q.c_str(),
                  r.deviation, r.tolerance, r.pass ? "PASS" : "FAIL");
    }
    out.push_back({{"quantity", r.quantity},
                   {"main", {r.main_value.real(), r.main_value.imag()}},
                   {"oracle", {r.oracle_value.real(), r.oracle_value.imag()}},
                   {"oracle_error", r.oracle_error},
                   {"deviation", r.deviation},
                   {"scale", r.scale},
                   {"tolerance", r.tolerance},
                   {"budget", r.budget},
                   {"pass", r.pass}});
  }
  nlohmann::json doc = {{"format", "rsbound-verify/1"},
                        {"alpha", v.params.alpha},
                        {"r_ratio", v.params.r_ratio},
                        {"reports", out},
                        {"pass", all}};
  if (json_out) std::cout << doc.dump(2) << "\n";
  if (o.out_dir->count()) write_text_file(config.out_dir / "verify_report.json", doc.dump(2) + "\n");
  if (!json_out) std::printf("verify: %s\n", all ? "all checks passed" : "FAILED");
  return all ? kOk : kVerifyFailed;
}

int cmd_probe(const RunConfig& config, const Flags& f) {
  const double a = config.alphas.front();
  const double r = config.r_ratios.front();
  const ModelParams params{a, r};
  const auto table = cached_overlap_table(params, config.overlap_settings(), config.cache_dir);
  const double p_id = ideal_click_probability(table.w0());
  std::printf("# alpha=%g r=%g W0=%.15g p_ideal=%.15g sqrt(p_ideal)=%.15g table_converged=%d\n", a,
              r, table.w0(), p_id, std::sqrt(p_id), table.converged() ? 1 : 0);
  std::printf("# W(eta): direct quadrature and table\n");
  for (double eta : f.etas) {
    const auto w = boosted_overlap(eta, params);
    const auto t = table(eta);
    std::printf("W eta=%-8g re=% .15e im=% .15e err=%.2e table_re=% .15e table_im=% .15e\n", eta,
                w.value.real(), w.value.imag(), w.error, t.real(), t.imag());
  }
  std::printf("# E_zeta, norm factor, bound integrand\n");
  for (double z : f.zetas) {
    const auto e = approx_error_detail(z, table);
    std::printf("zeta=%-12g E=%.15e norm=%.15e L=%g radicand=%.6e converged=%d E/sqrt(p_ideal)=%.8f\n",
                z, e.value, norm_factor(z), e.half_width, e.radicand, e.converged ? 1 : 0,
                p_id > 0.0 ? e.value / std::sqrt(p_id) : 0.0);
    const GaussianKernel g1(z), g2(2.0 * z);
    for (int i = 0; i <= 8; ++i) {
      const double eta = e.half_width * i / 8.0;
      const auto d = table.shifted(eta);
      const double weight = 2.0 * g1(eta) - g2(eta);
      const double one_minus = 1.0 - std::exp(d.real()) * std::cos(d.imag());
      std::printf("  eta=%-10.5g weight=% .6e 1-Re(exp)=% .6e product=% .6e\n", eta, weight,
                  one_minus, weight * one_minus);
    }
  }
  return table.converged() ? kOk : kUnconverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Click-probability bounds for finite-size detectors of coherent states"};
  app.require_subcommand(1);
  Flags f;
  Options curve_o, fig_o, verify_o, probe_o;
  auto* curve = app.add_subcommand("curve", "Sweep p_dark for one (alpha, ratio)");
  add_common(curve, f, curve_o, true);
  auto* fig = app.add_subcommand("figure1", "All figure curves plus two SVG panels");
  add_common(fig, f, fig_o, true);
  auto* verify = app.add_subcommand("verify", "Compare main-path integrals with brute-force oracles");
  add_common(verify, f, verify_o, false);
  verify->add_flag("--json", f.json_out, "Print the report as JSON instead of a table");
  auto* probe = app.add_subcommand("probe", "Diagnostic dump of W(eta), E_zeta and norm factors");
  add_common(probe, f, probe_o, false);
  probe->add_option("--zeta", f.zetas, "zeta values");
  probe->add_option("--eta", f.etas, "eta values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadConfig;
  }

  try {
    if (*curve) return cmd_curve(resolve(f, curve_o));
    if (*fig) return cmd_figure1(resolve(f, fig_o));
    if (*verify) return cmd_verify(resolve(f, verify_o), verify_o, f.json_out);
    if (*probe) return cmd_probe(resolve(f, probe_o), f);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUnconverged;
  }
  return kOk;
}
