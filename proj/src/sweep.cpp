#include "rsbound/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "rsbound/parallel.hpp"

namespace rsbound {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("config key '" + key + "': expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError("config key '" + key + "': expected a number or a list of numbers");
  }
  return out;
}

template <class T>
T typed(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "': wrong type");
  }
}

}  // namespace

const std::vector<std::string>& RunConfig::json_keys() {
  static const std::vector<std::string> keys = {
      "alphas",    "ratios",   "pdark_min", "pdark_max",   "pdark_points",   "tolerance",
      "eta_max",   "zeta_min", "zeta_max",  "zeta_points", "zeta_rel_width", "out_dir",
      "cache_dir", "svg",      "threads"};
  return keys;
}

void RunConfig::apply_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "alphas") {
      alphas = number_list(v, key);
    } else if (key == "ratios") {
      r_ratios = number_list(v, key);
    } else if (key == "pdark_min") {
      pdark_min = typed<double>(v, key);
    } else if (key == "pdark_max") {
      pdark_max = typed<double>(v, key);
    } else if (key == "pdark_points") {
      pdark_points = typed<int>(v, key);
    } else if (key == "tolerance") {
      tolerance = typed<double>(v, key);
    } else if (key == "eta_max") {
      eta_max = typed<double>(v, key);
    } else if (key == "zeta_min") {
      search.zeta_min = typed<double>(v, key);
    } else if (key == "zeta_max") {
      search.zeta_max = typed<double>(v, key);
    } else if (key == "zeta_points") {
      search.grid_points = typed<int>(v, key);
    } else if (key == "zeta_rel_width") {
      search.rel_width = typed<double>(v, key);
    } else if (key == "out_dir") {
      out_dir = typed<std::string>(v, key);
    } else if (key == "cache_dir") {
      cache_dir = typed<std::string>(v, key);
    } else if (key == "svg") {
      svg = typed<bool>(v, key);
    } else if (key == "threads") {
      threads = typed<int>(v, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void RunConfig::apply_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_json(ss.str());
}

void RunConfig::validate() const {
  if (alphas.empty()) throw ConfigError("alphas must not be empty");
  if (r_ratios.empty()) throw ConfigError("ratios must not be empty");
  for (double a : alphas) {
    if (!std::isfinite(a)) throw ConfigError("alpha values must be finite");
  }
  for (double r : r_ratios) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw ConfigError("ratio values must be finite and >= 1");
  }
  if (!(pdark_min > 0.0 && pdark_min <= pdark_max && pdark_max <= 1.0)) {
    throw ConfigError("need 0 < pdark_min <= pdark_max <= 1");
  }
  if (pdark_points < 1) throw ConfigError("pdark_points must be >= 1");
  if (pdark_points == 1 && pdark_min != pdark_max) {
    throw ConfigError("pdark_points = 1 requires pdark_min == pdark_max");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
  try {
    search.validate();
    overlap_settings().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> RunConfig::pdark_grid() const {
  std::vector<double> grid(static_cast<std::size_t>(pdark_points));
  if (pdark_points == 1) {
    grid[0] = pdark_min;
    return grid;
  }
  const double lo = std::log10(pdark_min);
  const double hi = std::log10(pdark_max);
  for (int i = 0; i < pdark_points; ++i) {
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / (pdark_points - 1));
  }
  grid.front() = pdark_min;
  grid.back() = pdark_max;
  return grid;
}

OverlapSettings RunConfig::overlap_settings() const {
  OverlapSettings s;
  s.eta_max = eta_max;
  s.spec.rel_tol = tolerance;
  s.threads = threads;
  return s;
}

SweepCurve sweep_curve(const OverlapTable& table, std::span<const double> p_darks,
                       const ZetaSearchSpec& search, int threads) {
  std::vector<double> sorted(p_darks.begin(), p_darks.end());
  std::sort(sorted.begin(), sorted.end());

  SweepCurve curve;
  curve.params = table.params();
  curve.settings_hash = table.settings_hash();
  curve.w0 = table.w0();
  curve.eta_max = table.eta_max();
  curve.k_max = OnShellProfile::standard().u_max() / std::numbers::sqrt2;
  curve.table_interp_error = table.max_interp_error();
  curve.table_converged = table.converged();

  const BoundEvaluator evaluator(table, search, threads);
  const auto results = bound_sweep(sorted, evaluator, threads);
  const double p_id = ideal_click_probability(table.w0());
  for (const auto& r : results) {
    SweepRow row;
    row.p_dark = r.p_dark;
    row.p_max = r.p_max;
    row.raw_bound = r.raw_bound;
    row.zeta_star = r.zeta_star;
    row.e_zeta = r.e_zeta;
    row.p_ideal = p_id;
    if (p_id > 0.0) row.ratio = r.p_max / p_id;
    row.converged = r.converged;
    row.boundary_minimum = r.boundary_minimum;
    curve.rows_converged = curve.rows_converged && r.converged;
    curve.boundary_rows += r.boundary_minimum ? 1 : 0;
    curve.rows.push_back(row);
  }
  return curve;
}

SweepCurve run_curve(const RunConfig& config, double alpha, double r_ratio) {
  const ModelParams params{alpha, r_ratio};
  params.validate();
  if (!config.cache_dir.empty()) std::filesystem::create_directories(config.cache_dir);
  const auto table = cached_overlap_table(params, config.overlap_settings(), config.cache_dir);
  const auto grid = config.pdark_grid();
  return sweep_curve(table, grid, config.search, config.threads);
}

std::string curve_csv(const SweepCurve& curve) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : curve.rows) {
    out += fmt(r.p_dark) + "," + fmt(r.p_max) + "," + fmt(r.raw_bound) + "," + fmt(r.zeta_star) +
           "," + fmt(r.e_zeta) + "," + fmt(r.p_ideal) + "," + (r.ratio ? fmt(*r.ratio) : "") + "\n";
  }
  return out;
}

std::string curve_metadata_json(const SweepCurve& curve, const RunConfig& config,
                                const std::string& timestamp) {
  json j;
  j["format"] = "rsbound-curve/1";
  j["timestamp"] = timestamp;
  j["alpha"] = curve.params.alpha;
  j["r_ratio"] = curve.params.r_ratio;
  j["w0"] = curve.w0;
  j["p_ideal"] = ideal_click_probability(curve.w0);
  j["settings_hash"] = curve.settings_hash;
  j["eta_max"] = curve.eta_max;
  j["k_max"] = curve.k_max;
  j["table_interp_error"] = curve.table_interp_error;
  j["tolerance"] = config.tolerance;
  j["zeta_search"] = {{"zeta_min", config.search.zeta_min},
                      {"zeta_max", config.search.zeta_max},
                      {"grid_points", config.search.grid_points},
                      {"rel_width", config.search.rel_width}};
  j["flags"] = {{"table_converged", curve.table_converged},
                {"rows_converged", curve.rows_converged},
                {"boundary_rows", curve.boundary_rows}};
  j["rows"] = curve.rows.size();
  return j.dump(2) + "\n";
}

std::string curve_basename(double alpha, double r_ratio) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "curve_a%g_r%g", alpha, r_ratio);
  return buf;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
  const double width = 760.0;
  const double height = 520.0;
  const double left = 90.0;
  const double right = 200.0;
  const double top = 50.0;
  const double bottom = 70.0;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = ymin = -1.0;
    xmax = ymax = 0.0;
  }
  xmin = std::floor(xmin);
  xmax = std::max(std::ceil(xmax), xmin + 1.0);
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1.0);

  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
    << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
    << xml_escape(title) << "</text>\n";

  // Decade grid and tick labels.
  const int xstep = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / 10.0)));
  const int ystep = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 10.0)));
  o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); d += xstep) {
    o << "<line x1=\"" << num(px(d)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(d))
      << "\" y2=\"" << num(top + ph) << "\"/>\n";
  }
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); d += ystep) {
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(d)) << "\" x2=\"" << num(left + pw)
      << "\" y2=\"" << num(py(d)) << "\"/>\n";
  }
  o << "</g>\n";
  o << "<g font-size=\"12\">\n";
  for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); d += xstep) {
    o << "<text x=\"" << num(px(d)) << "\" y=\"" << num(top + ph + 20)
      << "\" text-anchor=\"middle\">10<tspan dy=\"-6\" font-size=\"9\">" << d << "</tspan></text>\n";
  }
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); d += ystep) {
    o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(d) + 4)
      << "\" text-anchor=\"end\">10<tspan dy=\"-6\" font-size=\"9\">" << d << "</tspan></text>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text class=\"x-label\" x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 20)
    << "\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(x_label) << "</text>\n";
  o << "<text class=\"y-label\" x=\"24\" y=\"" << num(top + ph / 2)
    << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 24 " << num(top + ph / 2)
    << ")\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(px(std::log10(s.x[i]))) + "," + num(py(std::log10(s.y[i])));
    }
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts << "\"/>\n";
    const double ly = top + 16.0 + 22.0 * static_cast<double>(k);
    const double lx = left + pw + 16.0;
    o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 28)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    o << "<text x=\"" << num(lx + 34) << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">"
      << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace rsbound
