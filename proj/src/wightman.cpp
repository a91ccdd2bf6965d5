#include "rsbound/wightman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rsbound/parallel.hpp"

namespace rsbound {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr char kTableFormat[] = "rsbound-overlap-table/1";

// int_0^umax u m(u)^2 du for the standard profile, used to scale absolute
// tolerances of the overlap integrals.
double unit_self_integral(const QuadratureSpec& spec) {
  const auto& profile = OnShellProfile::standard();
  const double umax = profile.u_max();
  auto res = integrate_1d(
      [&profile](double u) {
        const double m = profile.h_over_u(u);
        return u * m * m;
      },
      0.0, umax, spec, static_cast<int>(std::ceil(umax / 4.0)));
  return res.value;
}

double self_scale() {
  static const double scale = [] {
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    return unit_self_integral(spec);
  }();
  return scale;
}

// Inner light-cone integral at fixed s for unit amplitude:
//   int_0^{umax e^-s} q m(q e^-s) m(q e^s) exp(i phi q) dq,  phi = 2 r t cosh s.
QuadResult<cplx> lightcone_inner(double s, double phi, const QuadratureSpec& spec) {
  const auto& profile = OnShellProfile::standard();
  const double es = std::exp(s);
  const double ems = 1.0 / es;
  const double qmax = profile.u_max() * ems;
  const double freq = std::abs(phi) + es + ems;
  const int panels = std::max(4, static_cast<int>(std::ceil(qmax * freq / (2.0 * kPi))));
  QuadratureSpec inner = spec;
  inner.abs_tol = std::max(spec.abs_tol, 1e-3 * spec.rel_tol * self_scale());
  inner.max_subdivisions = std::max(spec.max_subdivisions, 4 * panels);
  return integrate_1d(
      [&](double q) {
        const double amp = q * profile.h_over_u(q * ems) * profile.h_over_u(q * es);
        return cplx(amp * std::cos(phi * q), amp * std::sin(phi * q));
      },
      0.0, qmax, inner, panels);
}

QuadResult<cplx> unit_boosted_overlap(double eta, double r_ratio, const QuadratureSpec& spec) {
  constexpr double kFourPiSq = 4.0 * kPi * kPi;
  if (eta == 0.0) {
    auto inner = lightcone_inner(0.0, 0.0, spec);
    inner.value *= 0.5 * kFourPiSq;
    inner.error *= 0.5 * kFourPiSq;
    return inner;
  }
  const double a = std::abs(eta);
  const double t = std::tanh(0.5 * eta);
  const double prefactor = kFourPiSq / std::sinh(a);
  long inner_evals = 0;
  double inner_err = 0.0;
  bool inner_ok = true;
  QuadratureSpec outer = spec;
  outer.abs_tol = std::max(spec.abs_tol, 1e-3 * spec.rel_tol * self_scale() * std::sinh(a));
  auto res = integrate_1d(
      [&](double s) {
        auto in = lightcone_inner(s, 2.0 * r_ratio * t * std::cosh(s), spec);
        inner_evals += in.evaluations;
        inner_err = std::max(inner_err, in.error);
        inner_ok = inner_ok && in.converged;
        return in.value;
      },
      0.0, 0.5 * a, outer, std::max(1, static_cast<int>(std::ceil(a))));
  res.value *= prefactor;
  res.error = prefactor * (res.error + 0.5 * a * inner_err);
  res.evaluations = inner_evals;
  res.converged = res.converged && inner_ok;
  return res;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

QuadratureSpec default_overlap_spec() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-15;
  spec.max_subdivisions = 4000;
  return spec;
}

QuadResult<double> w2_self(const ModelParams& params, const QuadratureSpec& spec) {
  params.validate();
  const auto& profile = OnShellProfile::standard();
  const double umax = profile.u_max();
  // h(u)^2 / u = u m(u)^2
  auto res = integrate_1d(
      [&profile](double u) {
        const double m = profile.h_over_u(u);
        return u * m * m;
      },
      0.0, umax, spec, static_cast<int>(std::ceil(umax / 4.0)));
  const double c = 2.0 * kPi * kPi * params.alpha * params.alpha;
  res.value *= c;
  res.error *= c;
  return res;
}

QuadResult<cplx> boosted_overlap(double eta, const ModelParams& params,
                                 const QuadratureSpec& spec) {
  params.validate();
  if (!std::isfinite(eta)) throw std::invalid_argument("boosted_overlap: eta must be finite");
  auto res = unit_boosted_overlap(eta, params.r_ratio, spec);
  const double a2 = params.alpha * params.alpha;
  res.value *= a2;
  res.error *= a2;
  return res;
}

QuadResult<cplx> boosted_overlap_kmu(double eta, const ModelParams& params,
                                     const QuadratureSpec& spec) {
  params.validate();
  const auto& profile = OnShellProfile::standard();
  const double ch = std::cosh(eta);
  const double sh = std::sinh(eta);
  const double r = params.r_ratio;
  const double kmax = profile.u_max() / std::numbers::sqrt2;
  const double freq = std::numbers::sqrt2 * r * (ch - 1.0 + std::abs(sh)) + 2.0 * ch;
  const int k_panels = std::max(8, static_cast<int>(std::ceil(kmax * freq / (2.0 * kPi))));
  const int mu_panels = std::max(2, static_cast<int>(std::ceil(kmax * freq / (2.0 * kPi))) / 8);
  QuadratureSpec s = spec;
  s.abs_tol = std::max(spec.abs_tol, 1e-3 * spec.rel_tol * self_scale());
  s.max_subdivisions = std::max(spec.max_subdivisions, 4 * k_panels);
  auto res = integrate_2d(
      [&](double k, double mu) {
        const double q = std::numbers::sqrt2 * k;
        const double qb = q * (ch + mu * sh);
        const double amp = k * radial_transform(q, params, profile) *
                           radial_transform(qb, params, profile);
        const double phase = q * r * (mu * (ch - 1.0) + sh);
        return cplx(amp * std::cos(phase), amp * std::sin(phase));
      },
      {0.0, kmax}, {-1.0, 1.0}, s, k_panels, mu_panels);
  const double c = 1.0 / (8.0 * kPi * kPi);
  res.value *= c;
  res.error *= c;
  return res;
}

void OverlapSettings::validate() const {
  if (!(eta_max > 0.0) || !std::isfinite(eta_max)) {
    throw std::invalid_argument("OverlapSettings: eta_max must be positive and finite");
  }
  if (nodes_per_panel < 4) throw std::invalid_argument("OverlapSettings: nodes_per_panel < 4");
  if (!(tail_threshold > 0.0)) throw std::invalid_argument("OverlapSettings: tail_threshold <= 0");
  if (!(interp_tolerance > 0.0)) {
    throw std::invalid_argument("OverlapSettings: interp_tolerance <= 0");
  }
  if (threads < 1) throw std::invalid_argument("OverlapSettings: threads < 1");
  spec.validate();
}

std::string OverlapSettings::hash(double r_ratio) const {
  std::string key = std::string(kTableFormat) + ";r=" + hexfloat(r_ratio) +
                    ";eta_max=" + hexfloat(eta_max) +
                    ";nodes=" + std::to_string(nodes_per_panel) +
                    ";tail=" + hexfloat(tail_threshold) + ";interp=" + hexfloat(interp_tolerance) +
                    ";rel=" + hexfloat(spec.rel_tol) + ";abs=" + hexfloat(spec.abs_tol) +
                    ";order=" + std::to_string(spec.panel_order) +
                    ";maxsub=" + std::to_string(spec.max_subdivisions) +
                    ";umax=" + hexfloat(OnShellProfile::standard().u_max());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return buf;
}

std::vector<double> overlap_breakpoints(double eta_max) {
  std::vector<double> b = {0.0, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
  for (double x = 1.5; x <= 8.0 + 1e-12; x += 0.5) b.push_back(x);
  for (double x = 10.0; x <= eta_max + 1e-12; x += 2.0) b.push_back(x);
  while (b.size() > 1 && b.back() > eta_max - 1e-12) b.pop_back();
  b.push_back(eta_max);
  return b;
}

std::complex<double> OverlapTable::operator()(double eta) const {
  const double a = std::abs(eta);
  if (a > breaks_.back()) return {0.0, 0.0};
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), a);
  std::size_t idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
  idx = std::clamp<std::size_t>(idx, 1, breaks_.size() - 1) - 1;
  const double lo = breaks_[idx];
  const double hi = breaks_[idx + 1];
  const double t = 2.0 * (a - lo) / (hi - lo) - 1.0;
  const cplx* c = coeffs_.data() + idx * static_cast<std::size_t>(order_);
  cplx b1 = 0.0;
  cplx b2 = 0.0;
  for (int k = order_ - 1; k > 0; --k) {
    const cplx b0 = c[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  cplx v = scale_ * (c[0] + t * b1 - b2);
  return eta < 0.0 ? std::conj(v) : v;
}

std::complex<double> OverlapTable::shifted(double eta) const { return (*this)(eta) - w0(); }

std::vector<std::complex<double>> OverlapTable::node_values() const {
  std::vector<cplx> out(unit_values_.size());
  std::transform(unit_values_.begin(), unit_values_.end(), out.begin(),
                 [this](const cplx& v) { return scale_ * v; });
  return out;
}

void OverlapTable::fit() {
  const auto n = static_cast<std::size_t>(order_);
  const std::size_t panels = breaks_.size() - 1;
  coeffs_.assign(panels * n, cplx{});
  for (std::size_t p = 0; p < panels; ++p) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        // Ascending node j sits at x = cos(pi (n - 1 - j + 1/2) / n).
        sum += unit_values_[p * n + j] *
               std::cos(kPi * static_cast<double>(k) * (static_cast<double>(n - 1 - j) + 0.5) /
                        static_cast<double>(n));
      }
      coeffs_[p * n + k] = 2.0 * sum / static_cast<double>(n);
    }
    coeffs_[p * n] *= 0.5;
  }
}

OverlapTable OverlapTable::with_alpha(double alpha) const {
  OverlapTable t = *this;
  t.params_.alpha = alpha;
  t.params_.validate();
  t.scale_ = alpha * alpha;
  return t;
}

OverlapTable build_overlap_table(const ModelParams& params, const OverlapSettings& settings) {
  params.validate();
  settings.validate();
  OverlapTable t;
  t.params_ = params;
  t.scale_ = params.alpha * params.alpha;
  t.breaks_ = overlap_breakpoints(settings.eta_max);
  t.order_ = settings.nodes_per_panel;
  t.interp_tolerance_ = settings.interp_tolerance;
  t.hash_ = settings.hash(params.r_ratio);

  const auto n = static_cast<std::size_t>(t.order_);
  const std::size_t panels = t.breaks_.size() - 1;
  t.nodes_.resize(panels * n);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = t.breaks_[p];
    const double hi = t.breaks_[p + 1];
    for (std::size_t j = 0; j < n; ++j) {
      // Chebyshev points of the first kind, ascending within the panel.
      const double x = -std::cos(kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
      t.nodes_[p * n + j] = lo + 0.5 * (hi - lo) * (x + 1.0);
    }
  }
  std::vector<double> checks(panels);
  for (std::size_t p = 0; p < panels; ++p) checks[p] = 0.5 * (t.breaks_[p] + t.breaks_[p + 1]);

  const std::size_t total = t.nodes_.size() + checks.size() + 1;
  std::vector<QuadResult<cplx>> results(total);
  parallel_for(total, settings.threads, [&](std::size_t i) {
    double eta = 0.0;
    if (i < t.nodes_.size()) {
      eta = t.nodes_[i];
    } else if (i < t.nodes_.size() + checks.size()) {
      eta = checks[i - t.nodes_.size()];
    }
    results[i] = unit_boosted_overlap(eta, params.r_ratio, settings.spec);
  });

  t.unit_values_.resize(t.nodes_.size());
  t.errors_.resize(t.nodes_.size());
  for (std::size_t p = 0; p < panels; ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& r = results[p * n + j];
      t.unit_values_[p * n + j] = r.value;
      t.errors_[p * n + j] = r.error;
      t.quad_ok_ = t.quad_ok_ && r.converged;
    }
  }
  t.fit();

  const auto& w0r = results.back();
  t.quad_ok_ = t.quad_ok_ && w0r.converged;
  // The eta = 0 transform is real by construction; guard the convention anyway.
  if (std::abs(w0r.value.imag()) > 1e-10 * std::abs(w0r.value.real())) {
    throw std::logic_error("boosted_overlap(0) is not real");
  }
  t.unit_w0_ = w0r.value.real();

  double worst = 0.0;
  const OverlapTable unit = t.with_alpha(1.0);
  for (std::size_t p = 0; p < panels; ++p) {
    const auto& r = results[t.nodes_.size() + p];
    t.quad_ok_ = t.quad_ok_ && r.converged;
    worst = std::max(worst, std::abs(unit(checks[p]) - r.value));
  }
  t.unit_interp_error_ = worst;
  t.interp_ok_ = worst <= settings.interp_tolerance * t.unit_w0_;
  const auto tail = unit_boosted_overlap(settings.eta_max, params.r_ratio, settings.spec);
  t.tail_ok_ = std::abs(tail.value) <= settings.tail_threshold * t.unit_w0_;
  return t;
}

void OverlapTable::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["format"] = kTableFormat;
  j["settings_hash"] = hash_;
  j["r_ratio"] = params_.r_ratio;
  j["unit_w0"] = unit_w0_;
  j["breakpoints"] = breaks_;
  j["order"] = order_;
  j["nodes"] = nodes_;
  std::vector<double> re;
  std::vector<double> im;
  for (const auto& v : unit_values_) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = re;
  j["im"] = im;
  j["errors"] = errors_;
  j["interp_error"] = unit_interp_error_;
  j["interp_tolerance"] = interp_tolerance_;
  j["tail_ok"] = tail_ok_;
  j["quad_ok"] = quad_ok_;
  j["interp_ok"] = interp_ok_;
  std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, file);
}

OverlapTable OverlapTable::load(const std::filesystem::path& file, double alpha) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  const auto j = nlohmann::json::parse(in);
  if (j.at("format").get<std::string>() != kTableFormat) {
    throw std::runtime_error("unsupported table format in " + file.string());
  }
  OverlapTable t;
  t.params_ = {alpha, j.at("r_ratio").get<double>()};
  t.params_.validate();
  t.scale_ = alpha * alpha;
  t.hash_ = j.at("settings_hash").get<std::string>();
  t.unit_w0_ = j.at("unit_w0").get<double>();
  t.breaks_ = j.at("breakpoints").get<std::vector<double>>();
  t.order_ = j.at("order").get<int>();
  t.nodes_ = j.at("nodes").get<std::vector<double>>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size() || re.size() != t.nodes_.size() ||
      t.nodes_.size() != (t.breaks_.size() - 1) * static_cast<std::size_t>(t.order_)) {
    throw std::runtime_error("inconsistent table in " + file.string());
  }
  t.errors_ = j.at("errors").get<std::vector<double>>();
  t.unit_interp_error_ = j.at("interp_error").get<double>();
  t.interp_tolerance_ = j.at("interp_tolerance").get<double>();
  t.tail_ok_ = j.at("tail_ok").get<bool>();
  t.quad_ok_ = j.at("quad_ok").get<bool>();
  t.interp_ok_ = j.at("interp_ok").get<bool>();
  t.unit_values_.resize(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) t.unit_values_[i] = {re[i], im[i]};
  t.fit();
  return t;
}

OverlapTable cached_overlap_table(const ModelParams& params, const OverlapSettings& settings,
                                  const std::filesystem::path& cache_dir) {
  if (cache_dir.empty()) return build_overlap_table(params, settings);
  const auto file = cache_dir / ("overlap_" + settings.hash(params.r_ratio) + ".json");
  if (std::filesystem::exists(file)) {
    auto t = OverlapTable::load(file, params.alpha);
    if (t.settings_hash() == settings.hash(params.r_ratio)) return t;
  }
  auto t = build_overlap_table(params, settings);
  t.with_alpha(1.0).save(file);
  return t;
}

}  // namespace rsbound
