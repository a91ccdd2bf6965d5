#include "rsbound/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rsbound/parallel.hpp"
#include "rsbound/special.hpp"

namespace rsbound {

namespace {

constexpr double kWindowSigmas = 12.0;
constexpr double kGolden = 0.6180339887498949;

QuadratureSpec window_spec() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-19;
  spec.max_subdivisions = 2000;
  return spec;
}

// 1 - Re exp(d) without cancellation for small d.
double one_minus_re_exp(std::complex<double> d) {
  const double half = std::sin(0.5 * d.imag());
  return 2.0 * half * half - std::expm1(d.real()) * std::cos(d.imag());
}

}  // namespace

ApproxError approx_error_detail(double zeta, const OverlapTable& table) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) {
    throw std::invalid_argument("approx_error: zeta must be positive and finite, got " +
                                std::to_string(zeta));
  }
  const GaussianKernel narrow(zeta);
  const GaussianKernel wide(2.0 * zeta);
  const double half_width = std::min(table.eta_max(), kWindowSigmas * std::sqrt(2.0 * zeta));

  ApproxError out;
  out.half_width = half_width;
  out.converged = table.converged();

  // Panel edges: table breakpoints and the kernel's own scale.
  std::vector<double> edges{0.0, half_width};
  for (double b : table.breakpoints()) {
    if (b > 0.0 && b < half_width) edges.push_back(b);
  }
  for (double s = std::sqrt(zeta); s < half_width; s *= 2.0) edges.push_back(s);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const auto spec = window_spec();
  auto integrand = [&](double eta) {
    const double w = 2.0 * narrow(eta) - wide(eta);
    return w * one_minus_re_exp(table.shifted(eta));
  };
  double window = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto r = integrate_1d(integrand, edges[i], edges[i + 1], spec);
    window += r.value;
    out.quad_error += r.error;
    out.converged = out.converged && r.converged;
  }
  const double tail = 2.0 * narrow.tail_mass(half_width) - wide.tail_mass(half_width);
  const double p_far = -std::expm1(-table.w0());
  out.radicand = 2.0 * window + p_far * tail;
  out.quad_error *= 2.0;
  if (out.radicand < 0.0) {
    out.clamped = true;
    out.value = 0.0;
  } else {
    out.value = std::min(1.0, std::sqrt(out.radicand));
  }
  return out;
}

double approx_error(double zeta, const OverlapTable& table) {
  return approx_error_detail(zeta, table).value;
}

double norm_factor(double zeta) {
  if (!(zeta > 0.0)) {
    throw std::invalid_argument("norm_factor: zeta must be positive, got " + std::to_string(zeta));
  }
  return std::exp(std::numbers::pi * std::numbers::pi / (2.0 * zeta));
}

bool norm_factor_saturates(double zeta) { return std::isinf(norm_factor(zeta)); }

double generic_bound(double e, double norm, double p_dark) {
  if (!(e >= 0.0)) throw std::invalid_argument("generic_bound: E must be >= 0");
  if (!(norm >= 1.0)) throw std::invalid_argument("generic_bound: norm must be >= 1");
  if (!(p_dark >= 0.0 && p_dark <= 1.0)) {
    throw std::invalid_argument("generic_bound: p_dark must lie in [0, 1]");
  }
  if (p_dark == 0.0) return e * e;
  const double s = e + norm * std::sqrt(p_dark);
  return s * s;
}

double ideal_click_probability(double w0) {
  if (!(w0 >= 0.0)) throw std::invalid_argument("ideal_click_probability: W0 must be >= 0");
  return -std::expm1(-w0);
}

QuadResult<double> p_ideal(const ModelParams& params, const QuadratureSpec& spec) {
  auto w = w2_self(params, spec);
  QuadResult<double> out = w;
  out.value = ideal_click_probability(w.value);
  out.error = std::exp(-w.value) * w.error;
  return out;
}

void ZetaSearchSpec::validate() const {
  if (!(zeta_min > 0.0) || !(zeta_max > zeta_min) || !std::isfinite(zeta_max)) {
    throw std::invalid_argument("ZetaSearchSpec: need 0 < zeta_min < zeta_max < inf");
  }
  if (grid_points < 16) throw std::invalid_argument("ZetaSearchSpec: grid_points must be >= 16");
  if (!(rel_width > 0.0 && rel_width < 1.0)) {
    throw std::invalid_argument("ZetaSearchSpec: rel_width must lie in (0, 1)");
  }
}

BoundEvaluator::BoundEvaluator(const OverlapTable& table, const ZetaSearchSpec& search,
                               int threads)
    : table_(&table), search_(search) {
  search_.validate();
  const auto n = static_cast<std::size_t>(search_.grid_points);
  const double lo = std::log(search_.zeta_min);
  const double hi = std::log(search_.zeta_max);
  grid_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid_[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid_.front() = search_.zeta_min;
  grid_.back() = search_.zeta_max;
  errors_.assign(n, 0.0);
  std::vector<char> ok(n, 1);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto e = approx_error_detail(grid_[i], table);
    errors_[i] = e.value;
    ok[i] = e.converged ? 1 : 0;
  });
  grid_ok_ = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

BoundResult BoundEvaluator::minimize(double p_dark) const {
  if (!(p_dark >= 0.0 && p_dark <= 1.0)) {
    throw std::invalid_argument("bound_min: p_dark must lie in [0, 1], got " +
                                std::to_string(p_dark));
  }
  BoundResult res;
  res.p_dark = p_dark;
  res.converged = grid_ok_;

  if (p_dark == 0.0) {
    res.limit_case = true;
    res.zeta_star = grid_.front();
    res.e_zeta = errors_.front();
    res.raw_bound = res.e_zeta * res.e_zeta;
    res.p_max = std::min(1.0, res.raw_bound);
    return res;
  }

  auto value_at = [&](double zeta, double e) { return generic_bound(e, norm_factor(zeta), p_dark); };

  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double v = value_at(grid_[i], errors_[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  res.zeta_star = grid_[best];
  res.e_zeta = errors_[best];
  res.raw_bound = best_value;

  if (best == 0 || best + 1 == grid_.size()) {
    res.boundary_minimum = true;
  } else {
    // Golden-section search in log zeta on the bracketing triple.
    auto eval = [&](double t) {
      const double zeta = std::exp(t);
      const auto e = approx_error_detail(zeta, *table_);
      res.converged = res.converged && e.converged;
      const double v = value_at(zeta, e.value);
      if (v < res.raw_bound) {
        res.raw_bound = v;
        res.zeta_star = zeta;
        res.e_zeta = e.value;
      }
      return v;
    };
    double a = std::log(grid_[best - 1]);
    double b = std::log(grid_[best + 1]);
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > search_.rel_width) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kGolden * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kGolden * (b - a);
        fd = eval(d);
      }
    }
  }
  res.p_max = std::min(1.0, res.raw_bound);
  return res;
}

BoundResult bound_min(double p_dark, const OverlapTable& table, const ZetaSearchSpec& search) {
  return BoundEvaluator(table, search).minimize(p_dark);
}

std::vector<BoundResult> bound_sweep(std::span<const double> p_darks,
                                     const BoundEvaluator& evaluator, int threads) {
  std::vector<BoundResult> rows(p_darks.size());
  parallel_for(rows.size(), threads,
               [&](std::size_t i) { rows[i] = evaluator.minimize(p_darks[i]); });
  // Cross-check every row against the other rows' optimal (zeta, E) pairs.
  const auto optima = rows;
  for (auto& row : rows) {
    if (row.limit_case) continue;
    for (const auto& other : optima) {
      if (other.limit_case) continue;
      const double v = generic_bound(other.e_zeta, norm_factor(other.zeta_star), row.p_dark);
      if (v < row.raw_bound) {
        row.raw_bound = v;
        row.zeta_star = other.zeta_star;
        row.e_zeta = other.e_zeta;
        row.boundary_minimum = other.boundary_minimum;
      }
    }
    row.p_max = std::min(1.0, row.raw_bound);
  }
  return rows;
}

}  // namespace rsbound
