#pragma once

// Deterministic adaptive quadrature: Gauss-Kronrod panels with global
// (largest-error-first) bisection, semi-infinite ranges by panel summation
// plus Wynn epsilon extrapolation, and nested tensor-product 2-D integration.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace rsbound {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_subdivisions = 4000;
  /// Kronrod nodes per panel; 15 (G7K15) and 21 (G10K21) are available.
  int panel_order = 21;
  /// For b = +inf: integrate up to this point and check the next panel is
  /// negligible. When infinite, sum panels of tail_panel_width and extrapolate.
  double cutoff = std::numeric_limits<double>::infinity();
  double tail_panel_width = 3.14159265358979323846;
  int max_tail_panels = 400;

  void validate() const;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

struct Interval {
  double lo;
  double hi;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

struct KronrodTable {
  std::span<const double> xgk;  // descending, last entry is the center 0
  std::span<const double> wgk;
  std::span<const double> wg;   // Gauss weights for odd xgk indices (and center if odd count)
  bool gauss_has_center;
};

const KronrodTable& kronrod_table(int order);

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

template <class F, class T>
Panel<T> kronrod_panel(const F& f, double a, double b, const KronrodTable& t, long& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t n = t.xgk.size();
  const T fc = f(center);
  T resk = fc * t.wgk[n - 1];
  T resg{};
  if (t.gauss_has_center) resg = fc * t.wg[t.wg.size() - 1];
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double dx = half * t.xgk[j];
    const T sum = f(center - dx) + f(center + dx);
    resk += sum * t.wgk[j];
    if (j % 2 == 1) resg += sum * t.wg[j / 2];
  }
  evals += static_cast<long>(2 * n - 1);
  resk *= half;
  resg *= half;
  return {a, b, resk, magnitude(resk - resg)};
}

template <class T>
struct PanelOrder {
  bool operator()(const std::pair<double, std::size_t>& x,
                  const std::pair<double, std::size_t>& y) const {
    if (x.first != y.first) return x.first < y.first;
    return x.second > y.second;
  }
};

template <class F, class T>
QuadResult<T> adaptive_finite(const F& f, double a, double b, const QuadratureSpec& spec,
                              int initial_panels) {
  const KronrodTable& table = kronrod_table(spec.panel_order);
  QuadResult<T> out;
  if (a == b) return out;

  std::vector<Panel<T>> panels;
  panels.reserve(static_cast<std::size_t>(initial_panels + spec.max_subdivisions + 1));
  std::priority_queue<std::pair<double, std::size_t>,
                      std::vector<std::pair<double, std::size_t>>, PanelOrder<T>>
      heap;
  T total{};
  double total_err = 0.0;
  const int n0 = std::max(1, initial_panels);
  for (int i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    panels.push_back(kronrod_panel<F, T>(f, lo, hi, table, out.evaluations));
    total += panels.back().value;
    total_err += panels.back().error;
    heap.emplace(panels.back().error, panels.size() - 1);
  }

  int splits = 0;
  bool stalled = false;
  while (total_err > std::max(spec.rel_tol * magnitude(total), spec.abs_tol)) {
    if (splits >= spec.max_subdivisions || heap.empty()) {
      stalled = true;
      break;
    }
    const auto [err, idx] = heap.top();
    const Panel<T> parent = panels[idx];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b) ||
        (parent.b - parent.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(std::abs(parent.a), std::abs(parent.b))) {
      // Panel cannot be refined further; drop it from refinement.
      heap.pop();
      if (heap.empty()) {
        stalled = true;
        break;
      }
      continue;
    }
    heap.pop();
    Panel<T> left = kronrod_panel<F, T>(f, parent.a, mid, table, out.evaluations);
    Panel<T> right = kronrod_panel<F, T>(f, mid, parent.b, table, out.evaluations);
    total += left.value + right.value - parent.value;
    total_err += left.error + right.error - parent.error;
    panels[idx] = left;
    panels.push_back(right);
    heap.emplace(left.error, idx);
    heap.emplace(right.error, panels.size() - 1);
    ++splits;
  }

  // Final accumulation in positional order so the sum does not depend on the
  // refinement history beyond the final partition.
  std::sort(panels.begin(), panels.end(),
            [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });
  T sum{};
  double err = 0.0;
  for (const auto& p : panels) {
    sum += p.value;
    err += p.error;
  }
  out.value = sum;
  out.error = err;
  out.converged = !stalled && err <= std::max(spec.rel_tol * magnitude(sum), spec.abs_tol) * 1.0000001;
  return out;
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
template <class T>
T wynn_epsilon(std::span<const T> sums) {
  const std::size_t n = sums.size();
  if (n < 3) return sums.empty() ? T{} : sums.back();
  std::vector<T> prev(n + 1, T{});  // epsilon_{-1}
  std::vector<T> cur(sums.begin(), sums.end());
  T best = sums.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<T> next(n - k);
    for (std::size_t i = 0; i + k < n; ++i) {
      const T diff = cur[i + 1] - cur[i];
      if (magnitude(diff) == 0.0) return cur[i + 1];
      next[i] = prev[i + 1] + T(1.0) / diff;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) best = cur.back();
  }
  return best;
}

}  // namespace detail

/// Integrate f over (a, b); b may be +infinity.
template <class F>
auto integrate_1d(const F& f, double a, double b, const QuadratureSpec& spec,
                  int initial_panels = 1) {
  using T = std::decay_t<decltype(f(a))>;
  spec.validate();
  if (!std::isfinite(a)) throw std::invalid_argument("integrate_1d: lower limit must be finite");
  if (std::isfinite(b)) return detail::adaptive_finite<F, T>(f, a, b, spec, initial_panels);

  QuadResult<T> out;
  if (std::isfinite(spec.cutoff)) {
    if (!(spec.cutoff > a)) throw std::invalid_argument("integrate_1d: cutoff must exceed a");
    out = detail::adaptive_finite<F, T>(f, a, spec.cutoff, spec, initial_panels);
    auto probe = detail::adaptive_finite<F, T>(f, spec.cutoff, spec.cutoff + spec.tail_panel_width,
                                               spec, 1);
    out.evaluations += probe.evaluations;
    if (detail::magnitude(probe.value) >
        std::max(spec.rel_tol * detail::magnitude(out.value), spec.abs_tol)) {
      out.converged = false;
      out.error += detail::magnitude(probe.value);
    }
    return out;
  }

  // Panel summation with extrapolation. Each panel is integrated to a
  // tighter tolerance than the target so the partial sums are clean.
  QuadratureSpec panel_spec = spec;
  panel_spec.rel_tol = std::max(1e-14, spec.rel_tol * 0.01);
  std::vector<T> sums;
  T partial{};
  T last_estimate{};
  int small_run = 0;
  int stable_run = 0;
  double panel_err = 0.0;
  for (int i = 0; i < spec.max_tail_panels; ++i) {
    const double lo = a + i * spec.tail_panel_width;
    const double hi = lo + spec.tail_panel_width;
    auto piece = detail::adaptive_finite<F, T>(f, lo, hi, panel_spec, 1);
    out.evaluations += piece.evaluations;
    panel_err += piece.error;
    partial += piece.value;
    sums.push_back(partial);
    const double scale = std::max(detail::magnitude(partial), 1e-300);
    const double target = std::max(spec.rel_tol * scale, spec.abs_tol);

    small_run = detail::magnitude(piece.value) <= target ? small_run + 1 : 0;
    if (small_run >= 3) {
      out.value = partial;
      out.error = panel_err + detail::magnitude(piece.value);
      return out;
    }
    const std::size_t window = std::min<std::size_t>(sums.size(), 40);
    const T estimate = detail::wynn_epsilon<T>(
        std::span<const T>(sums.data() + sums.size() - window, window));
    if (sums.size() >= 6 && detail::magnitude(estimate - last_estimate) <= target) {
      if (++stable_run >= 3) {
        out.value = estimate;
        out.error = panel_err + detail::magnitude(estimate - last_estimate);
        return out;
      }
    } else {
      stable_run = 0;
    }
    last_estimate = estimate;
  }
  out.value = last_estimate;
  out.error = panel_err + detail::magnitude(last_estimate - partial);
  out.converged = false;
  return out;
}

/// Nested tensor-product integration of f(x, y) over x-range times y-range.
/// The x range may be semi-infinite. The error estimate adds the outer
/// estimate to the largest inner estimate times the outer length.
template <class F>
auto integrate_2d(const F& f, Interval x, Interval y, const QuadratureSpec& spec,
                  int initial_x_panels = 1, int initial_y_panels = 1) {
  using T = std::decay_t<decltype(f(x.lo, y.lo))>;
  QuadratureSpec inner_spec = spec;
  inner_spec.rel_tol = std::max(1e-14, spec.rel_tol * 0.1);
  double worst_inner = 0.0;
  long inner_evals = 0;
  bool inner_ok = true;
  auto outer = [&](double xv) {
    auto r = integrate_1d([&](double yv) { return f(xv, yv); }, y.lo, y.hi, inner_spec,
                          initial_y_panels);
    worst_inner = std::max(worst_inner, r.error);
    inner_evals += r.evaluations;
    inner_ok = inner_ok && r.converged;
    return r.value;
  };
  QuadResult<T> res = integrate_1d(outer, x.lo, x.hi, spec, initial_x_panels);
  const double span = std::isfinite(x.hi) ? (x.hi - x.lo) : spec.tail_panel_width;
  res.error += worst_inner * span;
  res.evaluations = inner_evals;
  res.converged = res.converged && inner_ok;
  return res;
}

}  // namespace rsbound
