#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rsbound/bound.hpp"
#include "support.hpp"

using namespace rsbound;

namespace {

// 1 - I by a plain trapezoid rule on the full weight, no tail split.
double e_trapezoid(double zeta, const OverlapTable& t) {
  const double s = std::sqrt(zeta);
  const double step = std::min(2e-3, s / 50.0);
  const double reach = std::min(t.eta_max(), 14.0 * s * std::numbers::sqrt2);
  const double w0 = t.w0();
  auto weight = [](double eta, double var) {
    return std::exp(-eta * eta / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
  };
  long double integral = 0.0L;
  const long n = static_cast<long>(std::ceil(reach / step));
  const double h = reach / static_cast<double>(n);
  for (long i = -n; i <= n; ++i) {
    const double eta = h * static_cast<double>(i);
    const double w = 2.0 * weight(eta, zeta) - weight(eta, 2.0 * zeta);
    const double re = std::real(std::exp(t(eta) - w0));
    const double end = (i == -n || i == n) ? 0.5 : 1.0;
    integral += end * h * w * re;
  }
  // Outside the table the overlap vanishes and the integrand is exp(-W0) times the weight.
  const double outside = 2.0 * std::erfc(reach / std::sqrt(2.0 * zeta)) -
                         std::erfc(reach / std::sqrt(4.0 * zeta));
  integral += std::exp(-w0) * outside;
  return std::sqrt(std::max(0.0L, 1.0L - integral));
}

const BoundEvaluator& evaluator(double alpha, double r) {
  static std::map<std::pair<double, double>, std::pair<OverlapTable, std::unique_ptr<BoundEvaluator>>>
      cache;
  auto key = std::make_pair(alpha, r);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_pair(test::table_for(alpha, r), nullptr)).first;
    it->second.second = std::make_unique<BoundEvaluator>(it->second.first, ZetaSearchSpec{});
  }
  return *it->second.second;
}

}  // namespace

TEST_CASE("norm factor") {
  CHECK(norm_factor(std::numbers::pi * std::numbers::pi) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(norm_factor(std::numbers::pi * std::numbers::pi / 2.0) ==
        doctest::Approx(std::numbers::e).epsilon(1e-14));
  CHECK(norm_factor(1e12) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(norm_factor(1e12) >= 1.0);
  CHECK(std::isinf(norm_factor(1e-4)));
  CHECK(norm_factor_saturates(1e-4));
  CHECK(norm_factor_saturates(1e-3));
  CHECK_FALSE(norm_factor_saturates(1e-2));
  CHECK_THROWS_AS(norm_factor(0.0), std::invalid_argument);
  CHECK_THROWS_AS(norm_factor(-1.0), std::invalid_argument);
}

TEST_CASE("generic bound") {
  CHECK(generic_bound(0.0, 1.0, 0.0) == 0.0);
  CHECK(generic_bound(0.0, 3.0, 0.04) == doctest::Approx(9.0 * 0.04).epsilon(1e-15));
  CHECK(generic_bound(0.1, 2.0, 0.01) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(generic_bound(0.2, INFINITY, 0.0) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(std::isinf(generic_bound(0.2, INFINITY, 1e-6)));
  CHECK_THROWS_AS(generic_bound(-0.1, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(generic_bound(0.1, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(generic_bound(0.1, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(generic_bound(0.1, 1.0, NAN), std::invalid_argument);
}

TEST_CASE("ideal click probability") {
  CHECK(ideal_click_probability(0.0) == 0.0);
  CHECK(ideal_click_probability(1e-20) == doctest::Approx(1e-20).epsilon(1e-12));
  CHECK(ideal_click_probability(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(ideal_click_probability(-1.0), std::invalid_argument);

  const double p1 = p_ideal(ModelParams{1.0, 2.0}).value;
  CHECK(p1 == doctest::Approx(-std::expm1(-0.020578827911688722)).epsilon(1e-9));
  CHECK(p_ideal(ModelParams{0.0, 1.0}).value == 0.0);
  double prev = 0.0;
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double v = p_ideal(ModelParams{a, 1.0}).value;
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
}

TEST_CASE("approximation error") {
  const OverlapTable zero = test::table_for(0.0, 1.0);
  for (double z : {1e-3, 0.1, 10.0, 1e6}) CHECK(approx_error(z, zero) == doctest::Approx(0.0).epsilon(1e-7));

  CHECK_THROWS_AS(approx_error(0.0, zero), std::invalid_argument);
  CHECK_THROWS_AS(approx_error(-2.0, zero), std::invalid_argument);

  for (auto [alpha, r] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}, std::pair{2.0, 1.0}}) {
    CAPTURE(alpha);
    CAPTURE(r);
    const OverlapTable t = test::table_for(alpha, r);
    const double sqrt_ideal = std::sqrt(ideal_click_probability(t.w0()));
    for (double z : {0.01, 0.1, 1.0, 10.0, 300.0, 1e4}) {
      CAPTURE(z);
      const auto d = approx_error_detail(z, t);
      CHECK(d.converged);
      CHECK(d.value >= 0.0);
      CHECK(d.value <= 1.0);
      CHECK(d.value == doctest::Approx(e_trapezoid(z, t)).epsilon(1e-6));
      CHECK(d.value <= sqrt_ideal * 1.02);
    }
    CHECK(approx_error(1e4, t) == doctest::Approx(sqrt_ideal).epsilon(0.01));
    CHECK(approx_error(1e8, t) == doctest::Approx(sqrt_ideal).epsilon(1e-4));
  }
}

TEST_CASE("search spec validation") {
  ZetaSearchSpec s;
  CHECK_NOTHROW(s.validate());
  s.grid_points = 15;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ZetaSearchSpec{};
  s.zeta_min = 10.0;
  s.zeta_max = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ZetaSearchSpec{};
  s.rel_width = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("bound minimization examples") {
  const auto& vac = evaluator(0.0, 1.0);
  for (double p : {1e-8, 1e-4, 1e-1}) {
    const auto res = vac.minimize(p);
    CHECK(res.p_max == doctest::Approx(p).epsilon(0.005));
    CHECK(res.boundary_minimum);
  }

  const auto& ev = evaluator(1.0, 2.0);
  const auto one = ev.minimize(1.0);
  CHECK(one.p_max == 1.0);
  CHECK(one.raw_bound >= 1.0);

  const double sqrt_ideal = std::sqrt(ideal_click_probability(ev.table().w0()));
  const auto cap = ev.minimize(1e-4);
  CHECK(cap.p_max <= (sqrt_ideal + 1e-2) * (sqrt_ideal + 1e-2) + 1e-6);
  CHECK(cap.converged);

  const auto limit = ev.minimize(0.0);
  CHECK(limit.limit_case);
  CHECK(limit.zeta_star == ev.search().zeta_min);
  CHECK(limit.p_max == doctest::Approx(std::pow(approx_error(1e-3, ev.table()), 2)).epsilon(1e-12));

  CHECK_THROWS_AS(ev.minimize(-1e-3), std::invalid_argument);
  CHECK_THROWS_AS(ev.minimize(1.5), std::invalid_argument);

  const auto direct = bound_min(1e-4, ev.table());
  CHECK(direct.p_max == doctest::Approx(cap.p_max).epsilon(1e-12));
}

TEST_CASE("bound result invariants and dominance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logz(std::log(1e-3), std::log(1e8));
  for (auto [alpha, r] : {std::pair{1.0, 1.0}, std::pair{2.0, 2.0}}) {
    const auto& ev = evaluator(alpha, r);
    for (double p : {1e-10, 1e-6, 1e-3, 0.05, 0.5}) {
      CAPTURE(p);
      const auto res = ev.minimize(p);
      const double s = res.e_zeta + norm_factor(res.zeta_star) * std::sqrt(p);
      CHECK(res.raw_bound == doctest::Approx(s * s).epsilon(1e-13));
      CHECK(res.p_max == std::min(1.0, res.raw_bound));
      CHECK(res.e_zeta == approx_error(res.zeta_star, ev.table()));
      CHECK(res.p_max >= 0.0);
      CHECK(res.p_max <= 1.0);
      for (std::size_t i = 0; i < ev.grid().size(); ++i) {
        const double z = ev.grid()[i];
        CHECK(res.raw_bound <= generic_bound(ev.grid_errors()[i], norm_factor(z), p) + 1e-12);
      }
      for (int i = 0; i < 20; ++i) {
        const double z = std::exp(logz(rng));
        CHECK(res.raw_bound <= generic_bound(approx_error(z, ev.table()), norm_factor(z), p) + 1e-12);
      }
    }
  }
}

TEST_CASE("bound sweep") {
  const auto& ev = evaluator(1.0, 1.0);
  std::vector<double> ps;
  for (int i = 0; i <= 40; ++i) ps.push_back(std::pow(10.0, -10.0 + 0.25 * i));
  const auto rows = bound_sweep(ps, ev, 1);
  const auto rows3 = bound_sweep(ps, ev, 3);
  REQUIRE(rows.size() == ps.size());
  const double sqrt_ideal = std::sqrt(ideal_click_probability(ev.table().w0()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(ps[i]);
    CHECK(rows[i].p_dark == ps[i]);
    CHECK(rows[i].p_max == rows3[i].p_max);
    CHECK(rows[i].zeta_star == rows3[i].zeta_star);
    CHECK(rows[i].p_max <= ev.minimize(ps[i]).p_max);
    const double cap = (sqrt_ideal + std::sqrt(ps[i])) * (sqrt_ideal + std::sqrt(ps[i]));
    CHECK(rows[i].p_max <= cap + 1e-6);
    if (i > 0) {
      CHECK(rows[i].p_max >= rows[i - 1].p_max - 1e-12);
      if (rows[i].raw_bound < 1.0) CHECK(rows[i].p_max > rows[i - 1].p_max);
    }
  }
  CHECK(rows.front().p_max < rows[32].p_max);
}
