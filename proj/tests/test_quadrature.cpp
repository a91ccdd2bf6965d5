#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rsbound/quadrature.hpp"
#include "rsbound/special.hpp"

using namespace rsbound;

TEST_CASE("spec validation") {
  QuadratureSpec s;
  CHECK_NOTHROW(s.validate());
  s.rel_tol = 1e-15;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.rel_tol = 0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = QuadratureSpec{};
  s.panel_order = 3;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.panel_order = 15;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("gauss_legendre rule") {
  for (int n : {1, 2, 5, 16, 33}) {
    const auto r = gauss_legendre(n);
    double wsum = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      wsum += r.weights[i];
      moment += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(moment == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("integrate_1d basic integrals") {
  QuadratureSpec s;
  auto one = integrate_1d([](double) { return 1.0; }, 0.0, 1.0, s);
  CHECK(std::abs(one.value - 1.0) <= 1e-14);
  CHECK(one.converged);
  CHECK(one.error >= 0.0);

  auto ex = integrate_1d([](double x) { return std::exp(-x); }, 0.0, INFINITY, s);
  CHECK(ex.converged);
  CHECK(std::abs(ex.value - 1.0) <= std::max(s.rel_tol, 1e-15));

  auto bes = integrate_1d([](double x) { return x == 0.0 ? 0.5 : bessel_j1(x) / x; }, 0.0,
                          INFINITY, s);
  CHECK(std::abs(bes.value - 1.0) <= 1e-8);

  auto osc = integrate_1d([](double x) { return x * x * bessel_j1(40.0 * x); }, 0.0, 1.0, s);
  CHECK(std::abs(osc.value - std::cyl_bessel_j(2.0, 40.0) / 40.0) <= 1e-15);
}

TEST_CASE("integrate_1d complex values") {
  QuadratureSpec s;
  auto r = integrate_1d([](double x) { return std::polar(1.0, 3.0 * x); }, 0.0, 1.0, s);
  const std::complex<double> exact = (std::polar(1.0, 3.0) - 1.0) / std::complex<double>(0.0, 3.0);
  CHECK(std::abs(r.value - exact) <= 1e-14);
}

TEST_CASE("integrate_1d flags non-convergence") {
  QuadratureSpec s;
  s.max_subdivisions = 1;
  auto r = integrate_1d([](double x) { return std::sin(200.0 * x) * std::exp(x); }, 0.0, 10.0, s);
  CHECK_FALSE(r.converged);
}

TEST_CASE("integrate_1d finite cutoff") {
  QuadratureSpec s;
  s.cutoff = 60.0;
  auto r = integrate_1d([](double x) { return std::exp(-x); }, 0.0, INFINITY, s);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  s.cutoff = 2.0;
  auto bad = integrate_1d([](double x) { return std::exp(-x); }, 0.0, INFINITY, s);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("integrate_2d examples") {
  QuadratureSpec s;
  auto one = integrate_2d([](double, double) { return 1.0; }, {0.0, 1.0}, {-1.0, 1.0}, s);
  CHECK(std::abs(one.value - 2.0) <= 1e-12);

  auto sep = integrate_2d([](double k, double mu) { return std::exp(-k) * mu * mu; },
                          {0.0, 50.0}, {-1.0, 1.0}, s);
  CHECK(sep.value == doctest::Approx(2.0 / 3.0 * (1.0 - std::exp(-50.0))).epsilon(1e-10));

  // int_0^inf e^-k int_-1^1 e^{i a k mu} dmu dk = (2/a) atan(a).
  const double a = 5.0;
  auto osc = integrate_2d(
      [a](double k, double mu) { return std::exp(-k) * std::polar(1.0, a * k * mu); },
      {0.0, 45.0}, {-1.0, 1.0}, s, 8, 1);
  CHECK(std::abs(osc.value - std::complex<double>(2.0 / a * std::atan(a), 0.0)) <= 1e-8);
}

TEST_CASE("integrate_1d linearity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  QuadratureSpec s;
  for (int t = 0; t < 10; ++t) {
    const double c1 = coef(rng), c2 = coef(rng), w = 1.0 + std::abs(coef(rng)) * 5.0;
    const double alpha = coef(rng), beta = coef(rng);
    auto f = [&](double x) { return std::cos(w * x + c1) * std::exp(-c2 * c2 * x); };
    auto g = [&](double x) { return 1.0 / (1.0 + (x - c1) * (x - c1)); };
    const auto rf = integrate_1d(f, 0.0, 3.0, s);
    const auto rg = integrate_1d(g, 0.0, 3.0, s);
    const auto rs = integrate_1d([&](double x) { return alpha * f(x) + beta * g(x); }, 0.0, 3.0, s);
    const double slack = std::abs(alpha) * rf.error + std::abs(beta) * rg.error + rs.error + 1e-15;
    CHECK(std::abs(rs.value - (alpha * rf.value + beta * rg.value)) <= slack);
  }
}

TEST_CASE("tighter tolerance never reports a larger error") {
  std::vector<std::function<double(double)>> fs = {
      [](double x) { return std::exp(-x * x) * std::cos(5.0 * x); },
      [](double x) { return bump_theta(x) * std::sin(9.0 * x); },
      [](double x) { return std::sqrt(x + 1e-3); },
  };
  for (const auto& f : fs) {
    QuadratureSpec loose;
    loose.rel_tol = 1e-6;
    QuadratureSpec tight = loose;
    tight.rel_tol = 0.5e-6;
    const auto a = integrate_1d(f, 0.0, 2.0, loose);
    const auto b = integrate_1d(f, 0.0, 2.0, tight);
    CHECK(b.error <= a.error);
  }
}

TEST_CASE("results are bit-identical across repeated runs") {
  QuadratureSpec s;
  auto f = [](double x) { return std::sin(30.0 * x) * std::exp(-x); };
  const auto a = integrate_1d(f, 0.0, INFINITY, s);
  const auto b = integrate_1d(f, 0.0, INFINITY, s);
  CHECK(a.value == b.value);
  CHECK(a.error == b.error);
  CHECK(a.evaluations == b.evaluations);
}
