#include <cmath>
#include <complex>

#include "doctest.h"
#include "rsbound/oracle.hpp"
#include "rsbound/wightman.hpp"

using namespace rsbound;

TEST_CASE("oracle budget") {
  OracleBudget b;
  CHECK_NOTHROW(b.validate());
  const auto h = b.halved();
  CHECK(h.position_nodes == b.position_nodes / 2);
  CHECK(h.k_panels == b.k_panels / 2);
  b.k_max = 0.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = OracleBudget{};
  b.length_scale = -1.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  CHECK_THROWS_AS(ft_onshell_bruteforce(0.0, 0.1, ModelParams{}), std::invalid_argument);
  CHECK_THROWS_AS(ft_onshell_bruteforce(1.0, 1.5, ModelParams{}), std::invalid_argument);
}

TEST_CASE("brute-force transform") {
  const ModelParams zero{0.0, 2.0};
  CHECK(std::abs(ft_onshell_bruteforce(1.3, 0.4, zero).value) == 0.0);

  const ModelParams p{1.0, 2.0};
  const auto a = ft_onshell_bruteforce(1.3, 0.4, p);
  const auto b = ft_onshell_bruteforce(1.3, -0.8, p);
  CHECK(std::abs(a.value) == doctest::Approx(std::abs(b.value)).epsilon(1e-6));
  CHECK(a.evaluations > 0);

  const auto main = onshell_ft(1.3, 0.4, p);
  CHECK(std::abs(a.value - main) <= 0.01 * std::abs(a.value));
  // Resolution doubling changes the oracle by far less than the gate.
  CHECK(a.error <= 1e-3 * std::abs(a.value));

  for (double k : {0.2, 2.5, 6.0}) {
    const auto o = ft_onshell_bruteforce(k, 0.9, p);
    CHECK(std::abs(o.value - onshell_ft(k, 0.9, p)) <= 0.005 * std::abs(o.value));
  }
}

TEST_CASE("brute-force overlaps") {
  const ModelParams zero{0.0, 1.0};
  CHECK(std::abs(w2_bruteforce(0.0, zero).value) == 0.0);

  const ModelParams p{1.0, 2.0};
  const auto w0 = w2_bruteforce(0.0, p);
  const double main_w0 = w2_self(p).value;
  CHECK(w0.value.real() == doctest::Approx(main_w0).epsilon(0.01));
  CHECK(std::abs(w0.value.imag()) <= std::max(w0.error, 1e-12 * main_w0));
  CHECK(w0.error <= 0.01 * main_w0);

  const auto plus = w2_bruteforce(0.7, p);
  const auto minus = w2_bruteforce(-0.7, p);
  CHECK(std::abs(plus.value - std::conj(minus.value)) <= 0.02 * main_w0);

  OracleBudget scaled;
  scaled.length_scale = 2.0;
  const auto w0_scaled = w2_bruteforce(0.0, p, scaled);
  CHECK(w0_scaled.value.real() == doctest::Approx(w0.value.real()).epsilon(1e-6));
}

TEST_CASE("verification suite") {
  VerifyOptions opt;
  const auto reports = run_verification(opt);
  REQUIRE(reports.size() == 5);
  for (const auto& r : reports) {
    CAPTURE(r.quantity);
    CHECK(r.pass);
    CHECK(r.deviation <= r.tolerance);
    CHECK(r.budget > 0);
  }

  VerifyOptions broken;
  broken.targets.self_overlap = [](const ModelParams& p) { return 0.5 * w2_self(p).value; };
  const auto bad = run_verification(broken);
  CHECK_FALSE(bad[1].pass);
  CHECK(bad[1].deviation > bad[1].tolerance);

  VerifyOptions wrong_phase;
  wrong_phase.targets.boosted = [](double eta, const ModelParams& p) {
    return std::conj(boosted_overlap(eta, p).value);
  };
  const auto flipped = run_verification(wrong_phase);
  CHECK_FALSE(flipped[2].pass);

  VerifyOptions vacuum;
  vacuum.params = ModelParams{0.0, 2.0};
  for (const auto& r : run_verification(vacuum)) {
    CAPTURE(r.quantity);
    CHECK(r.pass);
    CHECK(r.scale == 0.0);
  }
}
