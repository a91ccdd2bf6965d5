#include "rsbound/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rsbound/parallel.hpp"
#include "rsbound/quadrature.hpp"
#include "rsbound/wightman.hpp"

namespace rsbound {

namespace {

using cplx = std::complex<double>;

struct Grid1d {
  std::vector<double> x;
  std::vector<double> w;
};

Grid1d composite_gauss(double a, double b, int panels, int order) {
  const auto rule = gauss_legendre(order);
  Grid1d g;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + h * p;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      g.x.push_back(lo + 0.5 * h * (rule.nodes[i] + 1.0));
      g.w.push_back(0.5 * h * rule.weights[i]);
    }
  }
  return g;
}

// Position-space kernel of one budget: the support ball sampled in
// coordinates (u0, u_par, rho) about its center, u_par along the momentum.
// The transverse angle integrates to 2 pi rho.
class BallKernel {
 public:
  BallKernel(const ModelParams& params, int n, double scale) {
    const auto c = params.center();
    for (std::size_t i = 0; i < 4; ++i) center_[i] = scale * c[i];
    const auto rule = gauss_legendre(n);
    const auto nn = static_cast<std::size_t>(n);
    u_.resize(nn);
    w_.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      u_[i] = scale * rule.nodes[i];
      w_[i] = scale * rule.weights[i];
    }
    // f at scale L: (alpha / L^3) theta(1 - |x - L C| / L).
    const double amp = 1.0 / (scale * scale * scale);
    kernel_.assign(nn * nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = 0; j < nn; ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < nn; ++l) {
          const double rho = 0.5 * (u_[l] + scale);
          const double wr = 0.5 * w_[l];
          const std::array<double, 4> x = {center_[0] + u_[i], center_[1] + u_[j],
                                           center_[2] + rho, center_[3]};
          std::array<double, 4> xs{};
          for (std::size_t a = 0; a < 4; ++a) xs[a] = x[a] / scale;
          const double f = amp * smearing_f(std::span<const double, 4>(xs), params);
          sum += wr * 2.0 * std::numbers::pi * rho * f;
        }
        kernel_[i * nn + j] = w_[i] * w_[j] * sum;
      }
    }
    evaluations_ = static_cast<long long>(nn * nn * nn);
  }

  cplx transform(double k, double mu) const {
    const std::size_t n = u_.size();
    std::vector<cplx> along(n);
    for (std::size_t j = 0; j < n; ++j) along[j] = std::polar(1.0, -k * u_[j]);
    cplx total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += kernel_[i * n + j] * along[j];
      total += std::polar(1.0, k * u_[i]) * row;
    }
    // Shift back from the ball center: exp(i(k C0 - kvec.C)).
    const std::array<double, 3> kvec = {k * mu, k * std::sqrt(std::max(0.0, 1.0 - mu * mu)), 0.0};
    const double kc = kvec[0] * center_[1] + kvec[1] * center_[2] + kvec[2] * center_[3];
    return std::polar(1.0, k * center_[0] - kc) * total;
  }

  long long evaluations() const { return evaluations_; }

 private:
  std::array<double, 4> center_{};
  std::vector<double> u_;
  std::vector<double> w_;
  std::vector<double> kernel_;
  long long evaluations_ = 0;
};

OracleValue overlap_at(double eta, const OracleBudget& b,
                       const BallKernel& kernel) {
  const double kmax = b.k_max / b.length_scale;
  const auto kg = composite_gauss(0.0, kmax, b.k_panels, b.nodes_per_panel);
  const auto mg = composite_gauss(-1.0, 1.0, b.mu_panels, b.nodes_per_panel);
  const double ch = std::cosh(eta);
  const double sh = std::sinh(eta);
  const double pref = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
  OracleValue out;
  cplx sum = 0.0;
  for (std::size_t a = 0; a < kg.x.size(); ++a) {
    const double k = kg.x[a];
    cplx row = 0.0;
    for (std::size_t m = 0; m < mg.x.size(); ++m) {
      const double mu = mg.x[m];
      // Boosted on-shell momentum: (k0', k1') = Lambda_1(eta) (k, k mu).
      const double k0 = k * (ch + mu * sh);
      const double k1 = k * (mu * ch + sh);
      if (k0 > kmax) continue;
      const double mu_b = std::clamp(k1 / k0, -1.0, 1.0);
      const cplx f1 = kernel.transform(k, mu);
      const cplx f2 = kernel.transform(k0, mu_b);
      row += mg.w[m] * std::conj(f1) * f2;
      out.evaluations += 2;
    }
    sum += kg.w[a] * k * row;
  }
  out.value = pref * sum;
  return out;
}

}  // namespace

void OracleBudget::validate() const {
  if (position_nodes < 8) throw std::invalid_argument("OracleBudget: position_nodes < 8");
  if (!(k_max > 0.0)) throw std::invalid_argument("OracleBudget: k_max must be positive");
  if (k_panels < 2 || mu_panels < 2 || nodes_per_panel < 2) {
    throw std::invalid_argument("OracleBudget: panel counts must be >= 2");
  }
  if (!(length_scale > 0.0)) throw std::invalid_argument("OracleBudget: length_scale must be positive");
}

OracleBudget OracleBudget::halved() const {
  OracleBudget h = *this;
  h.position_nodes = std::max(4, position_nodes / 2);
  h.k_panels = std::max(1, k_panels / 2);
  h.mu_panels = std::max(1, mu_panels / 2);
  return h;
}

OracleValue ft_onshell_bruteforce(double k, double mu, const ModelParams& params,
                                  const OracleBudget& budget) {
  if (!(k > 0.0)) throw std::invalid_argument("ft_onshell_bruteforce: k must be positive");
  if (!(mu >= -1.0 && mu <= 1.0)) throw std::invalid_argument("ft_onshell_bruteforce: mu outside [-1, 1]");
  budget.validate();
  const BallKernel full(params, budget.position_nodes, budget.length_scale);
  const BallKernel half(params, budget.halved().position_nodes, budget.length_scale);
  OracleValue out;
  out.value = full.transform(k, mu);
  out.error = std::abs(out.value - half.transform(k, mu));
  out.evaluations = full.evaluations() + half.evaluations();
  return out;
}

OracleValue w2_bruteforce(double eta, const ModelParams& params, const OracleBudget& budget) {
  budget.validate();
  const auto coarse_budget = budget.halved();
  const BallKernel full(params, budget.position_nodes, budget.length_scale);
  const BallKernel coarse(params, coarse_budget.position_nodes, budget.length_scale);
  auto out = overlap_at(eta, budget, full);
  const auto low = overlap_at(eta, coarse_budget, coarse);
  out.error = std::abs(out.value - low.value);
  out.evaluations += low.evaluations + full.evaluations() + coarse.evaluations();
  return out;
}

VerifyTargets VerifyTargets::main_path() {
  VerifyTargets t;
  t.self_overlap = [](const ModelParams& p) { return w2_self(p).value; };
  t.boosted = [](double eta, const ModelParams& p) { return boosted_overlap(eta, p).value; };
  t.transform = [](double k, double mu, const ModelParams& p) { return onshell_ft(k, mu, p); };
  return t;
}

std::vector<OracleReport> run_verification(const VerifyOptions& options) {
  options.params.validate();
  options.budget.validate();
  constexpr double kZeroTolerance = 1e-12;
  const ModelParams& p = options.params;

  struct Item {
    std::string name;
    double eta;  // NaN for the transform check
    double tolerance;
  };
  const std::vector<Item> items = {
      {"onshell_ft(k=1.3,mu=0.4)", std::nan(""), 0.01},
      {"w2_self", 0.0, 0.01},
      {"boosted_overlap(eta=0.3)", 0.3, 0.02},
      {"boosted_overlap(eta=0.7)", 0.7, 0.02},
      {"boosted_overlap(eta=1.5)", 1.5, 0.05},
  };
  std::vector<OracleValue> oracle(items.size());
  std::vector<cplx> main(items.size());
  parallel_for(items.size(), options.threads, [&](std::size_t i) {
    const auto& it = items[i];
    if (std::isnan(it.eta)) {
      oracle[i] = ft_onshell_bruteforce(1.3, 0.4, p, options.budget);
      main[i] = options.targets.transform(1.3, 0.4, p);
    } else if (i == 1) {
      oracle[i] = w2_bruteforce(0.0, p, options.budget);
      main[i] = options.targets.self_overlap(p);
    } else {
      oracle[i] = w2_bruteforce(it.eta, p, options.budget);
      main[i] = options.targets.boosted(it.eta, p);
    }
  });

  const double w0_scale = std::abs(oracle[1].value);
  std::vector<OracleReport> reports;
  for (std::size_t i = 0; i < items.size(); ++i) {
    OracleReport r;
    r.quantity = items[i].name;
    r.main_value = main[i];
    r.oracle_value = oracle[i].value;
    r.oracle_error = oracle[i].error;
    r.budget = oracle[i].evaluations;
    r.scale = (i == 0) ? std::abs(oracle[i].value) : w0_scale;
    const cplx d = main[i] - oracle[i].value;
    const double worst = std::max(std::abs(d.real()), std::abs(d.imag()));
    if (r.scale > 0.0) {
      r.deviation = worst / r.scale;
      r.tolerance = items[i].tolerance;
    } else {
      r.deviation = worst;
      r.tolerance = kZeroTolerance;
    }
    r.pass = std::isfinite(r.deviation) && r.deviation <= r.tolerance;
    reports.push_back(r);
  }
  return reports;
}

}  // namespace rsbound
