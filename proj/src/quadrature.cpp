#include "rsbound/quadrature.hpp"

#include <numbers>
#include <string>

namespace rsbound {

void QuadratureSpec::validate() const {
  if (!(rel_tol >= 1e-14 && rel_tol <= 1e-2)) {
    throw std::invalid_argument("QuadratureSpec: rel_tol must lie in [1e-14, 1e-2], got " +
                                std::to_string(rel_tol));
  }
  if (!(abs_tol >= 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be >= 0");
  if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions < 1");
  if (panel_order < 4) throw std::invalid_argument("QuadratureSpec: panel_order must be >= 4");
  if (panel_order != 15 && panel_order != 21) {
    throw std::invalid_argument("QuadratureSpec: panel_order must be 15 or 21");
  }
  if (!(tail_panel_width > 0.0)) throw std::invalid_argument("QuadratureSpec: tail_panel_width <= 0");
  if (max_tail_panels < 4) throw std::invalid_argument("QuadratureSpec: max_tail_panels < 4");
}

namespace detail {

namespace {

// QUADPACK qk15 / qk21 abscissae and weights.
constexpr std::array<double, 8> kXgk15 = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg7 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::array<double, 11> kXgk21 = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk21 = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208844373275, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg10 = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

const KronrodTable kTable15{kXgk15, kWgk15, kWg7, true};
const KronrodTable kTable21{kXgk21, kWgk21, kWg10, false};

}  // namespace

const KronrodTable& kronrod_table(int order) {
  switch (order) {
    case 15:
      return kTable15;
    case 21:
      return kTable21;
    default:
      throw std::invalid_argument("no Kronrod table of order " + std::to_string(order));
  }
}

}  // namespace detail

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace rsbound
