#include "noma/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "integrate.hpp"
#include "noma/real.hpp"
#include "noma/specfun.hpp"

namespace noma {

namespace {

using Q = quad;

Q to_q(double x) { return static_cast<Q>(x); }

double binomial(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Thresholds, statistics and asymptotic CDFs of one parameter set.
struct Normalised {
  SystemParams p;
  ThresholdSet t;
  ChannelStats s;
  int k2 = 0, k1 = 0, k0 = 0;
  double f2(double x) const { return gamma_cdf_asymptotic(k2, s.scale2, x); }
  double f1(double x) const { return gamma_cdf_asymptotic(k1, s.scale1, x); }
  double f0(double x) const { return gamma_cdf_asymptotic(k0, s.scale0, x); }
  double tilde(double x) const { return p.p_s * x; }
};

Normalised normalise(const SystemParams& params) {
  Normalised n;
  n.p = params;
  n.t = thresholds(params);
  n.s = derive_stats(params);
  n.k2 = 2 * params.m;
  n.k1 = 2 * params.m * params.n_antennas;
  n.k0 = params.m * params.n_antennas;
  return n;
}

// Asymptotic F2 mass on (lo, hi), 0 when empty.
double mass2(const Normalised& n, double lo, double hi) {
  if (!(hi > lo)) return 0;
  return n.f2(hi) - n.f2(lo);
}

// chi2 = (1 - F2(beta3*)) * int_0^theta1 f1(y) F0(lambda1 (g1 - g11(y))) dy.
double chi2_prefactor(const Normalised& n) {
  return std::isfinite(n.t.beta3_star) ? 1 - n.f2(n.t.beta3_star) : 0.0;
}

}  // namespace

double gamma_cdf_asymptotic(int shape, double scale, double x) {
  if (!(x > 0)) return 0;
  if (std::isinf(x)) return std::numeric_limits<double>::infinity();
  return std::exp(shape * std::log(x / scale) - specfun::log_gamma(shape + 1.0));
}

double AsymptoticDecomposition::value(double p_s) const {
  double v = 0;
  for (const auto& term : terms) {
    if (term.coefficient != 0) v += term.coefficient * std::pow(p_s, term.snr_exponent);
  }
  return v;
}

double op_u2_asymptotic(const SystemParams& params) {
  const Normalised n = normalise(params);
  const ThresholdSet& t = n.t;
  if (!std::isfinite(t.beta1_star)) return 1;
  const double sat = n.f2(t.beta1_star);
  if (!(t.beta1 > t.tau1_star)) return sat;
  return n.f2(t.tau1_star) + sat - n.f2(t.beta1);
}

AsymptoticDecomposition op_u1_asymptotic_nodirect(const SystemParams& params) {
  const Normalised n = normalise(params);
  const ThresholdSet& t = n.t;
  if (!std::isfinite(params.p_th)) throw InvalidParams("no-direct asymptote needs a finite p_th");
  if (!(params.rho > 0)) throw InvalidParams("no-direct asymptote needs rho > 0");

  const int k2 = n.k2;
  const int k0 = n.k0;
  const double e2 = -k2;

  AsymptoticDecomposition d;
  d.nu = params.m * (2 - params.n_antennas);

  auto coef2 = [&](double x) { return std::isfinite(x) ? n.f2(n.tilde(x)) : 0.0; };
  const double a = coef2(t.tau2_star);
  double b = 0, c = 1, dd = -coef2(t.beta1);
  if (t.saturated_x1) {
    // Otherwise every saturated channel is an outage: C = 1, D = -F2(beta1).
    b = t.beta2 > t.beta1 ? coef2(t.beta2) - coef2(t.beta1) : 0.0;
    c = n.f0(t.gamma_th1 * params.sigma2 / (params.eta * params.p_th));
    dd = -c * coef2(t.beta3_star);
  }

  // Relay link below saturation: int f2 F0(g1 / (phi2 p_s x)) over (tau3*, beta1).
  double relay = 0;
  const double lo = n.tilde(t.tau3_star);
  const double hi = n.tilde(t.beta1);
  if (t.linear_x1 && hi > lo && t.phi2 > 0) {
    const double pre = k2 * std::exp(k2 * std::log(params.m / n.s.omega2) +
                                     k0 * std::log(params.m * t.gamma_th1 / (t.phi2 * n.s.omega0)) -
                                     specfun::log_gamma(k2 + 1.0) - specfun::log_gamma(k0 + 1.0));
    relay = d.nu == 0 ? pre * std::log(hi / lo) : pre * (std::pow(hi, d.nu) - std::pow(lo, d.nu)) / d.nu;
  }

  d.terms.push_back({"A", a, e2});
  d.terms.push_back({"B", b, e2});
  d.terms.push_back({"C", c, 0.0});
  d.terms.push_back({"D", dd, e2});
  if (d.nu == 0) {
    d.terms.push_back({"E", relay, -static_cast<double>(k0)});
  } else {
    d.terms.push_back({"F", relay, e2});
  }

  d.dominant_exponent = e2;
  for (const auto& term : d.terms) {
    if (term.coefficient != 0) d.dominant_exponent = std::max(d.dominant_exponent, term.snr_exponent);
  }
  return d;
}

double chi2_asymptotic(const SystemParams& params) {
  const Normalised n = normalise(params);
  const ThresholdSet& t = n.t;
  if (!std::isfinite(params.p_th) || !t.saturated_x1 || !(t.theta1 > 0)) return 0;

  const int big_k = n.k1;
  const int k0 = n.k0;
  const double sigma2 = params.sigma2;
  const double ratio = params.a1 / params.a2;
  // v = a2 p_s y / 2 + sigma2 runs over [sigma2, upper]; upper does not depend on p_s.
  const Q upper = to_q(params.a2) * to_q(params.p_s) / 2 * to_q(t.theta1) + to_q(sigma2);
  const Q lower = to_q(sigma2);
  const Q slope = to_q(t.gamma_th1) * to_q(params.a2) / to_q(params.a1) - 1;  // < 0

  const double log_pre = big_k * std::log(2.0 * params.m / (params.a2 * params.p_s * n.s.omega1)) +
                         k0 * std::log(params.m * sigma2 / (params.eta * params.p_th * n.s.omega0)) +
                         k0 * std::log(ratio) - specfun::log_gamma(static_cast<double>(big_k)) -
                         specfun::log_gamma(k0 + 1.0);

  Q sum = 0;
  for (int tt = 0; tt <= big_k - 1; ++tt) {
    for (int pp = 0; pp <= k0; ++pp) {
      const int power = tt - pp;  // integrand v^power
      Q integral;
      if (power == -1) {
        integral = num::log(upper) - num::log(lower);
      } else {
        integral = (num::ipow(upper, power + 1) - num::ipow(lower, power + 1)) / (power + 1);
      }
      const Q coef = to_q(binomial(big_k - 1, tt)) * to_q(binomial(k0, pp)) *
                     num::ipow(to_q(-sigma2), big_k - 1 - tt) * num::ipow(to_q(sigma2), pp) *
                     num::ipow(slope, k0 - pp);
      sum += coef * integral;
    }
  }
  return chi2_prefactor(n) * std::exp(log_pre) * static_cast<double>(sum);
}

double chi2_asymptotic_quadrature(const SystemParams& params) {
  const Normalised n = normalise(params);
  const ThresholdSet& t = n.t;
  if (!std::isfinite(params.p_th) || !t.saturated_x1 || !(t.theta1 > 0)) return 0;
  const double lambda1 = params.sigma2 / (params.eta * params.p_th);
  const double log_pdf = n.k1 * std::log(params.m / n.s.omega1) - specfun::log_gamma(static_cast<double>(n.k1));
  auto f = [&](double y) {
    const double half = params.p_s / 2 * y;
    const double deficit = t.gamma_th1 - params.a1 * half / (params.a2 * half + params.sigma2);
    const double pdf = y > 0 ? std::exp(log_pdf + (n.k1 - 1) * std::log(y)) : 0.0;
    return pdf * n.f0(lambda1 * std::max(0.0, deficit));
  };
  QuadratureOptions o;
  return chi2_prefactor(n) * detail::integrate(f, 0.0, t.theta1, o, "chi2 asymptote");
}

double op_u1_asymptotic_direct(const SystemParams& params) {
  const Normalised n = normalise(params);
  const ThresholdSet& t = n.t;
  if (!t.feasible_u1) return 1;
  const double f1 = std::isfinite(t.theta1) ? n.f1(t.theta1) : 1.0;
  const double relay = (std::isfinite(t.tau2_star) ? n.f2(t.tau2_star) : 0.0) +
                       (std::isfinite(t.beta2) ? mass2(n, t.beta1, t.beta2) : 0.0);
  return chi2_asymptotic(params) + relay * f1;
}

double op_u1_asymptotic(const SystemParams& params) {
  if (params.scenario == Scenario::WithDirectLink) return op_u1_asymptotic_direct(params);
  return op_u1_asymptotic_nodirect(params).value(params.p_s);
}

double diversity_order_fit(const std::vector<std::pair<double, double>>& curve, std::size_t window) {
  if (curve.size() < 3) throw std::invalid_argument("diversity_order_fit: need at least 3 points");
  if (window < 2) throw std::invalid_argument("diversity_order_fit: window must be at least 2");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].first > curve[i - 1].first)) {
      throw std::invalid_argument("diversity_order_fit: snr_db must be strictly increasing");
    }
  }
  const std::size_t w = std::min(window, curve.size());
  const std::size_t first = curve.size() - w;
  double sx = 0, sy = 0;
  for (std::size_t i = first; i < curve.size(); ++i) {
    const double op = curve[i].second;
    if (!(op > 0) || !std::isfinite(op)) {
      throw std::invalid_argument("diversity_order_fit: op must be positive at snr_db " +
                                  std::to_string(curve[i].first));
    }
    sx += curve[i].first / 10;
    sy += std::log10(op);
  }
  const double mx = sx / w;
  const double my = sy / w;
  double sxy = 0, sxx = 0;
  for (std::size_t i = first; i < curve.size(); ++i) {
    const double dx = curve[i].first / 10 - mx;
    sxy += dx * (std::log10(curve[i].second) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

}  // namespace noma
