#include "noma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "integrate.hpp"
#include "noma/real.hpp"
#include "noma/specfun.hpp"

namespace noma {

namespace {

using Q = quad;
namespace sf = specfun;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSmallArg = 1.5;

Q to_q(double x) { return static_cast<Q>(x); }

Q factorial(int n) {
  Q f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Q binomial(int n, int k) {
  Q c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Probability mass of Gamma(shape, scale) on (lo, hi]; 0 for an empty interval.
template <class Real>
Real mass(int shape, Real scale, Real lo, Real hi) {
  if (!(hi > lo)) return 0;
  const Real s = shape;
  const Real p_lo = sf::gamma_cdf<Real>(s, scale, lo);
  if (p_lo < Real(0.5)) return sf::gamma_cdf<Real>(s, scale, hi) - p_lo;
  return sf::gamma_ccdf<Real>(s, scale, lo) - sf::gamma_ccdf<Real>(s, scale, hi);
}

// Gamma(s, x) for the integer shapes smin..smax at one argument.
class IncGammaRow {
 public:
  IncGammaRow(Q x, int smin, int smax) : x_(x), smin_(smin), values_(std::max(0, smax - smin + 1), Q(0)) {
    if (!num::isfinite(x) || smax < smin) return;
    const Q ex = num::exp(-x);
    for (int s = std::max(1, smin); s <= smax; ++s) {
      // (s-1)! e^-x sum_{k<s} x^k/k!, all terms positive.
      Q term = 1, sum = 0;
      for (int k = 0; k < s; ++k) {
        sum += term;
        term *= x / (k + 1);
      }
      at(s) = factorial(s - 1) * ex * sum;
    }
    if (smin > 0) return;
    const int top = std::min(0, smax);
    if (x < kSmallArg) {
      // Downward recurrence from E1 is stable for small x.
      Q value = sf::upper_inc_gamma<Q>(0, x);
      Q pw = ex;  // x^a e^-x at a = 0
      for (int a = 0; a >= smin; --a) {
        if (a <= top) at(a) = value;
        pw /= x;
        value = (value - pw) / (a - 1);
      }
    } else {
      for (int a = smin; a <= top; ++a) at(a) = sf::upper_inc_gamma<Q>(a, x);
    }
  }

  Q x() const { return x_; }
  Q operator()(int s) const { return values_[static_cast<std::size_t>(s - smin_)]; }

 private:
  Q& at(int s) { return values_[static_cast<std::size_t>(s - smin_)]; }

  Q x_;
  int smin_;
  std::vector<Q> values_;
};

struct Diff {
  Q value = 0;
  Q magnitude = 0;
};

// Gamma(s, lo.x) - Gamma(s, hi.x) with lo.x <= hi.x. Positive shapes with a
// small upper argument go through P to avoid subtracting two near-(s-1)!
// values.
Diff gamma_diff(int s, const IncGammaRow& lo, const IncGammaRow& hi) {
  if (s > 0 && num::isfinite(hi.x()) && hi.x() < s + 1) {
    const Q g = factorial(s - 1);
    const Q pa = sf::gamma_p<Q>(s, lo.x());
    const Q pb = sf::gamma_p<Q>(s, hi.x());
    return {g * (pb - pa), g * (pa + pb)};
  }
  const Q a = lo(s);
  const Q b = hi(s);
  return {a - b, num::abs(a) + num::abs(b)};
}

// One attempt at an integral by series.
struct Part {
  Q whole = 0;
  Q err = 0;
  std::size_t terms = 0;
  bool converged = false;
  bool applicable = true;
};

// Rounding growth allowance over the accumulated magnitude: covers the
// incomplete-gamma recurrences as well as the summation itself.
const Q kRoundingAllowance = Q(1e3) * num::limits<Q>::epsilon();

sf::SeriesPolicy inner_policy(const SeriesOptions& o) {
  sf::SeriesPolicy pol;
  // Expansion A yields the integral as lead - S, possibly many decades below
  // S, so the series are run far past rel_tol of their own partial sum.
  pol.rel_tol = std::max(1e-32, o.rel_tol * 1e-12);
  pol.max_terms = o.max_terms;
  return pol;
}

// whole = lead - sign * prefactor * sum.
Part finish_part(const sf::BasicSeriesOutcome<Q>& out, Q lead, Q sign, Q prefactor, Q magnitude, Q last_term) {
  Part part;
  part.whole = lead - sign * prefactor * out.value;
  part.terms = out.terms_used;
  part.converged = out.converged;
  part.err = num::abs(prefactor) * (magnitude * kRoundingAllowance + 3 * num::abs(last_term)) +
             num::abs(lead) * kRoundingAllowance;
  return part;
}

// Y3 = int_lo^hi f2(x) P(k0, c/x) dx with f2 the Gamma(k2, 1/b) density and
// P the regularized lower incomplete gamma (the CDF of ||h0||^2).
struct Y3Kernel {
  int k2 = 2;
  int k0 = 1;
  Q b = 1;
  Q c = 0;
  Q lo = 0;
  Q hi = 0;
};

// Expansion A: Y3 = mass - S with 1 - P(k0, z) = e^-z sum_{n<k0} z^n/n!,
// e^{-bx} in powers of x and t = c/x.
Part y3_series_a(const Y3Kernel& k, Q lead, const SeriesOptions& o) {
  if (!num::isfinite(k.hi) || !(k.lo > 0)) return Part{0, 0, 0, false, false};
  const int pmax = static_cast<int>(o.max_terms);
  const IncGammaRow at_hi(k.c / k.hi, -k.k2 - pmax, k.k0 - 1 - k.k2);
  const IncGammaRow at_lo(k.c / k.lo, -k.k2 - pmax, k.k0 - 1 - k.k2);
  std::vector<Q> inv_nfact(k.k0);
  for (int n = 0; n < k.k0; ++n) inv_nfact[n] = 1 / factorial(n);
  Q magnitude = 0;
  Q last = 0;
  Q coef = num::ipow(k.c, k.k2);  // (-b)^p c^(p+k2) / p!
  const auto out = sf::sum_series<Q>(
      [&](std::size_t pz) {
        const int p = static_cast<int>(pz);
        if (p > 0) coef *= -k.b * k.c / p;
        Q t = 0;
        for (int n = 0; n < k.k0; ++n) {
          const Diff d = gamma_diff(n - p - k.k2, at_hi, at_lo);
          t += coef * inv_nfact[n] * d.value;
          magnitude += num::abs(coef) * inv_nfact[n] * d.magnitude;
        }
        last = t;
        return t;
      },
      inner_policy(o));
  const Q pre = num::ipow(k.b, k.k2) / factorial(k.k2 - 1);
  return finish_part(out, lead, 1, pre, magnitude, last);
}

// Expansion B: P(k0, z) = z^k0/Gamma(k0) sum_q (-z)^q/(q! (k0+q)) with
// z = c/x; every term is a Gamma moment over (lo, hi). No leading mass is
// subtracted, so small c costs no accuracy.
Part y3_series_b(const Y3Kernel& k, const SeriesOptions& o) {
  if (!(k.lo > 0)) return Part{0, 0, 0, false, false};
  const int qmax = static_cast<int>(o.max_terms);
  const int smax = k.k2 - k.k0;
  const IncGammaRow at_lo(k.b * k.lo, smax - qmax, smax);
  const IncGammaRow at_hi(k.b * k.hi, smax - qmax, smax);
  const Q bc = k.b * k.c;
  Q magnitude = 0;
  Q last = 0;
  Q coef = num::ipow(bc, k.k0);  // (-1)^q (bc)^(k0+q) / q!
  const auto out = sf::sum_series<Q>(
      [&](std::size_t qz) {
        const int q = static_cast<int>(qz);
        if (q > 0) coef *= -bc / q;
        const Diff d = gamma_diff(smax - q, at_lo, at_hi);
        const Q c = coef / (k.k0 + q);
        magnitude += num::abs(c) * d.magnitude;
        last = c * d.value;
        return last;
      },
      inner_policy(o));
  const Q pre = 1 / (factorial(k.k0 - 1) * factorial(k.k2 - 1));
  return finish_part(out, 0, -1, pre, magnitude, last);
}

// X21 kernel: with u = a2 P_S y/2 + sigma2,
//   f1(y) dy = pre (u - sigma2)^(K-1) e^{-s u} du,  pre = s^K e^{s sigma2} / Gamma(K),
// and the argument of the ||h0||^2 CDF is z(u) = A0 + lam/u on [sigma2, U].
struct X21Kernel {
  int big_k = 2;  // shape of ||h1||^2
  int k0 = 1;     // shape of ||h0||^2
  Q s = 1;
  Q sigma2 = 1;
  Q upper = 0;  // U
  Q a0 = 0;
  Q lam = 0;
};

Q x21_prefactor(const X21Kernel& k, Q shift) {
  return num::exp(k.big_k * num::log(k.s) + k.s * k.sigma2 - shift) / factorial(k.big_k - 1);
}

// Expansion A: X21 = F1(theta1) - S with e^{-z}, (A0 + lam/u)^n and
// (u - sigma2)^(K-1) expanded and e^{-s u} in powers of u; each u-integral is
//   int u^(t+p-k) e^{-lam/u} du = lam^(t+p+1-k) [Gamma(phi, lam/U) - Gamma(phi, lam/sigma2)],
// phi = k - t - p - 1.
Part x21_series_a(const X21Kernel& k, Q lead, const SeriesOptions& o) {
  if (!num::isfinite(k.upper) || !(k.lam > 0)) return Part{0, 0, 0, false, false};
  const int pmax = static_cast<int>(o.max_terms);
  const int smin = -k.big_k - pmax;
  const int smax = k.k0 - 2;
  const IncGammaRow at_u(k.lam / k.upper, smin, smax);
  const IncGammaRow at_s(k.lam / k.sigma2, smin, smax);
  Q magnitude = 0;
  Q last = 0;
  Q coef = 1;  // (-s)^p / p!
  const auto out = sf::sum_series<Q>(
      [&](std::size_t pz) {
        const int p = static_cast<int>(pz);
        if (p > 0) coef *= -k.s / p;
        Q t = 0;
        for (int n = 0; n < k.k0; ++n) {
          for (int kk = 0; kk <= n; ++kk) {
            const Q outer = binomial(n, kk) * num::ipow(k.a0, n - kk) / factorial(n);
            for (int tt = 0; tt < k.big_k; ++tt) {
              const Q c = outer * binomial(k.big_k - 1, tt) * num::ipow(-k.sigma2, k.big_k - 1 - tt) *
                          num::ipow(k.lam, tt + p + 1) * coef;
              const Diff d = gamma_diff(kk - tt - p - 1, at_u, at_s);
              t += c * d.value;
              magnitude += num::abs(c) * d.magnitude;
            }
          }
        }
        last = t;
        return t;
      },
      inner_policy(o));
  return finish_part(out, lead, 1, x21_prefactor(k, k.a0), magnitude, last);
}

// Expansion B: the ||h0||^2 CDF as its Taylor series in z(u), z^(k0+q)
// expanded binomially in A0 and lam/u; each u-integral is
//   J(j) = int u^j e^{-s u} du = s^(-j-1) [Gamma(j+1, s sigma2) - Gamma(j+1, s U)].
Part x21_series_b(const X21Kernel& k, const SeriesOptions& o) {
  const int qmax = static_cast<int>(o.max_terms);
  const int smin = -(k.k0 + qmax) + 1;
  const int smax = k.big_k;
  const IncGammaRow at_s(k.s * k.sigma2, smin, smax);
  const IncGammaRow at_u(k.s * k.upper, smin, smax);
  // Inner sum over t for each j offset k: sum_t C(K-1,t) (-sigma2)^(K-1-t) J(t-k).
  auto moment = [&](int kk, Q& mag) {
    Q v = 0;
    for (int tt = 0; tt < k.big_k; ++tt) {
      const int j = tt - kk;
      const Q c = binomial(k.big_k - 1, tt) * num::ipow(-k.sigma2, k.big_k - 1 - tt) * num::ipow(k.s, -j - 1);
      const Diff d = gamma_diff(j + 1, at_s, at_u);
      v += c * d.value;
      mag += num::abs(c) * d.magnitude;
    }
    return v;
  };
  std::vector<Q> moments;
  std::vector<Q> moment_mags;
  Q magnitude = 0;
  Q last = 0;
  Q coef = 1;  // (-1)^q / q!
  const auto out = sf::sum_series<Q>(
      [&](std::size_t qz) {
        const int q = static_cast<int>(qz);
        if (q > 0) coef *= Q(-1) / q;
        const int power = k.k0 + q;
        while (static_cast<int>(moments.size()) <= power) {
          Q mag = 0;
          moments.push_back(moment(static_cast<int>(moments.size()), mag));
          moment_mags.push_back(mag);
        }
        Q t = 0;
        Q mag = 0;
        for (int kk = 0; kk <= power; ++kk) {
          const Q c = binomial(power, kk) * num::ipow(k.a0, power - kk) * num::ipow(k.lam, kk);
          t += c * moments[kk];
          mag += num::abs(c) * moment_mags[kk];
        }
        const Q scale = coef / power;
        magnitude += num::abs(scale) * mag;
        last = scale * t;
        return last;
      },
      inner_policy(o));
  const Q pre = x21_prefactor(k, 0) / factorial(k.k0 - 1);
  return finish_part(out, 0, -1, pre, magnitude, last);
}

struct Setup {
  SystemParams p;
  ThresholdSet t;
  ChannelStats s;
  int k2 = 2, k1 = 2, k0 = 1;
};

Setup make_setup(const SystemParams& params) {
  Setup su;
  su.p = params;
  su.t = thresholds(params);
  su.s = derive_stats(params);
  su.k2 = 2 * params.m;
  su.k1 = 2 * params.m * params.n_antennas;
  su.k0 = params.m * params.n_antennas;
  return su;
}

Q cdf2(const Setup& su, double x) { return sf::gamma_cdf<Q>(su.k2, to_q(su.s.scale2), to_q(x)); }
Q ccdf2(const Setup& su, double x) { return sf::gamma_ccdf<Q>(su.k2, to_q(su.s.scale2), to_q(x)); }
Q mass2(const Setup& su, double lo, double hi) { return mass<Q>(su.k2, to_q(su.s.scale2), to_q(lo), to_q(hi)); }
Q cdf1(const Setup& su, double x) { return sf::gamma_cdf<Q>(su.k1, to_q(su.s.scale1), to_q(x)); }
Q cdf0(const Setup& su, double x) { return sf::gamma_cdf<Q>(su.k0, to_q(su.s.scale0), to_q(x)); }

// gamma_th1 - g11(y): the SINR deficit the relay link has to cover.
double deficit(const Setup& su, double y) {
  const double half = su.p.p_s / 2 * y;
  const double g11 = su.p.a1 * half / (su.p.a2 * half + su.p.sigma2);
  return std::max(0.0, su.t.gamma_th1 - g11);
}

Y3Kernel y3_kernel(const Setup& su, double gamma) {
  Y3Kernel k;
  k.k2 = su.k2;
  k.k0 = su.k0;
  k.b = to_q(su.p.m / su.s.omega2);
  k.c = to_q(su.p.m) * to_q(gamma) / (to_q(su.t.phi2) * to_q(su.p.p_s) * to_q(su.s.omega0));
  k.lo = to_q(su.t.tau3_star);
  k.hi = to_q(su.t.beta1);
  return k;
}

X21Kernel x21_kernel(const Setup& su) {
  const SystemParams& p = su.p;
  X21Kernel k;
  k.big_k = su.k1;
  k.k0 = su.k0;
  k.s = to_q(2.0 * p.m) / (to_q(p.a2) * to_q(p.p_s) * to_q(su.s.omega1));
  k.sigma2 = to_q(p.sigma2);
  k.upper = to_q(p.a2) * to_q(p.p_s) / 2 * to_q(su.t.theta1) + k.sigma2;
  const Q unit = to_q(p.m) * k.sigma2 / (to_q(p.eta) * to_q(p.p_th) * to_q(su.s.omega0));
  k.a0 = unit * (to_q(su.t.gamma_th1) - to_q(p.a1) / to_q(p.a2));
  k.lam = unit * to_q(p.a1) * k.sigma2 / to_q(p.a2);
  return k;
}

// --- quadrature -------------------------------------------------------------

double y3_quad(const Setup& su, double gamma, const QuadratureOptions& o) {
  const double lo = su.t.tau3_star;
  const double hi = su.t.beta1;
  const double scale = su.p.p_s * su.t.phi2;
  return detail::integrate(
      [&](double x) {
        return sf::gamma_pdf(su.k2, su.s.scale2, x) * sf::gamma_cdf(su.k0, su.s.scale0, gamma / (scale * x));
      },
      lo, hi, o, "Y3");
}

double x21_quad(const Setup& su, const QuadratureOptions& o) {
  const double k = su.p.sigma2 / (su.p.eta * su.p.p_th);
  return detail::integrate(
      [&](double y) {
        return sf::gamma_cdf(su.k0, su.s.scale0, k * deficit(su, y)) * sf::gamma_pdf(su.k1, su.s.scale1, y);
      },
      0.0, su.t.theta1, o, "X21");
}

double chi1_quad(const Setup& su, const QuadratureOptions& o) {
  if (!(su.t.beta1 > su.t.tau3_star)) return 0;
  QuadratureOptions inner = o;
  inner.rel_tol = o.rel_tol / 10;
  return detail::integrate([&](double y) { return sf::gamma_pdf(su.k1, su.s.scale1, y) * y3_quad(su, deficit(su, y), inner); },
                   0.0, su.t.theta1, o, "chi1");
}

// --- series with fallback -----------------------------------------------------

struct Chosen {
  Q whole = 0;  // lead - S
  Q s = 0;
  Expansion how = Expansion::None;
  std::size_t terms = 0;
  bool converged = false;
};

Chosen choose(const SeriesOptions& o, Q lead, const std::function<Part(Expansion)>& attempt,
              const std::function<double()>& quadrature) {
  const Expansion order[2] = {o.prefer_a ? Expansion::SeriesA : Expansion::SeriesB,
                              o.prefer_a ? Expansion::SeriesB : Expansion::SeriesA};
  Chosen best;
  bool have = false;
  for (const Expansion e : order) {
    Part part;
    try {
      part = attempt(e);
    } catch (const sf::NumericError&) {
      continue;
    }
    if (!part.applicable) continue;
    const Q whole = part.whole;
    const bool ok = part.converged && part.err <= to_q(o.accept_rel) * num::abs(whole);
    if (ok) return {whole, lead - whole, e, part.terms, true};
    if (!have) {
      best = {whole, lead - whole, e, part.terms, false};
      have = true;
    }
  }
  if (o.allow_fallback) {
    const Q v = to_q(quadrature());
    return {v, lead - v, Expansion::Quadrature, best.terms, false};
  }
  return best;
}

Part y3_attempt(const Y3Kernel& k, Q lead, Expansion e, const SeriesOptions& o) {
  return e == Expansion::SeriesA ? y3_series_a(k, lead, o) : y3_series_b(k, o);
}

Part x21_attempt(const X21Kernel& k, Q lead, Expansion e, const SeriesOptions& o) {
  return e == Expansion::SeriesA ? x21_series_a(k, lead, o) : x21_series_b(k, o);
}

Chosen upsilon3(const Setup& su, double gamma, const SeriesOptions& o) {
  const Q lead = mass2(su, su.t.tau3_star, su.t.beta1);
  if (lead == 0) return {0, 0, Expansion::None, 0, true};
  if (!(su.t.phi2 > 0)) return {lead, 0, Expansion::None, 0, true};  // relay never powered
  if (!(gamma > 0)) return {0, lead, Expansion::None, 0, true};
  const Y3Kernel k = y3_kernel(su, gamma);
  return choose(
      o, lead, [&](Expansion e) { return y3_attempt(k, lead, e, o); },
      [&] { return y3_quad(su, gamma, QuadratureOptions{}); });
}

Chosen x21(const Setup& su, const SeriesOptions& o) {
  const Q lead = cdf1(su, su.t.theta1);
  if (!std::isfinite(su.p.p_th)) return {0, lead, Expansion::None, 0, true};
  const X21Kernel k = x21_kernel(su);
  return choose(
      o, lead, [&](Expansion e) { return x21_attempt(k, lead, e, o); }, [&] { return x21_quad(su, QuadratureOptions{}); });
}

Expansion worse(Expansion a, Expansion b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

void add(SeriesReport& r, const std::string& name, Q value, Expansion how = Expansion::None,
         std::size_t terms = 0, bool converged = true) {
  r.components.push_back({name, static_cast<double>(value), how, terms, converged});
  r.expansion = worse(r.expansion, how);
  if (how == Expansion::Quadrature) r.fallback = true;
  if (!converged) r.converged = false;
}

void finalize(SeriesReport& r, Q raw) {
  r.raw_value = static_cast<double>(raw);
  r.value = std::clamp(r.raw_value, 0.0, 1.0);
}

// chi1 = int_0^theta1 f1(y) Y3(gamma_th1 - g11(y)) dy: series in x, quadrature in y.
double chi1_semi_analytic(const Setup& su, const SeriesOptions& o, Expansion& how, bool& converged) {
  if (!(su.t.beta1 > su.t.tau3_star)) return 0;
  SeriesOptions inner = o;
  inner.prefer_a = false;  // B is the well-conditioned one across the whole y range
  how = Expansion::SeriesB;
  converged = true;
  QuadratureOptions qo;
  qo.rel_tol = std::max(1e-12, o.accept_rel / 10);
  return detail::integrate(
      [&](double y) {
        const Chosen c = upsilon3(su, deficit(su, y), inner);
        how = worse(how, c.how);
        converged = converged && c.converged;
        return sf::gamma_pdf(su.k1, su.s.scale1, y) * static_cast<double>(c.whole);
      },
      0.0, su.t.theta1, qo, "chi1");
}

}  // namespace

std::string to_string(Expansion e) {
  switch (e) {
    case Expansion::None: return "none";
    case Expansion::SeriesA: return "series-a";
    case Expansion::SeriesB: return "series-b";
    case Expansion::Quadrature: return "quadrature";
  }
  return "unknown";
}

double op_u2_exact(const SystemParams& params) {
  const Setup su = make_setup(params);
  const ThresholdSet& t = su.t;
  // Success set of ||h2||^2: (tau1*, beta1) below saturation, (beta1*, inf) above.
  const Q p = t.beta1 > t.tau1_star ? cdf2(su, t.tau1_star) + mass2(su, t.beta1, t.beta1_star)
                                    : cdf2(su, t.beta1_star);
  return std::clamp(static_cast<double>(p), 0.0, 1.0);
}

SeriesReport op_u1_exact_nodirect(const SystemParams& params, const SeriesOptions& opts) {
  const Setup su = make_setup(params);
  const ThresholdSet& t = su.t;
  SeriesReport r;
  const bool printed = opts.form == SeriesForm::Printed;

  const Q y1 = cdf2(su, t.tau2_star);
  const Q y2 = printed ? cdf2(su, t.beta2) - cdf2(su, t.beta1) : mass2(su, t.beta1, t.beta2);
  const Chosen y3 = upsilon3(su, t.gamma_th1, opts);
  const Q y3_value = printed ? mass2(su, t.tau3_star, t.beta1) * y3.s : y3.whole;
  const Q y4 = std::isfinite(params.p_th)
                   ? ccdf2(su, t.beta3_star) * cdf0(su, t.gamma_th1 * params.sigma2 / (params.eta * params.p_th))
                   : Q(0);
  add(r, "Y1", y1);
  add(r, "Y2", y2);
  add(r, "Y3", y3_value, y3.how, y3.terms, y3.converged);
  add(r, "Y4", y4);
  r.u3_terms = y3.terms;
  finalize(r, y1 + y2 + y3_value + y4);
  return r;
}

SeriesReport op_u1_exact_direct(const SystemParams& params, const SeriesOptions& opts) {
  const Setup su = make_setup(params);
  const ThresholdSet& t = su.t;
  SeriesReport r;
  const bool printed = opts.form == SeriesForm::Printed;
  const Q f1 = cdf1(su, t.theta1);

  Q chi1 = 0;
  if (!printed) {
    Expansion how = Expansion::None;
    bool converged = true;
    chi1 = to_q(chi1_semi_analytic(su, opts, how, converged));
    add(r, "chi1", chi1, how, 0, converged);
  } else {
    add(r, "chi1", chi1);
  }

  const double relay_sat = printed ? t.beta2_star : t.beta3_star;
  const Q tail = ccdf2(su, relay_sat);
  Q x21_value = 0;
  Chosen x;
  if (tail > 0) {
    x = x21(su, opts);
    x21_value = printed ? cdf0(su, t.theta1) - x.s : x.whole;
    add(r, "X21", x21_value, x.how, x.terms, x.converged);
    r.x21_terms = x.terms;
  } else {
    add(r, "X21", x21_value);
  }
  const Q chi2 = tail * x21_value;
  const Q chi3 = printed ? cdf2(su, t.tau2_star) - f1 : cdf2(su, t.tau2_star) * f1;
  const Q chi4 = printed ? (cdf2(su, t.beta3) - cdf2(su, t.beta2)) * f1 : mass2(su, t.beta1, t.beta2) * f1;
  add(r, "chi2", chi2);
  add(r, "chi3", chi3);
  add(r, "chi4", chi4);
  finalize(r, chi1 + chi2 + chi3 + chi4);
  return r;
}

SeriesReport op_u1_exact(const SystemParams& params, const SeriesOptions& opts) {
  return params.scenario == Scenario::WithDirectLink ? op_u1_exact_direct(params, opts)
                                                     : op_u1_exact_nodirect(params, opts);
}

double op_u1_quadrature_oracle(const SystemParams& params, Scenario scenario, const QuadratureOptions& opts) {
  SystemParams p = params;
  p.scenario = scenario;
  const Setup su = make_setup(p);
  const ThresholdSet& t = su.t;
  double total = 0;
  if (scenario == Scenario::WithoutDirectLink) {
    total += static_cast<double>(cdf2(su, t.tau2_star) + mass2(su, t.beta1, t.beta2));
    total += y3_quad(su, t.gamma_th1, opts);
    if (std::isfinite(p.p_th)) {
      total += static_cast<double>(ccdf2(su, t.beta3_star) *
                                   cdf0(su, t.gamma_th1 * p.sigma2 / (p.eta * p.p_th)));
    }
  } else {
    const Q f1 = cdf1(su, t.theta1);
    total += chi1_quad(su, opts);
    const Q tail = ccdf2(su, t.beta3_star);
    if (tail > 0 && std::isfinite(p.p_th)) total += static_cast<double>(tail) * x21_quad(su, opts);
    total += static_cast<double>(cdf2(su, t.tau2_star) * f1 + mass2(su, t.beta1, t.beta2) * f1);
  }
  return std::clamp(total, 0.0, 1.0);
}

IntegralResult upsilon3_series(const SystemParams& params, Expansion expansion, const SeriesOptions& opts) {
  const Setup su = make_setup(params);
  IntegralResult out;
  const Q lead = mass2(su, su.t.tau3_star, su.t.beta1);
  if (lead == 0) {
    out.converged = out.accepted = true;
    return out;
  }
  const Part part = y3_attempt(y3_kernel(su, su.t.gamma_th1), lead, expansion, opts);
  const Q whole = part.whole;
  out.value = static_cast<double>(whole);
  out.terms = part.terms;
  out.converged = part.applicable && part.converged;
  out.error_bound = static_cast<double>(part.err);
  out.accepted = out.converged && part.err <= to_q(opts.accept_rel) * num::abs(whole);
  return out;
}

IntegralResult x21_series(const SystemParams& params, Expansion expansion, const SeriesOptions& opts) {
  const Setup su = make_setup(params);
  IntegralResult out;
  const Q lead = cdf1(su, su.t.theta1);
  const Part part = x21_attempt(x21_kernel(su), lead, expansion, opts);
  const Q whole = part.whole;
  out.value = static_cast<double>(whole);
  out.terms = part.terms;
  out.converged = part.applicable && part.converged;
  out.error_bound = static_cast<double>(part.err);
  out.accepted = out.converged && part.err <= to_q(opts.accept_rel) * num::abs(whole);
  return out;
}

double upsilon3_quadrature(const SystemParams& params, const QuadratureOptions& opts) {
  const Setup su = make_setup(params);
  return y3_quad(su, su.t.gamma_th1, opts);
}

double x21_quadrature(const SystemParams& params, const QuadratureOptions& opts) {
  return x21_quad(make_setup(params), opts);
}

double chi1_quadrature(const SystemParams& params, const QuadratureOptions& opts) {
  return chi1_quad(make_setup(params), opts);
}

}  // namespace noma
