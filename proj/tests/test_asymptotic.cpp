#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "noma/analytic.hpp"
#include "noma/asymptotic.hpp"
#include "noma/specfun.hpp"

using namespace noma;

namespace {

SystemParams point(Scenario sc, Duplex d, double si, int n, double snr_db) {
  SystemParams p;
  p.scenario = sc;
  p.duplex = d;
  p.sigma_si2 = si;
  p.n_antennas = n;
  p.p_s = std::pow(10.0, snr_db / 10);
  if (sc == Scenario::WithDirectLink) {
    p.r1 = 1;
    p.r2 = 2;
  }
  return p;
}

std::vector<std::pair<double, double>> curve(double slope, double offset) {
  std::vector<std::pair<double, double>> c;
  for (double snr = 0; snr <= 40; snr += 5) c.emplace_back(snr, offset * std::pow(10.0, -slope * snr / 10));
  return c;
}

}  // namespace

TEST_CASE("power-law CDF") {
  CHECK(gamma_cdf_asymptotic(2, 1, 0) == 0);
  CHECK(gamma_cdf_asymptotic(3, 2.0, 1.0) == doctest::Approx(std::pow(0.5, 3) / 6));
  for (int k : {1, 2, 4}) {
    const double x = 1e-4;
    CHECK(gamma_cdf_asymptotic(k, 1.0, x) / specfun::gamma_cdf(k, 1.0, x) == doctest::Approx(1).epsilon(1e-3));
    CHECK(gamma_cdf_asymptotic(k, 1.0, 2 * x) / gamma_cdf_asymptotic(k, 1.0, x) ==
          doctest::Approx(std::pow(2.0, k)));
  }
}

TEST_CASE("U2 asymptote halves per 3 dB at m = 1 and tracks the exact value") {
  for (Duplex d : {Duplex::FullDuplex, Duplex::HalfDuplex}) {
    const SystemParams lo = point(Scenario::WithDirectLink, d, 1e-3, 2, 40);
    SystemParams hi = lo;
    hi.p_s *= 2;
    CHECK(op_u2_asymptotic(lo) / op_u2_asymptotic(hi) == doctest::Approx(4).epsilon(1e-9));
    CHECK(op_u2_asymptotic(lo) / op_u2_exact(lo) == doctest::Approx(1).epsilon(0.01));
  }
}

TEST_CASE("closed chi2 sum equals its quadrature") {
  for (int n : {1, 2, 3}) {
    for (double snr : {10.0, 25.0, 40.0}) {
      const SystemParams p = point(Scenario::WithDirectLink, Duplex::FullDuplex, 1e-3, n, snr);
      const double sum = chi2_asymptotic(p);
      const double quad = chi2_asymptotic_quadrature(p);
      CAPTURE(n);
      CAPTURE(snr);
      CHECK(std::fabs(sum - quad) <= 1e-8 * std::fabs(quad) + 1e-300);
    }
  }
}

TEST_CASE("asymptotes approach the exact outage at high SNR") {
  for (Scenario sc : {Scenario::WithDirectLink, Scenario::WithoutDirectLink}) {
    for (Duplex d : {Duplex::FullDuplex, Duplex::HalfDuplex}) {
      for (int n : {1, 2, 3}) {
        const SystemParams p = point(sc, d, 1e-3, n, 50);
        const double ratio = op_u1_asymptotic(p) / op_u1_exact(p).value;
        CAPTURE(to_string(sc));
        CAPTURE(to_string(d));
        CAPTURE(n);
        CHECK(ratio == doctest::Approx(1).epsilon(0.05));
      }
    }
  }
}

TEST_CASE("error floor of the relay-only case") {
  SystemParams p = point(Scenario::WithoutDirectLink, Duplex::FullDuplex, 1e-3, 1, 30);
  const AsymptoticDecomposition d = op_u1_asymptotic_nodirect(p);
  const ThresholdSet t = thresholds(p);
  const ChannelStats s = derive_stats(p);
  const double floor = gamma_cdf_asymptotic(1, s.scale0, t.gamma_th1 * p.sigma2 / (p.eta * p.p_th));
  bool seen = false;
  for (const auto& term : d.terms) {
    if (term.name == "C") {
      CHECK(term.coefficient == doctest::Approx(floor));
      CHECK(term.snr_exponent == 0);
      seen = true;
    }
  }
  CHECK(seen);
  CHECK(d.dominant_exponent == 0);
  CHECK(d.nu == 1);

  p.p_th = 1e8;
  const AsymptoticDecomposition big = op_u1_asymptotic_nodirect(p);
  for (const auto& term : big.terms) {
    if (term.name == "C") CHECK(term.coefficient == doctest::Approx(1e-7 * floor));  // k0 = 1: C ~ 1/P_th
  }

  p.p_th = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(op_u1_asymptotic_nodirect(p), InvalidParams);
}

TEST_CASE("logarithmic relay term when N = 2 m") {
  const SystemParams p = point(Scenario::WithoutDirectLink, Duplex::FullDuplex, 1e-3, 2, 30);
  const AsymptoticDecomposition d = op_u1_asymptotic_nodirect(p);
  CHECK(d.nu == 0);
  bool has_e = false;
  for (const auto& term : d.terms) {
    if (term.name == "E") {
      has_e = true;
      CHECK(term.snr_exponent == -2);
    }
    CHECK(term.name != "F");
  }
  CHECK(has_e);
}

TEST_CASE("diversity-order fit") {
  CHECK(diversity_order_fit(curve(2, 0.3)) == doctest::Approx(2));
  CHECK(diversity_order_fit(curve(4, 1e-2), 5) == doctest::Approx(4));
  auto bent = curve(1, 1);
  bent.back().second *= 10;  // rises by half a decade over the last 5 dB
  CHECK(diversity_order_fit(bent, 2) == doctest::Approx(-1));

  CHECK_THROWS_AS(diversity_order_fit({{0, 1}, {1, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(diversity_order_fit(curve(2, 1), 1), std::invalid_argument);
  auto zero = curve(2, 1);
  zero.back().second = 0;
  CHECK_THROWS_AS(diversity_order_fit(zero), std::invalid_argument);
  auto unordered = curve(2, 1);
  std::swap(unordered[0], unordered[1]);
  CHECK_THROWS_AS(diversity_order_fit(unordered), std::invalid_argument);
}
