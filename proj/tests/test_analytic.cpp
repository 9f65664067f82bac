#include <cmath>
#include <string>

#include "doctest.h"
#include "noma/analytic.hpp"

using namespace noma;

namespace {

struct Oracle {
  const char* name;
  Scenario scenario;
  Duplex duplex;
  double sigma_si2;
  int n;
  double snr_db;
  double p1, p2;
};

// Independent mpmath evaluation (30 digits) of the outage events by direct
// numerical integration over the channel gains.
const Oracle kOracles[] = {
    {"fig5 FD -30dB 20dB", Scenario::WithoutDirectLink, Duplex::FullDuplex, 1e-3, 2, 20, 3.7786406562490392e-4,
     0.40985775466243656},
    {"fig5 HD 0dB 10dB", Scenario::WithoutDirectLink, Duplex::HalfDuplex, 1, 2, 10, 0.14540760172250854, 1.0},
    {"fig5 FD 0dB 30dB", Scenario::WithoutDirectLink, Duplex::FullDuplex, 1, 2, 30, 1.2695533035835835e-4,
     0.13187536435875758},
    {"fig2 FD -30dB 20dB", Scenario::WithDirectLink, Duplex::FullDuplex, 1e-3, 2, 20, 2.6843675326490599e-9,
     0.12259336777803888},
    {"fig2 FD 0dB 30dB", Scenario::WithDirectLink, Duplex::FullDuplex, 1, 2, 30, 6.1734831494488663e-14,
     0.030508042192196458},
    {"fig3 HD N3 16dB", Scenario::WithDirectLink, Duplex::HalfDuplex, 1e-3, 3, 16, 0.0035133880204008157,
     0.99544443945912017},
    {"fig3 FD N1 4dB", Scenario::WithDirectLink, Duplex::FullDuplex, 1e-3, 1, 4, 0.6010498764364712,
     0.99999999902867143},
};

SystemParams params_of(const Oracle& o) {
  SystemParams p;
  p.scenario = o.scenario;
  p.duplex = o.duplex;
  p.sigma_si2 = o.sigma_si2;
  p.n_antennas = o.n;
  p.p_s = std::pow(10.0, o.snr_db / 10);
  if (o.scenario == Scenario::WithDirectLink) {
    p.r1 = 1;
    p.r2 = 2;
  } else {
    p.r1 = 0.5;
    p.r2 = 3;
  }
  return p;
}

SystemParams sweep_point(Scenario sc, Duplex d, double si, int n, double snr_db) {
  return params_of({"", sc, d, si, n, snr_db, 0, 0});
}

}  // namespace

TEST_CASE("exact outage matches the high-precision oracle") {
  for (const Oracle& o : kOracles) {
    CAPTURE(std::string(o.name));
    const SystemParams p = params_of(o);
    const SeriesReport r = op_u1_exact(p);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - o.p1) <= 1e-9 * o.p1);
    CHECK(std::fabs(op_u2_exact(p) - o.p2) <= 1e-12 * o.p2);
    CHECK(std::fabs(op_u1_quadrature_oracle(p, p.scenario) - o.p1) <= 1e-8 * o.p1);
  }
}

TEST_CASE("series and quadrature agree across SNR") {
  for (Scenario sc : {Scenario::WithDirectLink, Scenario::WithoutDirectLink}) {
    for (Duplex d : {Duplex::FullDuplex, Duplex::HalfDuplex}) {
      for (double si : {1e-3, 1.0}) {
        for (double snr = 0; snr <= 40; snr += 8) {
          const SystemParams p = sweep_point(sc, d, si, 2, snr);
          const double series = op_u1_exact(p).value;
          const double quad = op_u1_quadrature_oracle(p, sc);
          CAPTURE(to_string(sc));
          CAPTURE(to_string(d));
          CAPTURE(si);
          CAPTURE(snr);
          CHECK(std::fabs(series - quad) <= 1e-8 * quad + 1e-300);
        }
      }
    }
  }
}

TEST_CASE("both expansions agree where both are accepted") {
  SeriesOptions o;
  int compared = 0;
  for (double snr = 10; snr <= 40; snr += 5) {
    SystemParams p = sweep_point(Scenario::WithoutDirectLink, Duplex::FullDuplex, 1e-3, 2, snr);
    const IntegralResult a = upsilon3_series(p, Expansion::SeriesA, o);
    const IntegralResult b = upsilon3_series(p, Expansion::SeriesB, o);
    const double q = upsilon3_quadrature(p);
    if (b.accepted) {
      CHECK(std::fabs(b.value - q) <= 1e-8 * std::fabs(q) + 1e-300);
    }
    if (a.accepted && b.accepted) {
      CHECK(std::fabs(a.value - b.value) <= 1e-8 * std::fabs(b.value) + 1e-300);
      ++compared;
    }
    p.scenario = Scenario::WithDirectLink;
    p.r1 = 1;
    p.r2 = 2;
    const IntegralResult xb = x21_series(p, Expansion::SeriesB, o);
    if (xb.accepted) CHECK(std::fabs(xb.value - x21_quadrature(p)) <= 1e-8 * std::fabs(xb.value) + 1e-300);
  }
  CHECK(compared > 0);
}

TEST_CASE("outage is monotone in SNR and bounded") {
  double prev1 = 1.0, prev2 = 1.0;
  for (double snr = 0; snr <= 40; snr += 2) {
    const SystemParams p = sweep_point(Scenario::WithDirectLink, Duplex::FullDuplex, 1e-3, 2, snr);
    const double p1 = op_u1_exact(p).value;
    const double p2 = op_u2_exact(p);
    CHECK(p1 >= 0);
    CHECK(p2 <= 1);
    CHECK(p1 <= prev1 * (1 + 1e-12));
    CHECK(p2 <= prev2 * (1 + 1e-12));
    prev1 = p1;
    prev2 = p2;
  }
}

TEST_CASE("printed series form differs from the repaired one") {
  const SystemParams p = sweep_point(Scenario::WithDirectLink, Duplex::FullDuplex, 1e-3, 2, 20);
  SeriesOptions printed;
  printed.form = SeriesForm::Printed;
  const double repaired = op_u1_exact(p).value;
  const double other = op_u1_exact(p, printed).raw_value;
  CHECK(std::fabs(other - repaired) > 1e-3 * repaired);
}

TEST_CASE("quadrature gives up with the reached error") {
  SystemParams p = sweep_point(Scenario::WithoutDirectLink, Duplex::FullDuplex, 1e-3, 2, 20);
  QuadratureOptions o;
  o.rel_tol = 1e-30;
  o.max_depth = 2;
  try {
    upsilon3_quadrature(p, o);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.achieved() > 0);
  }
}
