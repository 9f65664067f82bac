// Named sweep presets. Common settings: path-loss exponent 2, eta 0.7, m 1,
// a1/a2 = 0.8/0.2, d_s1 1.5, d_s2 1, d_21 0.5, rho 0.5, N 2; rates 1/2 with
// the direct link and 0.5/3 without.
//
// Chosen here:
//   SNR grids 0..40 dB in 2 dB steps; P_th = kDefaultSaturationPower;
//   fig4 rho in {0.3, 0.5, 0.8}, sigma_SI -30 dB, d_s2 0.1..1.4 with
//   d_21 = 1.5 - d_s2.
#include <stdexcept>

#include "noma/sweep.hpp"

namespace noma {

namespace {

SystemParams common(Scenario scenario) {
  SystemParams p;
  p.path_loss_exp = 2;
  p.eta = 0.7;
  p.m = 1;
  p.a1 = 0.8;
  p.a2 = 0.2;
  p.d_s1 = 1.5;
  p.d_s2 = 1.0;
  p.d_21 = 0.5;
  p.rho = 0.5;
  p.n_antennas = 2;
  p.p_th = kDefaultSaturationPower;
  p.scenario = scenario;
  if (scenario == Scenario::WithDirectLink) {
    p.r1 = 1;
    p.r2 = 2;
  } else {
    p.r1 = 0.5;
    p.r2 = 3;
  }
  return p;
}

std::vector<double> grid(double start, double stop, double step) {
  std::vector<double> v;
  const auto n = static_cast<int>((stop - start) / step + 0.5);
  for (int i = 0; i <= n; ++i) v.push_back(start + i * step);
  return v;
}

std::string db_label(double db) {
  return std::to_string(static_cast<int>(db)) + "dB";
}

// FD/HD x sigma_SI in {0, -30} dB at N = 2.
SweepSpec si_figure(const std::string& name, Scenario scenario) {
  SweepSpec s;
  s.name = name;
  s.axis = Axis::SnrDb;
  s.values = grid(0, 40, 2);
  s.evaluators = {Method::Exact, Method::Asymptotic, Method::MonteCarlo};
  for (Duplex d : {Duplex::FullDuplex, Duplex::HalfDuplex}) {
    for (double si_db : {0.0, -30.0}) {
      SystemParams p = common(scenario);
      p.duplex = d;
      p.sigma_si2 = db_to_linear(si_db);
      s.curves.push_back({to_string(d) + " sigma_si " + db_label(si_db), p});
    }
  }
  return s;
}

SweepSpec fig3() {
  SweepSpec s;
  s.name = "fig3";
  s.axis = Axis::SnrDb;
  s.values = grid(0, 40, 2);
  s.evaluators = {Method::Exact, Method::Asymptotic, Method::MonteCarlo};
  for (Duplex d : {Duplex::FullDuplex, Duplex::HalfDuplex}) {
    for (int n : {1, 2, 3}) {
      SystemParams p = common(Scenario::WithDirectLink);
      p.duplex = d;
      p.sigma_si2 = db_to_linear(-30);
      p.n_antennas = n;
      s.curves.push_back({to_string(d) + " N=" + std::to_string(n), p});
    }
  }
  return s;
}

SweepSpec fig4() {
  SweepSpec s;
  s.name = "fig4";
  s.axis = Axis::DS2;
  for (int i = 1; i <= 14; ++i) s.values.push_back(i / 10.0);
  s.relay_span = 1.5;
  s.evaluators = {Method::Exact, Method::MonteCarlo};
  for (Duplex d : {Duplex::FullDuplex, Duplex::HalfDuplex}) {
    for (double rho : {0.3, 0.5, 0.8}) {
      SystemParams p = common(Scenario::WithDirectLink);
      p.duplex = d;
      p.sigma_si2 = db_to_linear(-30);
      p.rho = rho;
      p.p_s = p.sigma2 * db_to_linear(-20);
      s.curves.push_back({to_string(d) + " rho=" + std::to_string(rho).substr(0, 3), p});
    }
  }
  return s;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

SweepSpec preset(const std::string& name) {
  if (name == "fig2") return si_figure("fig2", Scenario::WithDirectLink);
  if (name == "fig3") return fig3();
  if (name == "fig4") return fig4();
  if (name == "fig5") return si_figure("fig5", Scenario::WithoutDirectLink);
  throw std::invalid_argument("unknown preset '" + name + "' (fig2, fig3, fig4, fig5)");
}

}  // namespace noma
