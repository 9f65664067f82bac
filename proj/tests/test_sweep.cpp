#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "noma/sweep.hpp"

using namespace noma;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("noma_test_" + name);
  fs::remove_all(dir);
  return dir;
}

SweepSpec small_spec() {
  SweepSpec s = preset("fig5");
  s.values = {10, 20, 30};
  s.curves.resize(2);
  s.mc.n_trials = 20'000;
  s.evaluators = {Method::Exact, Method::Asymptotic, Method::MonteCarlo, Method::Quadrature};
  return s;
}

}  // namespace

TEST_CASE("preset shapes") {
  const SweepSpec f2 = preset("fig2");
  CHECK(f2.curves.size() == 4);
  CHECK(f2.values.size() == 21);
  CHECK(f2.values.front() == 0);
  CHECK(f2.values.back() == 40);
  CHECK(f2.curves[0].params.scenario == Scenario::WithDirectLink);
  CHECK(f2.curves[0].params.r1 == 1);
  CHECK(f2.curves[0].label == "FD sigma_si 0dB");

  const SweepSpec f3 = preset("fig3");
  CHECK(f3.curves.size() == 6);
  CHECK(f3.curves[2].params.n_antennas == 3);
  CHECK(f3.curves[2].params.sigma_si2 == doctest::Approx(1e-3));

  const SweepSpec f4 = preset("fig4");
  CHECK(f4.axis == Axis::DS2);
  CHECK(f4.values.size() == 14);
  const SystemParams moved = apply_axis(f4.curves[0].params, f4.axis, 0.4, f4.relay_span);
  CHECK(moved.d_s2 == doctest::Approx(0.4));
  CHECK(moved.d_21 == doctest::Approx(1.1));

  const SweepSpec f5 = preset("fig5");
  CHECK(f5.curves[1].params.scenario == Scenario::WithoutDirectLink);
  CHECK(f5.curves[1].params.r2 == 3);
  CHECK(f5.curves[3].params.duplex == Duplex::HalfDuplex);

  CHECK_THROWS_AS(preset("fig9"), std::invalid_argument);
}

TEST_CASE("validate names the curve and point") {
  SweepSpec s = preset("fig5");
  s.axis = Axis::Rho;
  s.values = {0.2, 0.5, 1.0};
  try {
    validate(s);
    FAIL("expected InvalidParams");
  } catch (const InvalidParams& e) {
    const std::string msg = e.what();
    CHECK(msg.find("curve 0") != std::string::npos);
    CHECK(msg.find("point 2") != std::string::npos);
    CHECK(msg.find("rho") != std::string::npos);
  }
  s.values = {0.5, 0.2};
  CHECK_THROWS_AS(validate(s), InvalidParams);
}

TEST_CASE("sweep runs every evaluator and reports agreement") {
  const SweepSpec s = small_spec();
  const SweepResult r = run_sweep(s);
  REQUIRE(r.points.size() == 6);
  CHECK(r.points[3].curve == 1);
  CHECK(r.points[3].index == 0);
  for (const auto& pt : r.points) {
    CHECK(pt.errors.empty());
    CHECK(pt.u1.exact.has_value());
    CHECK(pt.u1.asymptotic.has_value());
    CHECK(pt.u1.quadrature.has_value());
    CHECK_FALSE(pt.u2.quadrature.has_value());
    CHECK(pt.mc.has_value());
  }
  const ComparisonReport rep = compare_report(r);
  CHECK(rep.mc_compared);
  CHECK(rep.quadrature_compared);
  CHECK(rep.max_quadrature_gap < 1e-8);
  CHECK(rep.diversity.size() == 2);
}

TEST_CASE("MC agreement rule") {
  OutageResult mc;
  mc.n_trials = 1'000'000;
  mc.p_u1 = 0.0101;
  mc.stderr_u1 = std::sqrt(mc.p_u1 * (1 - mc.p_u1) / 1e6);
  CHECK(mc_agreement(0.01, mc, true).pass);
  CHECK_FALSE(mc_agreement(0.0095, mc, true).pass);
  // No hits at all: the exact value sets the error bar.
  mc.p_u1 = 0;
  mc.stderr_u1 = 0;
  CHECK(mc_agreement(2e-6, mc, true).pass);
  CHECK_FALSE(mc_agreement(1e-4, mc, true).pass);
  CHECK(mc_agreement(1e-9, mc, true).pass);
}

TEST_CASE("CSV layout") {
  const std::vector<std::string> cols = csv_columns(Axis::SnrDb);
  CHECK(cols.front() == "snr_db");
  CHECK(std::count(cols.begin(), cols.end(), "snr_db") == 1);
  CHECK(csv_columns(Axis::Rho).back() == "snr_db");

  SweepSpec s = small_spec();
  s.evaluators = {Method::Exact};
  const std::string csv = to_csv(run_sweep(s));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header ==
        "snr_db,user,duplex,sigma_si_db,op_exact,op_asym,op_mc,mc_stderr,op_quad,scenario,n_antennas,rho,d_s2,d_21");
  std::getline(in, row);
  CHECK(row.rfind("10,U1,FD,0,", 0) == 0);
  CHECK(row.find(",null,null,null,null,") != std::string::npos);
  std::size_t lines = 1;  // rows, first one already read
  while (std::getline(in, row)) ++lines;
  CHECK(lines == 2 * 6);
}

TEST_CASE("outputs are deterministic and the manifest reloads") {
  const SweepSpec s = small_spec();
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  const SweepResult ra = run_sweep(s);
  const OutputFiles fa = emit_outputs(ra, compare_report(ra), a.string());
  const SweepSpec again = spec_from_json(nlohmann::json::parse(slurp(fa.manifest)));
  const SweepResult rb = run_sweep(again);
  const OutputFiles fb = emit_outputs(rb, compare_report(rb), b.string());
  CHECK(slurp(fa.csv) == slurp(fb.csv));
  CHECK(slurp(fa.report) == slurp(fb.report));
  CHECK(slurp(fa.manifest) == slurp(fb.manifest));

  const auto manifest = nlohmann::json::parse(slurp(fa.manifest));
  CHECK(manifest.at("schema_version") == 1);
  CHECK(manifest.at("code_version") == code_version());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("infinite saturation power survives JSON") {
  SystemParams p;
  p.p_th = std::numeric_limits<double>::infinity();
  const nlohmann::json j = params_to_json(p);
  CHECK(j.at("p_th") == "inf");
  CHECK(std::isinf(params_from_json(j).p_th));
  CHECK_THROWS(params_from_json(nlohmann::json{{"colour", 1}}));
}

TEST_CASE("config parsing") {
  const auto j = nlohmann::json::parse(R"({
    "name": "cfg", "axis": "snr_db", "range": {"start": 0, "stop": 10, "step": 5},
    "evaluators": ["exact", "quadrature"],
    "base": {"scenario": "direct", "r1": 1, "r2": 2},
    "curves": [{"label": "a", "params": {"duplex": "HD"}}, {"label": "b", "params": {"sigma_si_db": -30}}]
  })");
  const SweepSpec s = spec_from_json(j);
  CHECK(s.values == std::vector<double>{0, 5, 10});
  CHECK(s.curves.size() == 2);
  CHECK(s.curves[0].params.duplex == Duplex::HalfDuplex);
  CHECK(s.curves[0].params.scenario == Scenario::WithDirectLink);
  CHECK(s.curves[1].params.sigma_si2 == doctest::Approx(1e-3));
  CHECK(s.evaluators.size() == 2);
  CHECK_THROWS(spec_from_json(nlohmann::json::parse(R"({"name": "x", "axis": "nope"})")));
}

TEST_CASE("empty result still writes a header") {
  SweepResult r;
  r.spec.name = "empty";
  const fs::path dir = scratch_dir("empty");
  const OutputFiles f = emit_outputs(r, compare_report(r), dir.string());
  CHECK(slurp(f.csv).rfind("snr_db,user,", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(f.report)).contains("summary"));
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directory") {
  SweepResult r;
  r.spec.name = "x";
  CHECK_THROWS_AS(emit_outputs(r, compare_report(r), "/proc/noma/out"), std::runtime_error);
}
