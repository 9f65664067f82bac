// noma: runs outage sweeps and writes CSV + JSON.
//
//   noma run --preset fig5 --trials 1e7 --out results
//   noma run --config sweep.json --evaluators exact,quadrature
//   noma presets
//
// Exit status: 0 all agreement checks pass, 2 exact and MC disagree
// somewhere, 1 usage or IO error.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "noma/sweep.hpp"

namespace {

std::vector<noma::Method> parse_evaluators(const std::string& list) {
  std::vector<noma::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(noma::parse_method(item));
  }
  return out;
}

std::string default_out_dir() {
  const char* env = std::getenv("NOMA_OUT_DIR");
  return env && *env ? env : "out";
}

void print_summary(const noma::SweepResult& result, const noma::ComparisonReport& report,
                   const noma::OutputFiles& files) {
  std::printf("%s: %zu curves x %zu points\n", result.spec.name.c_str(), result.spec.curves.size(),
              result.spec.values.size());
  if (report.mc_compared) {
    std::printf("  exact vs mc: max z %.3g, %zu failed\n", report.max_z, report.failed_agreements);
  }
  if (report.quadrature_compared) {
    std::printf("  series vs quadrature: max rel gap %.3g\n", report.max_quadrature_gap);
  }
  for (const auto& fit : report.diversity) {
    std::printf("  DO %-20s U1 %s  U2 %s\n", result.spec.curves[fit.curve].label.c_str(),
                fit.u1 ? std::to_string(*fit.u1).c_str() : "-", fit.u2 ? std::to_string(*fit.u2).c_str() : "-");
  }
  if (report.evaluator_errors) std::printf("  %zu evaluator errors (see report)\n", report.evaluator_errors);
  std::printf("  wrote %s\n  wrote %s\n  wrote %s\n", files.csv.c_str(), files.report.c_str(),
              files.manifest.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage probability of two-user NOMA with an energy-harvesting relay"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a preset or a configured sweep");
  std::string preset_name, config_path, evaluators, out_dir = default_out_dir();
  double trials = 0;
  std::uint64_t seed = 0;
  double series_tol = 0;
  std::size_t fit_points = 0;
  auto* preset_opt = run->add_option("--preset", preset_name, "fig2, fig3, fig4 or fig5");
  auto* config_opt = run->add_option("--config", config_path, "JSON sweep configuration")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  run->add_option("--evaluators", evaluators, "Comma list of exact, asymptotic, mc, quadrature");
  auto* trials_opt = run->add_option("--trials", trials, "Monte Carlo trials per point");
  auto* seed_opt = run->add_option("--seed", seed, "Monte Carlo seed");
  run->add_option("--out", out_dir, "Output directory (default $NOMA_OUT_DIR or ./out)");
  auto* tol_opt = run->add_option("--series-tol", series_tol, "Relative truncation tolerance of the series");
  auto* fit_opt = run->add_option("--fit-points", fit_points, "High-SNR points used for diversity fits");

  app.add_subcommand("presets", "List the named presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (app.got_subcommand("presets")) {
    for (const auto& name : noma::preset_names()) {
      const noma::SweepSpec s = noma::preset(name);
      std::printf("%s  axis %s, %zu curves, %zu points\n", name.c_str(), noma::to_string(s.axis).c_str(),
                  s.curves.size(), s.values.size());
    }
    return 0;
  }

  try {
    noma::SweepSpec spec;
    if (!preset_name.empty()) {
      spec = noma::preset(preset_name);
    } else if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read " + config_path);
      spec = noma::spec_from_json(nlohmann::json::parse(in));
    } else {
      std::fprintf(stderr, "run: give --preset or --config\n");
      return 1;
    }
    if (!evaluators.empty()) spec.evaluators = parse_evaluators(evaluators);
    if (*trials_opt) {
      if (!(trials >= 1)) throw std::invalid_argument("--trials must be >= 1");
      spec.mc.n_trials = static_cast<std::uint64_t>(trials);
    }
    if (*seed_opt) spec.mc.seed = seed;
    if (*tol_opt) spec.series.rel_tol = series_tol;
    if (*fit_opt) spec.fit_points = fit_points;

    const noma::SweepResult result = noma::run_sweep(spec);
    const noma::ComparisonReport report = noma::compare_report(result);
    const noma::OutputFiles files = noma::emit_outputs(result, report, out_dir);
    print_summary(result, report, files);
    return report.all_agree() ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
