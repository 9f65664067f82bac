// Parameter sweeps over the evaluators, comparison report and output files.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "noma/analytic.hpp"
#include "noma/model.hpp"
#include "noma/montecarlo.hpp"

namespace noma {

enum class Axis { SnrDb, SigmaSiDb, Rho, DS2, NAntennas };

std::string to_string(Axis axis);
Axis parse_axis(const std::string& text);
Method parse_method(const std::string& text);

/// dB <-> linear power ratio; -inf dB is 0.
double db_to_linear(double db);
double linear_to_db(double linear);

/// One curve: the parameters that stay fixed while the axis moves.
struct Curve {
  std::string label;
  SystemParams params;
};

struct SweepSpec {
  std::string name;
  Axis axis = Axis::SnrDb;
  std::vector<double> values;
  std::vector<Curve> curves;
  std::vector<Method> evaluators{Method::Exact};
  McConfig mc;
  SeriesOptions series;
  QuadratureOptions quadrature;
  /// Points at the high end of the axis used for diversity-order fits.
  std::size_t fit_points = 3;
  /// On the d_s2 axis keep U2 on the BS-U1 line: d_21 = relay_span - d_s2.
  std::optional<double> relay_span;
};

/// Copy of `base` moved to `value` on `axis`.
SystemParams apply_axis(const SystemParams& base, Axis axis, double value, std::optional<double> relay_span);

/// Throws InvalidParams naming the curve and point index of the first bad point.
void validate(const SweepSpec& spec);

struct UserValues {
  std::optional<double> exact, asymptotic, quadrature, mc, mc_stderr;
};

struct PointRecord {
  std::size_t curve = 0;
  std::size_t index = 0;
  double axis_value = 0;
  SystemParams params;
  UserValues u1, u2;
  std::optional<OutageResult> mc;
  Expansion u1_expansion = Expansion::None;
  bool u1_converged = true;
  /// Evaluator failures, "evaluator: message".
  std::vector<std::string> errors;
};

struct SweepResult {
  SweepSpec spec;
  /// Curve-major, in spec order.
  std::vector<PointRecord> points;
};

/// Evaluates every point; points run in parallel, output order is fixed.
SweepResult run_sweep(const SweepSpec& spec);

struct Agreement {
  bool applicable = false;
  double z = 0;
  bool pass = true;
};

struct PointComparison {
  Agreement u1, u2;
  /// |exact - quadrature| / quadrature for U1 where quadrature > 1e-12.
  std::optional<double> quadrature_gap;
};

struct CurveFit {
  std::size_t curve = 0;
  std::optional<double> u1, u2;
};

struct ComparisonReport {
  std::vector<PointComparison> points;
  std::vector<CurveFit> diversity;
  bool mc_compared = false;
  bool quadrature_compared = false;
  double max_z = 0;
  double max_quadrature_gap = 0;
  std::size_t failed_agreements = 0;
  std::size_t evaluator_errors = 0;
  bool all_agree() const { return failed_agreements == 0; }
};

/// MC agreement: |exact - mc| <= 3 stderr or both below 1e-7. The standard
/// error is the larger of the MC estimate's and the one implied by the exact
/// value, so a handful of hits at tiny OP cannot shrink it to nothing.
Agreement mc_agreement(double exact, const OutageResult& mc, bool user1);

ComparisonReport compare_report(const SweepResult& result);

/// Column order of the sweep CSV for `axis`.
std::vector<std::string> csv_columns(Axis axis);
std::string to_csv(const SweepResult& result);

nlohmann::json params_to_json(const SystemParams& params);
SystemParams params_from_json(const nlohmann::json& j, const SystemParams& base = {});
nlohmann::json report_to_json(const SweepResult& result, const ComparisonReport& report);
nlohmann::json manifest_to_json(const SweepSpec& spec);

/// Parses a sweep configuration (see README for the schema).
SweepSpec spec_from_json(const nlohmann::json& j);

struct OutputFiles {
  std::string csv, report, manifest;
};

/// Writes <name>.csv, <name>.report.json and <name>.manifest.json into
/// out_dir (created if missing). Throws std::runtime_error naming the path.
OutputFiles emit_outputs(const SweepResult& result, const ComparisonReport& report, const std::string& out_dir);

/// Names accepted by preset().
std::vector<std::string> preset_names();
/// Named presets; throws std::invalid_argument on an unknown name.
SweepSpec preset(const std::string& name);

/// Version string recorded in manifests.
std::string code_version();

}  // namespace noma
