#include "noma/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "noma/asymptotic.hpp"

#ifndef NOMA_VERSION
#define NOMA_VERSION "unknown"
#endif

namespace noma {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kNull = "null";

std::string shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string cell(const std::optional<double>& x) { return x ? shortest(*x) : kNull; }

// JSON has no infinities; they travel as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json number(const std::optional<double>& x) { return x ? number(*x) : json(nullptr); }

double read_number(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument("config: '" + key + "' must be a number");
}

int read_int(const json& j, const std::string& key) {
  const double v = read_number(j, key);
  if (v != std::floor(v)) throw std::invalid_argument("config: '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::string method_key(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Asymptotic: return "asymptotic";
    case Method::MonteCarlo: return "mc";
    case Method::Quadrature: return "quadrature";
  }
  return "unknown";
}

bool has(const SweepSpec& spec, Method m) {
  return std::find(spec.evaluators.begin(), spec.evaluators.end(), m) != spec.evaluators.end();
}

void evaluate(const SweepSpec& spec, PointRecord& rec) {
  const SystemParams& p = rec.params;
  auto guard = [&](Method m, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rec.errors.push_back(method_key(m) + ": " + e.what());
    }
  };
  if (has(spec, Method::Exact)) {
    guard(Method::Exact, [&] { rec.u2.exact = op_u2_exact(p); });
    guard(Method::Exact, [&] {
      const SeriesReport r = op_u1_exact(p, spec.series);
      rec.u1.exact = r.value;
      rec.u1_expansion = r.expansion;
      rec.u1_converged = r.converged;
    });
  }
  if (has(spec, Method::Asymptotic)) {
    guard(Method::Asymptotic, [&] { rec.u2.asymptotic = op_u2_asymptotic(p); });
    guard(Method::Asymptotic, [&] { rec.u1.asymptotic = op_u1_asymptotic(p); });
  }
  if (has(spec, Method::Quadrature)) {
    guard(Method::Quadrature, [&] { rec.u1.quadrature = op_u1_quadrature_oracle(p, p.scenario, spec.quadrature); });
  }
  if (has(spec, Method::MonteCarlo)) {
    guard(Method::MonteCarlo, [&] {
      const OutageResult r = estimate_op(p, spec.mc);
      rec.mc = r;
      rec.u1.mc = r.p_u1;
      rec.u1.mc_stderr = r.stderr_u1;
      rec.u2.mc = r.p_u2;
      rec.u2.mc_stderr = r.stderr_u2;
    });
  }
}

json user_json(const UserValues& v, const Agreement& a) {
  json j;
  j["exact"] = number(v.exact);
  j["asymptotic"] = number(v.asymptotic);
  j["quadrature"] = number(v.quadrature);
  j["mc"] = number(v.mc);
  j["mc_stderr"] = number(v.mc_stderr);
  if (a.applicable) {
    j["z"] = number(a.z);
    j["agree"] = a.pass;
  } else {
    j["z"] = nullptr;
    j["agree"] = nullptr;
  }
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::SnrDb: return "snr_db";
    case Axis::SigmaSiDb: return "sigma_si_db";
    case Axis::Rho: return "rho";
    case Axis::DS2: return "d_s2";
    case Axis::NAntennas: return "n_antennas";
  }
  return "unknown";
}

Axis parse_axis(const std::string& text) {
  for (Axis a : {Axis::SnrDb, Axis::SigmaSiDb, Axis::Rho, Axis::DS2, Axis::NAntennas}) {
    if (to_string(a) == text) return a;
  }
  throw std::invalid_argument("unknown axis '" + text + "'");
}

Method parse_method(const std::string& text) {
  for (Method m : {Method::Exact, Method::Asymptotic, Method::MonteCarlo, Method::Quadrature}) {
    if (method_key(m) == text) return m;
  }
  throw std::invalid_argument("unknown evaluator '" + text + "' (exact, asymptotic, mc, quadrature)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10); }

double linear_to_db(double linear) { return 10 * std::log10(linear); }

SystemParams apply_axis(const SystemParams& base, Axis axis, double value, std::optional<double> relay_span) {
  SystemParams p = base;
  switch (axis) {
    case Axis::SnrDb: p.p_s = p.sigma2 * db_to_linear(value); break;
    case Axis::SigmaSiDb: p.sigma_si2 = db_to_linear(value); break;
    case Axis::Rho: p.rho = value; break;
    case Axis::DS2:
      p.d_s2 = value;
      if (relay_span) p.d_21 = *relay_span - value;
      break;
    case Axis::NAntennas:
      if (value != std::floor(value)) throw InvalidParams("n_antennas axis values must be integers");
      p.n_antennas = static_cast<int>(value);
      break;
  }
  return p;
}

void validate(const SweepSpec& spec) {
  if (spec.name.empty()) throw InvalidParams("sweep name must not be empty");
  if (spec.values.empty()) throw InvalidParams("sweep has no axis values");
  if (spec.curves.empty()) throw InvalidParams("sweep has no curves");
  if (spec.evaluators.empty()) throw InvalidParams("sweep has no evaluators");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1])) {
      throw InvalidParams("axis values must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
  noma::validate(spec.mc);
  for (std::size_t c = 0; c < spec.curves.size(); ++c) {
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      try {
        validate(apply_axis(spec.curves[c].params, spec.axis, spec.values[i], spec.relay_span));
      } catch (const InvalidParams& e) {
        throw InvalidParams("curve " + std::to_string(c) + " ('" + spec.curves[c].label + "') point " +
                            std::to_string(i) + ": " + e.what());
      }
    }
  }
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  SweepResult result;
  result.spec = spec;
  const std::size_t nv = spec.values.size();
  result.points.resize(spec.curves.size() * nv);
  for (std::size_t c = 0; c < spec.curves.size(); ++c) {
    for (std::size_t i = 0; i < nv; ++i) {
      PointRecord& rec = result.points[c * nv + i];
      rec.curve = c;
      rec.index = i;
      rec.axis_value = spec.values[i];
      rec.params = apply_axis(spec.curves[c].params, spec.axis, spec.values[i], spec.relay_span);
    }
  }
  const auto n = static_cast<std::int64_t>(result.points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < n; ++k) evaluate(spec, result.points[static_cast<std::size_t>(k)]);
  return result;
}

Agreement mc_agreement(double exact, const OutageResult& mc, bool user1) {
  Agreement a;
  a.applicable = true;
  const double p = user1 ? mc.p_u1 : mc.p_u2;
  const double n = static_cast<double>(mc.n_trials);
  const double se = std::max(std::sqrt(p * (1 - p) / n), std::sqrt(exact * (1 - exact) / n));
  const double diff = std::fabs(exact - p);
  if (se > 0) {
    a.z = diff / se;
  } else {
    a.z = diff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  a.pass = diff <= 3 * se || (exact < 1e-7 && p < 1e-7);
  return a;
}

ComparisonReport compare_report(const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  ComparisonReport rep;
  rep.points.resize(result.points.size());
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const PointRecord& rec = result.points[k];
    PointComparison& pc = rep.points[k];
    rep.evaluator_errors += rec.errors.size();
    if (rec.mc) {
      if (rec.u1.exact) pc.u1 = mc_agreement(*rec.u1.exact, *rec.mc, true);
      if (rec.u2.exact) pc.u2 = mc_agreement(*rec.u2.exact, *rec.mc, false);
    }
    for (const Agreement* a : {&pc.u1, &pc.u2}) {
      if (!a->applicable) continue;
      rep.mc_compared = true;
      rep.max_z = std::max(rep.max_z, a->z);
      if (!a->pass) ++rep.failed_agreements;
    }
    if (rec.u1.exact && rec.u1.quadrature && *rec.u1.quadrature > 1e-12) {
      pc.quadrature_gap = std::fabs(*rec.u1.exact - *rec.u1.quadrature) / *rec.u1.quadrature;
      rep.quadrature_compared = true;
      rep.max_quadrature_gap = std::max(rep.max_quadrature_gap, *pc.quadrature_gap);
    }
  }
  if (spec.axis == Axis::SnrDb && has(spec, Method::Exact)) {
    const std::size_t nv = spec.values.size();
    for (std::size_t c = 0; c < spec.curves.size(); ++c) {
      CurveFit fit;
      fit.curve = c;
      for (int user = 1; user <= 2; ++user) {
        std::vector<std::pair<double, double>> curve;
        for (std::size_t i = 0; i < nv; ++i) {
          const PointRecord& rec = result.points[c * nv + i];
          const auto& v = user == 1 ? rec.u1.exact : rec.u2.exact;
          if (v) curve.emplace_back(rec.axis_value, *v);
        }
        try {
          const double d = diversity_order_fit(curve, spec.fit_points);
          (user == 1 ? fit.u1 : fit.u2) = d;
        } catch (const std::invalid_argument&) {
          // too few points or zero OP in the window
        }
      }
      rep.diversity.push_back(fit);
    }
  }
  return rep;
}

std::vector<std::string> csv_columns(Axis axis) {
  const std::vector<std::string> all{to_string(axis), "user",       "duplex",  "sigma_si_db", "op_exact",
                                     "op_asym",       "op_mc",      "mc_stderr", "op_quad",   "scenario",
                                     "n_antennas",    "rho",        "d_s2",    "d_21",        "snr_db"};
  std::vector<std::string> cols;
  for (const auto& c : all) {
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  }
  return cols;
}

std::string to_csv(const SweepResult& result) {
  const Axis axis = result.spec.axis;
  const std::vector<std::string> cols = csv_columns(axis);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const PointRecord& rec : result.points) {
    const SystemParams& p = rec.params;
    for (int user = 1; user <= 2; ++user) {
      const UserValues& v = user == 1 ? rec.u1 : rec.u2;
      std::vector<std::string> row;
      for (const auto& c : cols) {
        if (c == cols.front()) {
          row.push_back(shortest(rec.axis_value));
        } else if (c == "user") {
          row.push_back(user == 1 ? "U1" : "U2");
        } else if (c == "duplex") {
          row.push_back(to_string(p.duplex));
        } else if (c == "sigma_si_db") {
          row.push_back(shortest(linear_to_db(p.sigma_si2)));
        } else if (c == "op_exact") {
          row.push_back(cell(v.exact));
        } else if (c == "op_asym") {
          row.push_back(cell(v.asymptotic));
        } else if (c == "op_mc") {
          row.push_back(cell(v.mc));
        } else if (c == "mc_stderr") {
          row.push_back(cell(v.mc_stderr));
        } else if (c == "op_quad") {
          row.push_back(cell(v.quadrature));
        } else if (c == "scenario") {
          row.push_back(to_string(p.scenario));
        } else if (c == "n_antennas") {
          row.push_back(std::to_string(p.n_antennas));
        } else if (c == "rho") {
          row.push_back(shortest(p.rho));
        } else if (c == "d_s2") {
          row.push_back(shortest(p.d_s2));
        } else if (c == "d_21") {
          row.push_back(shortest(p.d_21));
        } else if (c == "snr_db") {
          row.push_back(shortest(linear_to_db(p.p_s / p.sigma2)));
        }
      }
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
      out += "\n";
    }
  }
  return out;
}

json params_to_json(const SystemParams& p) {
  json j;
  j["p_s"] = number(p.p_s);
  j["sigma2"] = number(p.sigma2);
  j["a1"] = number(p.a1);
  j["a2"] = number(p.a2);
  j["rho"] = number(p.rho);
  j["eta"] = number(p.eta);
  j["p_th"] = number(p.p_th);
  j["sigma_si2"] = number(p.sigma_si2);
  j["duplex"] = to_string(p.duplex);
  j["m"] = p.m;
  j["n_antennas"] = p.n_antennas;
  j["d_s1"] = number(p.d_s1);
  j["d_s2"] = number(p.d_s2);
  j["d_21"] = number(p.d_21);
  j["path_loss_exp"] = number(p.path_loss_exp);
  j["r1"] = number(p.r1);
  j["r2"] = number(p.r2);
  j["scenario"] = to_string(p.scenario);
  return j;
}

SystemParams params_from_json(const json& j, const SystemParams& base) {
  if (!j.is_object()) throw std::invalid_argument("config: params must be an object");
  SystemParams p = base;
  for (const auto& [key, val] : j.items()) {
    if (key == "p_s") p.p_s = read_number(val, key);
    else if (key == "snr_db") p.p_s = p.sigma2 * db_to_linear(read_number(val, key));
    else if (key == "sigma2") p.sigma2 = read_number(val, key);
    else if (key == "a1") p.a1 = read_number(val, key);
    else if (key == "a2") p.a2 = read_number(val, key);
    else if (key == "rho") p.rho = read_number(val, key);
    else if (key == "eta") p.eta = read_number(val, key);
    else if (key == "p_th") p.p_th = read_number(val, key);
    else if (key == "sigma_si2") p.sigma_si2 = read_number(val, key);
    else if (key == "sigma_si_db") p.sigma_si2 = db_to_linear(read_number(val, key));
    else if (key == "duplex") p.duplex = parse_duplex(val.get<std::string>());
    else if (key == "m") p.m = read_int(val, key);
    else if (key == "n_antennas") p.n_antennas = read_int(val, key);
    else if (key == "d_s1") p.d_s1 = read_number(val, key);
    else if (key == "d_s2") p.d_s2 = read_number(val, key);
    else if (key == "d_21") p.d_21 = read_number(val, key);
    else if (key == "path_loss_exp") p.path_loss_exp = read_number(val, key);
    else if (key == "r1") p.r1 = read_number(val, key);
    else if (key == "r2") p.r2 = read_number(val, key);
    else if (key == "scenario") p.scenario = parse_scenario(val.get<std::string>());
    else throw std::invalid_argument("config: unknown parameter '" + key + "'");
  }
  return p;
}

json manifest_to_json(const SweepSpec& spec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["code_version"] = code_version();
  j["name"] = spec.name;
  j["axis"] = to_string(spec.axis);
  json values = json::array();
  for (double v : spec.values) values.push_back(number(v));
  j["values"] = values;
  j["relay_span"] = spec.relay_span ? json(number(*spec.relay_span)) : json(nullptr);
  json ev = json::array();
  for (Method m : spec.evaluators) ev.push_back(method_key(m));
  j["evaluators"] = ev;
  j["mc"] = {{"n_trials", spec.mc.n_trials}, {"seed", spec.mc.seed}, {"batch_size", spec.mc.batch_size}};
  j["series"] = {{"rel_tol", spec.series.rel_tol},
                 {"max_terms", spec.series.max_terms},
                 {"accept_rel", spec.series.accept_rel},
                 {"prefer_a", spec.series.prefer_a},
                 {"allow_fallback", spec.series.allow_fallback},
                 {"form", spec.series.form == SeriesForm::Repaired ? "repaired" : "printed"}};
  j["quadrature"] = {{"rel_tol", spec.quadrature.rel_tol},
                     {"abs_tol", spec.quadrature.abs_tol},
                     {"max_depth", spec.quadrature.max_depth}};
  j["fit_points"] = spec.fit_points;
  json curves = json::array();
  for (const Curve& c : spec.curves) curves.push_back({{"label", c.label}, {"params", params_to_json(c.params)}});
  j["curves"] = curves;
  return j;
}

SweepSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  SweepSpec spec;
  spec.name = j.value("name", std::string("sweep"));
  spec.axis = parse_axis(j.value("axis", std::string("snr_db")));
  if (j.contains("values")) {
    for (const auto& v : j.at("values")) spec.values.push_back(read_number(v, "values"));
  } else if (j.contains("range")) {
    const json& r = j.at("range");
    const double start = read_number(r.at("start"), "range.start");
    const double stop = read_number(r.at("stop"), "range.stop");
    const double step = read_number(r.at("step"), "range.step");
    if (!(step > 0)) throw std::invalid_argument("config: range.step must be positive");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) spec.values.push_back(std::round((start + i * step) * 1e9) / 1e9);
  }
  if (j.contains("relay_span") && !j.at("relay_span").is_null()) {
    spec.relay_span = read_number(j.at("relay_span"), "relay_span");
  }
  if (j.contains("evaluators")) {
    spec.evaluators.clear();
    for (const auto& e : j.at("evaluators")) spec.evaluators.push_back(parse_method(e.get<std::string>()));
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    spec.mc.n_trials = m.value("n_trials", spec.mc.n_trials);
    spec.mc.seed = m.value("seed", spec.mc.seed);
    spec.mc.batch_size = m.value("batch_size", spec.mc.batch_size);
  }
  if (j.contains("series")) {
    const json& s = j.at("series");
    spec.series.rel_tol = s.value("rel_tol", spec.series.rel_tol);
    spec.series.max_terms = s.value("max_terms", spec.series.max_terms);
    spec.series.accept_rel = s.value("accept_rel", spec.series.accept_rel);
    spec.series.prefer_a = s.value("prefer_a", spec.series.prefer_a);
    spec.series.allow_fallback = s.value("allow_fallback", spec.series.allow_fallback);
    const std::string form = s.value("form", std::string("repaired"));
    if (form == "repaired") spec.series.form = SeriesForm::Repaired;
    else if (form == "printed") spec.series.form = SeriesForm::Printed;
    else throw std::invalid_argument("config: series.form must be repaired or printed");
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    spec.quadrature.rel_tol = q.value("rel_tol", spec.quadrature.rel_tol);
    spec.quadrature.abs_tol = q.value("abs_tol", spec.quadrature.abs_tol);
    spec.quadrature.max_depth = q.value("max_depth", spec.quadrature.max_depth);
  }
  spec.fit_points = j.value("fit_points", spec.fit_points);
  const SystemParams base = j.contains("base") ? params_from_json(j.at("base")) : SystemParams{};
  if (j.contains("curves")) {
    for (const auto& c : j.at("curves")) {
      Curve curve;
      curve.label = c.value("label", std::string("curve") + std::to_string(spec.curves.size()));
      curve.params = c.contains("params") ? params_from_json(c.at("params"), base) : base;
      spec.curves.push_back(curve);
    }
  } else {
    spec.curves.push_back({"base", base});
  }
  return spec;
}

json report_to_json(const SweepResult& result, const ComparisonReport& report) {
  const SweepSpec& spec = result.spec;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = spec.name;
  j["axis"] = to_string(spec.axis);
  json curves = json::array();
  for (const Curve& c : spec.curves) curves.push_back({{"label", c.label}, {"params", params_to_json(c.params)}});
  j["curves"] = curves;
  json points = json::array();
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const PointRecord& rec = result.points[k];
    const PointComparison& pc = report.points[k];
    json pj;
    pj["curve"] = rec.curve;
    pj["axis_value"] = number(rec.axis_value);
    pj["u1"] = user_json(rec.u1, pc.u1);
    pj["u2"] = user_json(rec.u2, pc.u2);
    pj["u1_expansion"] = to_string(rec.u1_expansion);
    pj["u1_converged"] = rec.u1_converged;
    pj["quadrature_gap"] = number(pc.quadrature_gap);
    pj["errors"] = rec.errors;
    points.push_back(pj);
  }
  j["points"] = points;
  json fits = json::array();
  for (const CurveFit& f : report.diversity) {
    fits.push_back({{"curve", f.curve},
                    {"label", spec.curves[f.curve].label},
                    {"u1", number(f.u1)},
                    {"u2", number(f.u2)}});
  }
  json summary;
  summary["mc_compared"] = report.mc_compared;
  summary["quadrature_compared"] = report.quadrature_compared;
  summary["max_z"] = report.mc_compared ? number(report.max_z) : json(nullptr);
  summary["max_quadrature_gap"] = report.quadrature_compared ? number(report.max_quadrature_gap) : json(nullptr);
  summary["failed_agreements"] = report.failed_agreements;
  summary["evaluator_errors"] = report.evaluator_errors;
  summary["all_agree"] = report.all_agree();
  summary["diversity_orders"] = fits;
  j["summary"] = summary;
  return j;
}

OutputFiles emit_outputs(const SweepResult& result, const ComparisonReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const std::string stem = result.spec.name.empty() ? "sweep" : result.spec.name;
  OutputFiles files;
  files.csv = (dir / (stem + ".csv")).string();
  files.report = (dir / (stem + ".report.json")).string();
  files.manifest = (dir / (stem + ".manifest.json")).string();
  write_file(files.csv, to_csv(result));
  write_file(files.report, report_to_json(result, report).dump(2) + "\n");
  write_file(files.manifest, manifest_to_json(result.spec).dump(2) + "\n");
  return files;
}

std::string code_version() { return NOMA_VERSION; }

}  // namespace noma
