#include "noma/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace noma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidParams(message);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

// numerator / denominator, or +inf when the denominator is not positive.
double ratio_or_inf(double numerator, double denominator) {
  return denominator > 0 ? numerator / denominator : kInf;
}

}  // namespace

void validate(const SystemParams& p) {
  require(positive_finite(p.p_s), "p_s must be finite and positive");
  require(positive_finite(p.sigma2), "sigma2 must be finite and positive");
  require(positive_finite(p.a1) && positive_finite(p.a2), "a1 and a2 must be positive");
  require(std::fabs(p.a1 + p.a2 - 1.0) <= 1e-12, "a1 + a2 must equal 1");
  require(p.a1 > p.a2, "a1 must exceed a2");
  require(p.rho >= 0 && p.rho < 1, "rho must lie in [0, 1)");
  require(p.eta > 0 && p.eta <= 1, "eta must lie in (0, 1]");
  require(!std::isnan(p.p_th) && p.p_th > 0, "p_th must be positive (inf allowed)");
  require(std::isfinite(p.sigma_si2) && p.sigma_si2 >= 0, "sigma_si2 must be finite and >= 0");
  require(p.m >= 1, "m must be a positive integer");
  require(p.n_antennas >= 1, "n_antennas must be a positive integer");
  require(positive_finite(p.d_s1), "d_s1 must be finite and positive");
  require(positive_finite(p.d_s2), "d_s2 must be finite and positive");
  require(positive_finite(p.d_21), "d_21 must be finite and positive");
  require(std::isfinite(p.path_loss_exp) && p.path_loss_exp >= 0, "path_loss_exp must be >= 0");
  require(positive_finite(p.r1) && positive_finite(p.r2), "r1 and r2 must be finite and positive");
  require(p.eta * p.rho * si_mode(p) * p.sigma_si2 < 1, "eta*rho*sigma_si2 must be below 1 in full-duplex");
}

ChannelStats derive_stats(const SystemParams& p) {
  ChannelStats s;
  const double m = p.m;
  const double n = p.n_antennas;
  s.omega2 = std::pow(p.d_s2, -p.path_loss_exp);
  s.omega1 = std::pow(p.d_s1, -p.path_loss_exp);
  s.omega0 = std::pow(p.d_21, -p.path_loss_exp);
  s.shape2 = 2 * m;
  s.shape1 = 2 * m * n;
  s.shape0 = m * n;
  s.scale2 = s.omega2 / m;
  s.scale1 = s.omega1 / m;
  s.scale0 = s.omega0 / m;
  return s;
}

RateThresholds rate_thresholds(const SystemParams& p) {
  const double factor = p.duplex == Duplex::FullDuplex ? 1.0 : 2.0;
  return {std::exp2(factor * p.r1) - 1.0, std::exp2(factor * p.r2) - 1.0};
}

ThresholdSet thresholds(const SystemParams& p) {
  validate(p);
  ThresholdSet t;
  const RateThresholds r = rate_thresholds(p);
  const double g1 = r.gamma_th1;
  const double g2 = r.gamma_th2;
  t.gamma_th1 = g1;
  t.gamma_th2 = g2;

  const double w = si_mode(p);
  const double loop = p.eta * p.rho * w * p.sigma_si2;
  t.phi1 = loop / (1 - loop);
  t.phi2 = p.eta * p.rho / (p.sigma2 * (1 - loop));

  const double ps_split = p.p_s * (1 - p.rho);
  t.tau1 = ratio_or_inf(2 * g1 * p.sigma2, ps_split * (p.a1 - (p.a2 + 2 * t.phi1) * g1));
  t.tau2 = ratio_or_inf(2 * g2 * p.sigma2, ps_split * (p.a2 - 2 * t.phi1 * g2));
  t.beta1 = p.rho > 0 ? p.p_th * (1 - loop) / (p.rho * p.p_s) : kInf;

  // Noise plus saturated self-interference at U2; w*sigma_si2 = 0 must not
  // meet p_th = inf.
  const double si_sat = w * p.sigma_si2 > 0 ? p.eta * (1 - p.rho) * w * p.sigma_si2 * p.p_th : 0.0;
  const double noise_sat = p.sigma2 + si_sat;
  t.beta2 = ratio_or_inf(2 * g1 * noise_sat, ps_split * (p.a1 - p.a2 * g1));
  t.beta3 = ratio_or_inf(2 * g2 * noise_sat, ps_split * p.a2);
  t.theta1 = ratio_or_inf(2 * g1 * p.sigma2, p.p_s * (p.a1 - p.a2 * g1));

  t.tau1_star = std::max({0.0, t.tau1, t.tau2});
  t.tau2_star = std::min(t.tau1, t.beta1);
  t.tau3_star = std::max(0.0, t.tau1);
  t.beta1_star = std::max({t.beta1, t.beta2, t.beta3});
  t.beta2_star = std::max(0.0, t.beta2);
  t.beta3_star = std::max(t.beta1, t.beta2);

  t.linear_x1 = p.a1 > (p.a2 + 2 * t.phi1) * g1;
  t.linear_x2 = p.a2 > 2 * t.phi1 * g2;
  t.saturated_x1 = p.a1 > p.a2 * g1;
  t.feasible_u2 = t.beta1 > t.tau1_star || std::isfinite(t.beta1_star);
  t.feasible_u1 = t.saturated_x1 || t.linear_x1;
  return t;
}

LinkModel::LinkModel(const SystemParams& params) : params_(params) {
  validate(params_);
  rates_ = rate_thresholds(params_);
  si_ = si_mode(params_);
  half_ps_ = params_.p_s / 2;
  const double loop = params_.eta * params_.rho * si_ * params_.sigma_si2;
  linear_gain_ = params_.eta * params_.rho * params_.p_s / (1 - loop);
  saturated_ = std::isfinite(params_.p_th) ? params_.eta * params_.p_th : kInf;
  direct_ = params_.scenario == Scenario::WithDirectLink;
}

double harvested_power(const SystemParams& params, double h2sq) {
  return LinkModel(params).harvested_power(h2sq);
}

SinrSet sinr_all(const SystemParams& params, const ChannelGains& gains) {
  return LinkModel(params).sinr(gains);
}

OutageIndicators outage_indicators(const SystemParams& params, const ChannelGains& gains) {
  return LinkModel(params).outage(gains);
}

std::string to_string(Duplex d) { return d == Duplex::FullDuplex ? "FD" : "HD"; }

std::string to_string(Scenario s) {
  return s == Scenario::WithDirectLink ? "direct" : "no-direct";
}

Duplex parse_duplex(const std::string& text) {
  if (text == "FD" || text == "fd") return Duplex::FullDuplex;
  if (text == "HD" || text == "hd") return Duplex::HalfDuplex;
  throw InvalidParams("duplex must be FD or HD, got '" + text + "'");
}

Scenario parse_scenario(const std::string& text) {
  if (text == "direct") return Scenario::WithDirectLink;
  if (text == "no-direct") return Scenario::WithoutDirectLink;
  throw InvalidParams("scenario must be direct or no-direct, got '" + text + "'");
}

}  // namespace noma
