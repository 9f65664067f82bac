// Domain model of the two-user downlink: Alamouti-coded BS, a near user (U2)
// that harvests energy by power splitting and decode-and-forwards the far
// user's symbol, and an N-antenna MRC far user (U1).
//
// All quantities are linear (not dB). With the default sigma2 = 1 the
// transmit power p_s equals the SNR.
#pragma once

#include <stdexcept>
#include <string>

namespace noma {

enum class Duplex { FullDuplex, HalfDuplex };
enum class Scenario { WithDirectLink, WithoutDirectLink };

/// Saturation input power of the harvesting circuit used when none is given.
/// Linear, relative to the unit noise power.
inline constexpr double kDefaultSaturationPower = 10.0;

struct SystemParams {
  double p_s = 1.0;
  double sigma2 = 1.0;
  double a1 = 0.8;  // far user (U1) share
  double a2 = 0.2;  // near user (U2) share
  double rho = 0.5;  // power-splitting ratio sent to the harvester
  double eta = 0.7;
  double p_th = kDefaultSaturationPower;  // may be +inf (linear harvester)
  double sigma_si2 = 1e-3;  // residual self-interference power
  Duplex duplex = Duplex::FullDuplex;
  int m = 1;  // Nakagami-m
  int n_antennas = 2;  // receive antennas at U1
  double d_s1 = 1.5;
  double d_s2 = 1.0;
  double d_21 = 0.5;
  double path_loss_exp = 2.0;
  double r1 = 0.5;  // target rates, bits per channel use
  double r2 = 3.0;
  Scenario scenario = Scenario::WithoutDirectLink;
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InvalidParams naming the offending field.
void validate(const SystemParams& params);

/// 1 in full-duplex, 0 in half-duplex.
inline double si_mode(const SystemParams& params) {
  return params.duplex == Duplex::FullDuplex ? 1.0 : 0.0;
}

/// Mean link powers and Gamma laws of the squared Frobenius norms:
/// ||h2||^2 ~ Gamma(2m, omega2/m), ||h1||^2 ~ Gamma(2mN, omega1/m),
/// ||h0||^2 ~ Gamma(mN, omega0/m).
struct ChannelStats {
  double omega2 = 1, omega1 = 1, omega0 = 1;
  double shape2 = 2, shape1 = 2, shape0 = 1;
  double scale2 = 1, scale1 = 1, scale0 = 1;
};

ChannelStats derive_stats(const SystemParams& params);

struct RateThresholds {
  double gamma_th1 = 0;
  double gamma_th2 = 0;
};

/// 2^R - 1 in full-duplex, 2^(2R) - 1 in half-duplex.
RateThresholds rate_thresholds(const SystemParams& params);

/// Gain thresholds on ||h2||^2 (tau*, beta*) and ||h1||^2 (theta1) that
/// delimit the decoding events. A threshold whose defining denominator is
/// not positive means "never decodable in that regime" and is +inf.
struct ThresholdSet {
  double gamma_th1 = 0, gamma_th2 = 0;
  double phi1 = 0;  // self-interference coupling
  double phi2 = 0;  // relay-link gain per unit p_s*||h2||^2*||h0||^2
  double tau1 = 0, tau2 = 0;
  double tau1_star = 0, tau2_star = 0, tau3_star = 0;
  double beta1 = 0, beta2 = 0, beta3 = 0;
  double beta1_star = 0, beta2_star = 0, beta3_star = 0;
  double theta1 = 0;
  /// a1 > (a2 + 2 phi1) gamma_th1: U2 can decode x1 below saturation.
  bool linear_x1 = false;
  /// a2 > 2 phi1 gamma_th2: U2 can decode x2 below saturation.
  bool linear_x2 = false;
  /// a1 > a2 gamma_th1: x1 decodable in saturation and on the direct link.
  bool saturated_x1 = false;
  /// Some regime lets U2 decode both symbols.
  bool feasible_u2 = false;
  /// Some path delivers x1 to U1.
  bool feasible_u1 = false;
};

ThresholdSet thresholds(const SystemParams& params);

struct ChannelGains {
  double h2sq = 0;  // BS -> U2
  double h1sq = 0;  // BS -> U1
  double h0sq = 0;  // U2 -> U1
};

struct SinrSet {
  double g21 = 0;  // x1 at U2
  double g22 = 0;  // x2 at U2 after SIC
  double g11 = 0;  // x1 at U1 from the BS
  double g12 = 0;  // x1 at U1 from the relay
  double g1 = 0;   // MRC sum g11 + g12
};

struct OutageIndicators {
  bool u1 = false;
  bool u2 = false;
};

/// Precomputes every per-parameter constant so that per-realization
/// evaluation is a handful of flops. Immutable after construction.
class LinkModel {
 public:
  explicit LinkModel(const SystemParams& params);

  const SystemParams& params() const { return params_; }
  const RateThresholds& rates() const { return rates_; }

  /// Nonlinear harvester: the self-consistent linear output
  /// eta*rho*p_s*h2/(1 - eta*rho*w*sigma_si2) while the input
  /// rho*(p_s*h2 + w*P_R*sigma_si2) stays at or below p_th, else eta*p_th.
  double harvested_power(double h2sq) const {
    const double linear = linear_gain_ * h2sq;
    const double p_in = params_.rho * (params_.p_s * h2sq + si_ * linear * params_.sigma_si2);
    return p_in <= params_.p_th ? linear : saturated_;
  }

  SinrSet sinr(const ChannelGains& g) const {
    const double p_r = harvested_power(g.h2sq);
    const double at_u2 = half_ps_ * (1.0 - params_.rho) * g.h2sq;
    const double noise_u2 = si_ * (1.0 - params_.rho) * params_.sigma_si2 * p_r + params_.sigma2;
    SinrSet s;
    s.g21 = params_.a1 * at_u2 / (params_.a2 * at_u2 + noise_u2);
    s.g22 = params_.a2 * at_u2 / noise_u2;
    const double at_u1 = half_ps_ * g.h1sq;
    s.g11 = params_.a1 * at_u1 / (params_.a2 * at_u1 + params_.sigma2);
    s.g12 = p_r * g.h0sq / params_.sigma2;
    s.g1 = s.g11 + s.g12;
    return s;
  }

  OutageIndicators outage(const ChannelGains& g) const {
    const SinrSet s = sinr(g);
    const double th1 = rates_.gamma_th1;
    const double th2 = rates_.gamma_th2;
    const bool relay_decodes = s.g21 > th1;
    OutageIndicators out;
    out.u2 = !(relay_decodes && s.g22 > th2);
    if (direct_) {
      out.u1 = relay_decodes ? s.g1 < th1 : s.g11 < th1;
    } else {
      out.u1 = !relay_decodes || s.g12 < th1;
    }
    return out;
  }

 private:
  SystemParams params_;
  RateThresholds rates_;
  double si_ = 0;
  double half_ps_ = 0;
  double linear_gain_ = 0;
  double saturated_ = 0;
  bool direct_ = false;
};

double harvested_power(const SystemParams& params, double h2sq);
SinrSet sinr_all(const SystemParams& params, const ChannelGains& gains);
OutageIndicators outage_indicators(const SystemParams& params, const ChannelGains& gains);

std::string to_string(Duplex d);
std::string to_string(Scenario s);
Duplex parse_duplex(const std::string& text);
Scenario parse_scenario(const std::string& text);

}  // namespace noma
