// Seeded Monte Carlo estimation of the outage probabilities.
//
// Trials are cut into fixed-size batches; batch b always draws from an
// mt19937_64 seeded by (seed, b), and the reduction adds integer counts, so
// the estimate is bit-identical for any number of OpenMP threads.
#pragma once

#include <array>
#include <complex>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "noma/model.hpp"

namespace noma {

enum class Method { Exact, Asymptotic, MonteCarlo, Quadrature };

std::string to_string(Method method);

struct McConfig {
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t batch_size = 1 << 16;
};

void validate(const McConfig& cfg);

struct OutageResult {
  double p_u1 = 0, p_u2 = 0;
  double stderr_u1 = 0, stderr_u2 = 0;
  Method method = Method::MonteCarlo;
  std::uint64_t n_trials = 0;
  std::uint64_t count_u1 = 0, count_u2 = 0;
  /// Fewer than 100 outage events: the normal interval is unreliable.
  bool low_count_u1 = false, low_count_u2 = false;
};

/// Seed of the generator used for batch `batch`.
std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t batch);

/// Gamma(shape, scale) draw for integer shape: -scale * ln(prod of uniforms).
template <class Rng>
double gamma_int_sample(int shape, double scale, Rng& rng) {
  constexpr double kTwoM53 = 1.0 / 9007199254740992.0;
  double log_sum = 0;
  double prod = 1;
  for (int i = 0; i < shape; ++i) {
    prod *= static_cast<double>((rng() >> 11) + 1) * kTwoM53;  // (0, 1]
    if (prod < 1e-280) {
      log_sum += std::log(prod);
      prod = 1;
    }
  }
  return -scale * (log_sum + std::log(prod));
}

template <class Rng>
ChannelGains sample_gains(const SystemParams& params, Rng& rng) {
  const ChannelStats s = derive_stats(params);
  ChannelGains g;
  g.h2sq = gamma_int_sample(2 * params.m, s.scale2, rng);
  g.h1sq = gamma_int_sample(2 * params.m * params.n_antennas, s.scale1, rng);
  g.h0sq = gamma_int_sample(params.m * params.n_antennas, s.scale0, rng);
  return g;
}

/// OpenMP over batches.
OutageResult estimate_op(const SystemParams& params, const McConfig& cfg);

/// Single-threaded reference; must equal estimate_op bit for bit.
OutageResult estimate_op_serial(const SystemParams& params, const McConfig& cfg);

using ComplexMatrix = std::vector<std::array<std::complex<double>, 2>>;  // N rows, 2 tx

struct AlamoutiCheck {
  double effective_snr = 0;
  double predicted = 0;
  /// Residual cross-symbol gain after combining; zero up to rounding.
  double leakage = 0;
};

/// Runs one Alamouti block through channel h (row j = receive antenna j,
/// column i = transmit antenna i) with per-antenna power snr/2 and unit
/// noise, applies the linear combiner with MRC over the rows and returns the
/// post-combining SNR of s1 next to (snr/2)*||h||_F^2.
AlamoutiCheck alamouti_effective_snr_check(const ComplexMatrix& h, double snr);

}  // namespace noma
