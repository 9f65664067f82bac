#include "noma/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noma {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Counts {
  std::uint64_t u1 = 0;
  std::uint64_t u2 = 0;
};

Counts run_batch(const LinkModel& model, const ChannelStats& stats, const McConfig& cfg,
                 std::uint64_t batch) {
  const SystemParams& p = model.params();
  const int k2 = 2 * p.m;
  const int k1 = 2 * p.m * p.n_antennas;
  const int k0 = p.m * p.n_antennas;
  const std::uint64_t begin = batch * cfg.batch_size;
  const std::uint64_t end = std::min(cfg.n_trials, begin + cfg.batch_size);
  std::mt19937_64 rng(batch_seed(cfg.seed, batch));
  Counts c;
  for (std::uint64_t i = begin; i < end; ++i) {
    ChannelGains g;
    g.h2sq = gamma_int_sample(k2, stats.scale2, rng);
    g.h1sq = gamma_int_sample(k1, stats.scale1, rng);
    g.h0sq = gamma_int_sample(k0, stats.scale0, rng);
    const OutageIndicators o = model.outage(g);
    c.u1 += o.u1;
    c.u2 += o.u2;
  }
  return c;
}

OutageResult finish(const Counts& c, std::uint64_t n) {
  OutageResult r;
  r.method = Method::MonteCarlo;
  r.n_trials = n;
  r.count_u1 = c.u1;
  r.count_u2 = c.u2;
  const double dn = static_cast<double>(n);
  r.p_u1 = static_cast<double>(c.u1) / dn;
  r.p_u2 = static_cast<double>(c.u2) / dn;
  r.stderr_u1 = std::sqrt(r.p_u1 * (1 - r.p_u1) / dn);
  r.stderr_u2 = std::sqrt(r.p_u2 * (1 - r.p_u2) / dn);
  r.low_count_u1 = c.u1 < 100;
  r.low_count_u2 = c.u2 < 100;
  return r;
}

std::uint64_t batch_count(const McConfig& cfg) {
  return (cfg.n_trials + cfg.batch_size - 1) / cfg.batch_size;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::Asymptotic: return "asymptotic";
    case Method::MonteCarlo: return "monte-carlo";
    case Method::Quadrature: return "quadrature";
  }
  return "unknown";
}

void validate(const McConfig& cfg) {
  if (cfg.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t batch) {
  return splitmix64(splitmix64(seed) ^ splitmix64(batch + 0x632be59bd9b4e019ULL));
}

OutageResult estimate_op(const SystemParams& params, const McConfig& cfg) {
  validate(cfg);
  const LinkModel model(params);
  const ChannelStats stats = derive_stats(params);
  const auto batches = static_cast<std::int64_t>(batch_count(cfg));
  std::uint64_t u1 = 0;
  std::uint64_t u2 = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : u1, u2)
  for (std::int64_t b = 0; b < batches; ++b) {
    const Counts c = run_batch(model, stats, cfg, static_cast<std::uint64_t>(b));
    u1 += c.u1;
    u2 += c.u2;
  }
  return finish({u1, u2}, cfg.n_trials);
}

OutageResult estimate_op_serial(const SystemParams& params, const McConfig& cfg) {
  validate(cfg);
  const LinkModel model(params);
  const ChannelStats stats = derive_stats(params);
  Counts total;
  for (std::uint64_t b = 0; b < batch_count(cfg); ++b) {
    const Counts c = run_batch(model, stats, cfg, b);
    total.u1 += c.u1;
    total.u2 += c.u2;
  }
  return finish(total, cfg.n_trials);
}

AlamoutiCheck alamouti_effective_snr_check(const ComplexMatrix& h, double snr) {
  if (h.empty()) throw std::invalid_argument("alamouti check: channel needs at least one row");
  if (!(snr > 0) || !std::isfinite(snr)) throw std::invalid_argument("alamouti check: snr must be positive");
  using cd = std::complex<double>;
  const double amp = std::sqrt(snr / 2);

  // Received block for unit symbols s1, s2 over two slots:
  //   slot 1: h(j,0) s1 + h(j,1) s2,   slot 2: -h(j,0) s2* + h(j,1) s1*.
  // Combiner: s1_hat = sum_j conj(h(j,0)) r1 + h(j,1) conj(r2).
  auto combine_s1 = [&](cd s1, cd s2) {
    cd out = 0;
    for (const auto& row : h) {
      const cd r1 = amp * (row[0] * s1 + row[1] * s2);
      const cd r2 = amp * (-row[0] * std::conj(s2) + row[1] * std::conj(s1));
      out += std::conj(row[0]) * r1 + row[1] * std::conj(r2);
    }
    return out;
  };
  const cd gain = combine_s1(1.0, 0.0);
  const cd cross = combine_s1(0.0, 1.0);

  // Unit-variance noise n1 (slot 1) and n2 (slot 2) enter as
  // conj(h(j,0)) n1 + h(j,1) conj(n2); its variance is the combiner norm.
  double noise = 0;
  double frob = 0;
  for (const auto& row : h) {
    noise += std::norm(row[0]) + std::norm(row[1]);
    frob += std::norm(row[0]) + std::norm(row[1]);
  }
  AlamoutiCheck out;
  out.effective_snr = noise > 0 ? std::norm(gain) / noise : 0.0;
  out.predicted = snr / 2 * frob;
  out.leakage = std::abs(cross);
  return out;
}

}  // namespace noma
