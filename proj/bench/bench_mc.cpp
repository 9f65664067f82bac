// Serial vs OpenMP Monte Carlo timing on one fig5 point.
//   bench_mc [trials] [repeats]
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "noma/montecarlo.hpp"
#include "noma/sweep.hpp"

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  noma::McConfig cfg;
  cfg.n_trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4'000'000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  noma::SystemParams p = noma::preset("fig5").curves.front().params;
  p.p_s = noma::db_to_linear(20);

  noma::OutageResult serial, parallel;
  const double ts = best_of(repeats, [&] { serial = noma::estimate_op_serial(p, cfg); });
  const double tp = best_of(repeats, [&] { parallel = noma::estimate_op(p, cfg); });
  const bool same = serial.count_u1 == parallel.count_u1 && serial.count_u2 == parallel.count_u2;

  std::printf("trials %llu, threads %d\n", static_cast<unsigned long long>(cfg.n_trials), omp_get_max_threads());
  std::printf("serial   %.3f s  (%.1f Mtrial/s)\n", ts, cfg.n_trials / ts / 1e6);
  std::printf("openmp   %.3f s  (%.1f Mtrial/s)  speedup %.2fx\n", tp, cfg.n_trials / tp / 1e6, ts / tp);
  std::printf("counts   u1 %llu u2 %llu  identical %s\n", static_cast<unsigned long long>(parallel.count_u1),
              static_cast<unsigned long long>(parallel.count_u2), same ? "yes" : "NO");
  return same ? 0 : 1;
}
