// Timing comparison between the OpenMP kernels and the serial reference:
// the folding operator at several grid sizes and the Monte-Carlo trial
// loop at one and at all hardware threads.

#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include <omp.h>

#include "smrs/harness.hpp"
#include "smrs/reference.hpp"
#include "smrs/spectral.hpp"

using namespace smrs;

namespace {

double time_of(int reps, const std::function<void()>& fn) {
  fn(); // warm up
  const double t0 = omp_get_wtime();
  for (int i = 0; i < reps; ++i) fn();
  return (omp_get_wtime() - t0) / reps;
}

void bench_fold(int m_total, int m_i, int reps) {
  std::mt19937_64 rng(42);
  SpectrumGrid x = SpectrumGrid::zeros(1.0, m_total, false);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : x.values) v = cdouble{g(rng), g(rng)};
  const ChannelConfig ch{m_i, static_cast<double>(m_i)};

  ChannelSamples serial, parallel;
  const double ts =
      time_of(reps, [&] { serial = ref::fold_spectrum(x, ch); });
  const double tp = time_of(reps, [&] { parallel = fold_spectrum(x, ch); });

  double err = 0.0, scale = 1e-300;
  for (std::size_t i = 0; i < serial.baseband.size(); ++i) {
    err = std::max(err, std::abs(serial.baseband[i] - parallel.baseband[i]));
    scale = std::max(scale, std::abs(serial.baseband[i]));
  }
  std::printf("fold  m=%8d m_i=%5d   serial %8.3f ms   openmp %8.3f ms   "
              "speedup %4.2fx   max rel diff %.1e\n",
              m_total, m_i, 1e3 * ts, 1e3 * tp, ts / tp, err / scale);
}

void bench_sweep() {
  ExperimentConfig cfg;
  cfg.mode = SignalMode::complex_mode;
  cfg.channel_rates = {0.95e9, 1.0e9, 1.05e9};
  cfg.delta_f = 25e6;
  cfg.f_max = 20e9;
  cfg.band_count = 4;
  cfg.trials = 64;
  cfg.seed = 7;
  cfg.landau_sweep = {0.6e9};

  const int hw = omp_get_max_threads();
  omp_set_num_threads(1);
  const double t0 = omp_get_wtime();
  const SweepResult serial = run_sweep(cfg);
  const double ts = omp_get_wtime() - t0;

  omp_set_num_threads(hw);
  const double t1 = omp_get_wtime();
  const SweepResult parallel = run_sweep(cfg);
  const double tp = omp_get_wtime() - t1;

  const bool same =
      results_csv(serial, false) == results_csv(parallel, false);
  std::printf("sweep 64 trials            1 thread %7.2f s   %d threads "
              "%7.2f s   speedup %4.2fx   identical results: %s\n",
              ts, hw, tp, ts / tp, same ? "yes" : "NO");
}

} // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());
  bench_fold(100'000, 1'000, 20);
  bench_fold(1'000'000, 10'000, 5);
  bench_fold(4'000'000, 40'000, 3);
  bench_fold(4'000, 190, 200); // production grid size
  bench_sweep();
  return 0;
}
