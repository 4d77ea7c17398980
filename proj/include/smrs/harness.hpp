#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smrs/solver.hpp"
#include "smrs/support.hpp"
#include "smrs/types.hpp"

namespace smrs {

enum class SignalMode { complex_mode, real_mode };
enum class SuccessRule { perfect, per_band_l1, per_band_l2 };

/// Mean spectral deviation below this counts as perfect reconstruction.
inline constexpr double kPerfectReconstructionTol = 1e-10;

struct ExperimentConfig {
  SignalMode mode = SignalMode::complex_mode;
  std::vector<double> channel_rates; // Hz
  double delta_f = 25e6;             // Hz
  /// Complex mode: maximum carrier frequency. Real mode: full Nyquist span,
  /// so the signed grid covers [-f_max/2, f_max/2].
  double f_max = 20e9;
  int band_count = 4; // complex: bands; real: positive-frequency bands
  /// Per-band width (Hz); used when landau_sweep is empty.
  double band_width = 0.0;
  /// Total spectral support values (Hz) to sweep; per-band width is
  /// landau / band_count (complex) or landau / (2 * band_count) (real).
  std::vector<double> landau_sweep;
  int trials = 200;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0; // per-bin standard deviation; 0 = noiseless
  DetectorConfig detector;
  SolveConfig solver;
  SuccessRule success_rule = SuccessRule::perfect;

  int m_total() const;
  std::vector<ChannelConfig> channels_hz() const;
  /// Channels on the normalized axis (delta_f = 1, rate = m_i). All solving
  /// happens in these units so the residual thresholds keep their meaning.
  std::vector<ChannelConfig> channels_normalized() const;
  double f_total() const;
  void validate() const; // throws std::invalid_argument
};

struct BandSupport {
  std::vector<Block> bands; // storage-index runs, sorted
};

struct GeneratedSignal {
  SpectrumGrid spectrum; // normalized axis (delta_f = 1)
  BandSupport support;
};

/// Bands of i.i.d. standard-normal real/imag bins, each scaled so the band
/// 2-norm equals a uniform draw on [1,5]; band starts uniform with rejection
/// of overlaps. width_bins is the per-band width.
GeneratedSignal generate_complex_signal(const ExperimentConfig& cfg,
                                        int width_bins, std::mt19937_64& rng);

/// Positive-frequency bands A*sin(pi*(j+1)/(w+1))*exp(j*theta) with
/// A ~ U[1,1.2] and theta ~ U[0,2pi), mirrored conjugate onto negative bins;
/// no band touches DC.
GeneratedSignal generate_real_signal(const ExperimentConfig& cfg,
                                     int width_bins, std::mt19937_64& rng);

/// Adds complex Gaussian noise with per-bin energy sigma^2 to the
/// pre-sampled spectrum; signed grids get conjugate-symmetric noise.
SpectrumGrid add_noise(const SpectrumGrid& signal, double sigma,
                       std::mt19937_64& rng);

struct TrialRecord {
  int trial_id = 0;
  bool success = false;
  bool ill_posed = false;
  double condition_number = 0.0;
  int aliased_bin_count = 0;
  double solver_seconds = 0.0;
  int omp_iterations = 0;
  bool solver_converged = true;
  double residual_norm = 0.0;
  double mean_abs_error = 0.0;
  std::vector<double> band_l1; // mean |X_rec - X| per true band
  std::vector<double> band_l2; // rms per true band
  std::string failure_reason;  // empty unless a stage aborted
};

/// Support bins whose congruence class contains at least two support bins in
/// every channel (aliased everywhere, so not directly recoverable).
int aliased_bin_count(const BandSupport& support,
                      const std::vector<ChannelConfig>& channels,
                      const SpectrumGrid& grid);

/// Per-band mean error bound of the noisy l1 rule, 2*sigma*sqrt(F_max/F^2)
/// with F_max the maximum carrier and F^2 the second channel rate.
double band_l1_threshold(const ExperimentConfig& cfg);
/// Per-band rms bound of the alternative l2 rule, 3.3*sigma.
double band_l2_threshold(const ExperimentConfig& cfg);

/// One generate / fold / detect / reduce / solve / evaluate cycle.
TrialRecord run_trial(const ExperimentConfig& cfg, double f_landau_hz,
                      std::uint64_t trial_seed, int trial_id);

struct SweepRow {
  double f_landau_hz = 0.0;
  double ratio = 0.0; // f_total / realized f_landau
  int width_bins = 0;
  int trials = 0;
  double success_rate = 0.0;
  double ill_posed_rate = 0.0;
  double ill_posed_success_rate = 0.0;
  double mean_solver_seconds = 0.0;
  double mean_condition = 0.0;
  double max_condition = 0.0;
  double mean_aliased_bins = 0.0;
  double mean_omp_iterations = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::vector<TrialRecord>> trials; // per sweep point
};

/// Runs the declared sweep; trials execute in a parallel work pool with
/// per-trial seeds derived from (seed, point, trial), so results do not
/// depend on the thread count.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// CSV table, one row per sweep point. Wall-clock columns are included only
/// when include_timing is set; everything else is reproducible byte for byte
/// under a fixed seed.
std::string results_csv(const SweepResult& result, bool include_timing = true);

/// Full per-trial records as JSON.
std::string trials_json(const ExperimentConfig& cfg, const SweepResult& result,
                        bool include_timing = true);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                          std::uint64_t trial);

} // namespace smrs
