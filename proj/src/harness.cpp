#include "smrs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "smrs/realvalued.hpp"
#include "smrs/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smrs {

namespace {

constexpr int kPlacementRetries = 10000;

double wall_clock() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
#endif
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Non-overlapping uniform starts on [lo, hi], whole draw rejected on overlap.
std::vector<int> place_bands(int count, int width, int lo, int hi,
                             std::mt19937_64& rng) {
  if (width < 1) throw std::invalid_argument("band width must be >= 1 bin");
  if (hi < lo) throw std::invalid_argument("no room to place bands");
  std::uniform_int_distribution<int> dist(lo, hi);
  for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
    std::vector<int> starts(static_cast<std::size_t>(count));
    for (auto& s : starts) s = dist(rng);
    std::vector<int> sorted = starts;
    std::sort(sorted.begin(), sorted.end());
    bool ok = true;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
      if (sorted[i + 1] - sorted[i] < width) ok = false;
    if (ok) return sorted;
  }
  throw std::runtime_error("could not place non-overlapping bands");
}

} // namespace

int ExperimentConfig::m_total() const {
  return static_cast<int>(std::ceil(f_max / delta_f - 1e-9));
}

std::vector<ChannelConfig> ExperimentConfig::channels_hz() const {
  std::vector<ChannelConfig> out;
  for (double r : channel_rates) {
    const double m = r / delta_f;
    const int m_i = static_cast<int>(std::llround(m));
    if (m_i < 1 || std::abs(m - m_i) > 1e-6)
      throw std::invalid_argument(
          "channel rate is not an integer multiple of delta_f");
    out.push_back(ChannelConfig{m_i, r});
  }
  return out;
}

std::vector<ChannelConfig> ExperimentConfig::channels_normalized() const {
  std::vector<ChannelConfig> out = channels_hz();
  for (auto& c : out) c.rate = static_cast<double>(c.m_i);
  return out;
}

double ExperimentConfig::f_total() const {
  double t = 0.0;
  for (double r : channel_rates) t += r;
  return t;
}

void ExperimentConfig::validate() const {
  if (channel_rates.empty()) throw std::invalid_argument("no channels");
  if (delta_f <= 0.0) throw std::invalid_argument("delta_f must be positive");
  if (f_max <= 0.0) throw std::invalid_argument("f_max must be positive");
  if (band_count < 1) throw std::invalid_argument("band_count must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
  const auto chans = channels_hz();
  if (mode == SignalMode::real_mode)
    for (const auto& c : chans)
      if (c.m_i % 2 != 0)
        throw std::invalid_argument("real mode needs even channel multiples");
  if (landau_sweep.empty() && band_width <= 0.0)
    throw std::invalid_argument("either landau_sweep or band_width required");
  const int per_band_div = mode == SignalMode::real_mode ? 2 * band_count
                                                         : band_count;
  for (double fl : landau_sweep)
    if (fl <= 0.0 || fl / per_band_div < delta_f * 0.5)
      throw std::invalid_argument("landau value too small for the grid");
  const double span = f_max;
  const double total_width =
      (landau_sweep.empty() ? band_width * per_band_div
                            : *std::max_element(landau_sweep.begin(),
                                                landau_sweep.end()));
  if (total_width > span)
    throw std::invalid_argument("bands exceed the monitored span");
}

GeneratedSignal generate_complex_signal(const ExperimentConfig& cfg,
                                        int width_bins, std::mt19937_64& rng) {
  const int m = cfg.m_total();
  if (width_bins < 1) throw std::invalid_argument("degenerate band width");
  if (cfg.band_count * width_bins > m)
    throw std::invalid_argument("bands do not fit in the grid");

  GeneratedSignal g;
  g.spectrum = SpectrumGrid::zeros(1.0, m, false);
  const std::vector<int> starts =
      place_bands(cfg.band_count, width_bins, 0, m - width_bins, rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> energy(1.0, 5.0);
  for (int s : starts) {
    double norm_sq = 0.0;
    for (int j = 0; j < width_bins; ++j) {
      const cdouble v{gauss(rng), gauss(rng)};
      g.spectrum.at(s + j) = v;
      norm_sq += std::norm(v);
    }
    const double e = energy(rng);
    const double scale = e / std::sqrt(norm_sq);
    for (int j = 0; j < width_bins; ++j) g.spectrum.at(s + j) *= scale;
    g.support.bands.push_back(Block{s, width_bins});
  }
  return g;
}

GeneratedSignal generate_real_signal(const ExperimentConfig& cfg,
                                     int width_bins, std::mt19937_64& rng) {
  const int m = cfg.m_total();
  const int half = m / 2;
  if (width_bins < 1) throw std::invalid_argument("degenerate band width");
  if (cfg.band_count * width_bins > half)
    throw std::invalid_argument("bands do not fit in the positive half");

  GeneratedSignal g;
  g.spectrum = SpectrumGrid::zeros(1.0, m, true);
  // Positive starts; bin 0 stays out of every band.
  const std::vector<int> starts =
      place_bands(cfg.band_count, width_bins, 1, half - width_bins + 1, rng);

  std::uniform_real_distribution<double> amp(1.0, 1.2);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int s : starts) {
    const double a = amp(rng);
    const double th = phase(rng);
    const cdouble rot{std::cos(th), std::sin(th)};
    for (int j = 0; j < width_bins; ++j) {
      const double env =
          std::sin(M_PI * (j + 1) / static_cast<double>(width_bins + 1));
      g.spectrum.at(s + j) = a * env * rot;
    }
  }
  g.spectrum.enforce_conjugate_symmetry();

  // Mirrored bands first so the list is sorted in storage order.
  for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
    const int s = *it;
    const int neg_first = -(s + width_bins - 1) + half; // storage index
    g.support.bands.push_back(Block{neg_first, width_bins});
  }
  for (int s : starts) g.support.bands.push_back(Block{s + half, width_bins});
  return g;
}

SpectrumGrid add_noise(const SpectrumGrid& signal, double sigma,
                       std::mt19937_64& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  SpectrumGrid out = signal;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double comp = sigma / std::sqrt(2.0); // per-bin energy sigma^2

  if (!signal.signed_grid) {
    for (auto& v : out.values)
      v += cdouble{comp * gauss(rng), comp * gauss(rng)};
    return out;
  }
  out.at(0) += cdouble{sigma * gauss(rng), 0.0};
  for (int k = 1; k <= out.half(); ++k)
    out.at(k) += cdouble{comp * gauss(rng), comp * gauss(rng)};
  out.enforce_conjugate_symmetry();
  return out;
}

int aliased_bin_count(const BandSupport& support,
                      const std::vector<ChannelConfig>& channels,
                      const SpectrumGrid& grid) {
  std::vector<int> bins;
  for (const auto& b : support.bands)
    for (int i = 0; i < b.length; ++i) bins.push_back(b.first + i + grid.lo());
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());

  // Per channel, histogram the congruence classes of the support bins.
  std::vector<std::vector<int>> counts(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    counts[c].assign(static_cast<std::size_t>(channels[c].m_i), 0);
    for (int l : bins)
      ++counts[c][static_cast<std::size_t>(
          ((l % channels[c].m_i) + channels[c].m_i) % channels[c].m_i)];
  }
  int aliased = 0;
  for (int l : bins) {
    bool everywhere = true;
    for (std::size_t c = 0; c < channels.size() && everywhere; ++c) {
      const int cls = ((l % channels[c].m_i) + channels[c].m_i) % channels[c].m_i;
      if (counts[c][static_cast<std::size_t>(cls)] < 2) everywhere = false;
    }
    if (everywhere) ++aliased;
  }
  return aliased;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                          std::uint64_t trial) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  };
  return mix(master ^ mix(point ^ mix(trial)));
}

double band_l1_threshold(const ExperimentConfig& cfg) {
  const double fm =
      cfg.mode == SignalMode::real_mode ? cfg.f_max / 2.0 : cfg.f_max;
  const double f2 = cfg.channel_rates[cfg.channel_rates.size() > 1 ? 1 : 0];
  return 2.0 * cfg.noise_sigma * std::sqrt(fm / f2);
}

double band_l2_threshold(const ExperimentConfig& cfg) {
  return 3.3 * cfg.noise_sigma;
}

namespace {

struct Evaluation {
  bool success = false;
  double mean_abs = 0.0;
  std::vector<double> band_l1, band_l2;
};

Evaluation evaluate(const SpectrumGrid& truth, const SpectrumGrid& recon,
                    const BandSupport& support, const ExperimentConfig& cfg) {
  Evaluation ev;
  double acc = 0.0;
  for (int i = 0; i < truth.storage_size(); ++i)
    acc += std::abs(recon.values[static_cast<std::size_t>(i)] -
                    truth.values[static_cast<std::size_t>(i)]);
  ev.mean_abs = acc / truth.storage_size();

  for (const auto& b : support.bands) {
    double l1 = 0.0, l2 = 0.0;
    for (int i = 0; i < b.length; ++i) {
      const std::size_t idx = static_cast<std::size_t>(b.first + i);
      const double d = std::abs(recon.values[idx] - truth.values[idx]);
      l1 += d;
      l2 += d * d;
    }
    ev.band_l1.push_back(l1 / b.length);
    ev.band_l2.push_back(std::sqrt(l2 / b.length));
  }

  switch (cfg.success_rule) {
    case SuccessRule::perfect:
      ev.success = ev.mean_abs < kPerfectReconstructionTol;
      break;
    case SuccessRule::per_band_l1: {
      const double thr = band_l1_threshold(cfg);
      ev.success = !ev.band_l1.empty() &&
                   *std::max_element(ev.band_l1.begin(), ev.band_l1.end()) < thr;
      break;
    }
    case SuccessRule::per_band_l2: {
      const double thr = band_l2_threshold(cfg);
      ev.success = !ev.band_l2.empty() &&
                   *std::max_element(ev.band_l2.begin(), ev.band_l2.end()) < thr;
      break;
    }
  }
  return ev;
}

DetectorConfig trial_detector(const ExperimentConfig& cfg) {
  DetectorConfig det = cfg.detector;
  const bool noisy = cfg.noise_sigma > 0.0;
  det.mode = noisy ? DetectorConfig::Mode::noisy : DetectorConfig::Mode::noiseless;
  // Detector widths arrive in Hz; trials run on the normalized axis where
  // one grid unit is one bin.
  if (det.energy_window > 0.0) det.energy_window /= cfg.delta_f;
  return det;
}

SolveConfig trial_solver(const ExperimentConfig& cfg) {
  SolveConfig sol = cfg.solver;
  sol.noisy_mode = cfg.noise_sigma > 0.0;
  if (sol.subblock_width > 0.0) sol.subblock_width /= cfg.delta_f;
  return sol;
}

} // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, double f_landau_hz,
                      std::uint64_t trial_seed, int trial_id) {
  TrialRecord rec;
  rec.trial_id = trial_id;
  std::mt19937_64 rng(trial_seed);

  const bool real = cfg.mode == SignalMode::real_mode;
  const int per_band_div = real ? 2 * cfg.band_count : cfg.band_count;
  const int width_bins = std::max(
      1, static_cast<int>(std::llround(f_landau_hz / per_band_div / cfg.delta_f)));

  const std::vector<ChannelConfig> chans = cfg.channels_normalized();
  const DetectorConfig det = trial_detector(cfg);
  const SolveConfig sol = trial_solver(cfg);

  GeneratedSignal gen = real ? generate_real_signal(cfg, width_bins, rng)
                             : generate_complex_signal(cfg, width_bins, rng);
  rec.aliased_bin_count = aliased_bin_count(gen.support, chans, gen.spectrum);

  const SpectrumGrid sampled = add_noise(gen.spectrum, cfg.noise_sigma, rng);

  std::vector<ChannelSamples> samples;
  samples.reserve(chans.size());
  for (const auto& ch : chans) samples.push_back(fold_spectrum(sampled, ch));

  std::vector<std::vector<std::uint8_t>> indicators;
  indicators.reserve(chans.size());
  for (const auto& s : samples)
    indicators.push_back(channel_indicator(s, det, gen.spectrum.m_total));
  SupportMask mask =
      intersect_indicators(indicators, gen.spectrum.m_total, real);
  if (det.mode == DetectorConfig::Mode::noisy && det.widen_fraction > 0.0)
    mask = widen_mask(mask, det.widen_fraction);

  if (!mask.any()) {
    rec.failure_reason = "no_signal";
    rec.success = false;
    return rec;
  }

  SpectrumGrid recon =
      SpectrumGrid::zeros(1.0, gen.spectrum.m_total, real);

  if (!real) {
    FoldingMatrix fm;
    fm.channels = chans;
    fm.m_total = gen.spectrum.m_total;
    fm.signed_grid = false;
    const ReducedSystem red = reduce_system(fm, samples, mask, det);
    if (red.empty()) {
      rec.failure_reason = "empty_system";
      return rec;
    }
    std::vector<Block> blocks = reduced_blocks(mask, red.column_map);
    if (sol.noisy_mode && sol.subblock_width > 0.0)
      blocks = split_blocks(blocks, std::max(1, static_cast<int>(std::lround(
                                                   sol.subblock_width))));

    const double t0 = wall_clock();
    const Posedness posed = classify_posedness(red, sol);
    SolveOutcome out = posed == Posedness::well_posed || blocks.empty()
                           ? solve_direct(red, sol)
                           : block_omp(red, blocks, sol);
    rec.solver_seconds = wall_clock() - t0;

    rec.ill_posed = posed == Posedness::ill_posed;
    rec.condition_number = out.condition_number;
    rec.omp_iterations = out.iterations;
    rec.solver_converged = out.converged;
    rec.residual_norm = out.residual_norm;
    for (std::size_t c = 0; c < red.column_map.size(); ++c)
      recon.values[static_cast<std::size_t>(red.column_map[c])] =
          out.solution(static_cast<Eigen::Index>(c));
  } else {
    FoldingMatrix fm;
    fm.channels = chans;
    fm.m_total = gen.spectrum.m_total;
    fm.signed_grid = true;
    const RealSplitSystem split = build_real_split(fm, samples);

    const double t0 = wall_clock();
    const RealSolveResult rres = solve_real(split, mask, det, sol);
    rec.solver_seconds = wall_clock() - t0;

    if (rres.no_signal) {
      rec.failure_reason = "no_signal";
      return rec;
    }
    rec.ill_posed = rres.ill_posed;
    rec.condition_number = rres.condition_number;
    rec.omp_iterations =
        rres.real_part.iterations + rres.imag_part.iterations;
    rec.solver_converged =
        rres.real_part.converged && rres.imag_part.converged;
    rec.residual_norm = std::max(rres.real_part.residual_norm,
                                 rres.imag_part.residual_norm);
    recon = rres.spectrum;
  }

  const Evaluation ev = evaluate(gen.spectrum, recon, gen.support, cfg);
  rec.success = ev.success;
  rec.mean_abs_error = ev.mean_abs;
  rec.band_l1 = ev.band_l1;
  rec.band_l2 = ev.band_l2;
  return rec;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  Eigen::setNbThreads(1); // trials are the parallel axis

  std::vector<double> sweep = cfg.landau_sweep;
  if (sweep.empty()) {
    const int per_band_div =
        cfg.mode == SignalMode::real_mode ? 2 * cfg.band_count : cfg.band_count;
    sweep.push_back(cfg.band_width * per_band_div);
  }

  SweepResult result;
  result.trials.resize(sweep.size());

  for (std::size_t pt = 0; pt < sweep.size(); ++pt) {
    auto& records = result.trials[pt];
    records.resize(static_cast<std::size_t>(cfg.trials));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < cfg.trials; ++t) {
      records[static_cast<std::size_t>(t)] = run_trial(
          cfg, sweep[pt], derive_seed(cfg.seed, pt, static_cast<std::uint64_t>(t)),
          t);
    }

    SweepRow row;
    row.f_landau_hz = sweep[pt];
    const int per_band_div =
        cfg.mode == SignalMode::real_mode ? 2 * cfg.band_count : cfg.band_count;
    row.width_bins = std::max(
        1, static_cast<int>(std::llround(sweep[pt] / per_band_div / cfg.delta_f)));
    const double realized_landau = row.width_bins * per_band_div * cfg.delta_f;
    row.ratio = cfg.f_total() / realized_landau;
    row.trials = cfg.trials;

    int succ = 0, ill = 0, ill_succ = 0;
    double tsum = 0.0, csum = 0.0, cmax = 0.0, asum = 0.0, isum = 0.0;
    for (const auto& r : records) {
      succ += r.success ? 1 : 0;
      ill += r.ill_posed ? 1 : 0;
      ill_succ += (r.ill_posed && r.success) ? 1 : 0;
      tsum += r.solver_seconds;
      if (std::isfinite(r.condition_number)) {
        csum += r.condition_number;
        cmax = std::max(cmax, r.condition_number);
      } else {
        cmax = std::numeric_limits<double>::infinity();
      }
      asum += r.aliased_bin_count;
      isum += r.omp_iterations;
    }
    const double n = static_cast<double>(cfg.trials);
    row.success_rate = succ / n;
    row.ill_posed_rate = ill / n;
    row.ill_posed_success_rate = ill > 0 ? static_cast<double>(ill_succ) / ill : 0.0;
    row.mean_solver_seconds = tsum / n;
    row.mean_condition = csum / n;
    row.max_condition = cmax;
    row.mean_aliased_bins = asum / n;
    row.mean_omp_iterations = isum / n;
    result.rows.push_back(row);
  }
  return result;
}

std::string results_csv(const SweepResult& result, bool include_timing) {
  std::string out =
      "f_landau_hz,ratio,width_bins,trials,success_rate,ill_posed_rate,"
      "ill_posed_success_rate,mean_condition,max_condition,mean_aliased_bins,"
      "mean_omp_iterations";
  if (include_timing) out += ",mean_solver_seconds";
  out += "\n";
  for (const auto& r : result.rows) {
    out += fmt(r.f_landau_hz) + "," + fmt(r.ratio) + "," +
           std::to_string(r.width_bins) + "," + std::to_string(r.trials) + "," +
           fmt(r.success_rate) + "," + fmt(r.ill_posed_rate) + "," +
           fmt(r.ill_posed_success_rate) + "," + fmt(r.mean_condition) + "," +
           fmt(r.max_condition) + "," + fmt(r.mean_aliased_bins) + "," +
           fmt(r.mean_omp_iterations);
    if (include_timing) out += "," + fmt(r.mean_solver_seconds);
    out += "\n";
  }
  return out;
}

std::string trials_json(const ExperimentConfig& cfg, const SweepResult& result,
                        bool include_timing) {
  nlohmann::json root;
  root["mode"] = cfg.mode == SignalMode::real_mode ? "real" : "complex";
  root["delta_f"] = cfg.delta_f;
  root["f_max"] = cfg.f_max;
  root["channels"] = cfg.channel_rates;
  root["band_count"] = cfg.band_count;
  root["trials"] = cfg.trials;
  root["seed"] = cfg.seed;
  root["noise_sigma"] = cfg.noise_sigma;

  nlohmann::json points = nlohmann::json::array();
  for (std::size_t pt = 0; pt < result.trials.size(); ++pt) {
    nlohmann::json point;
    point["f_landau_hz"] = result.rows[pt].f_landau_hz;
    point["ratio"] = result.rows[pt].ratio;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : result.trials[pt]) {
      nlohmann::json t;
      t["trial_id"] = r.trial_id;
      t["success"] = r.success;
      t["ill_posed"] = r.ill_posed;
      t["condition_number"] =
          std::isfinite(r.condition_number) ? r.condition_number : -1.0;
      t["aliased_bin_count"] = r.aliased_bin_count;
      t["omp_iterations"] = r.omp_iterations;
      t["residual_norm"] = r.residual_norm;
      t["mean_abs_error"] = r.mean_abs_error;
      t["band_l1"] = r.band_l1;
      t["band_l2"] = r.band_l2;
      t["solver_converged"] = r.solver_converged;
      if (include_timing) t["solver_seconds"] = r.solver_seconds;
      if (!r.failure_reason.empty()) t["failure_reason"] = r.failure_reason;
      arr.push_back(std::move(t));
    }
    point["records"] = std::move(arr);
    points.push_back(std::move(point));
  }
  root["sweep"] = std::move(points);
  return root.dump(2);
}

} // namespace smrs
