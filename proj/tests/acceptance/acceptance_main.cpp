// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "smrs/harness.hpp"
#include "smrs/reference.hpp"
#include "smrs/solver.hpp"
#include "smrs/spectral.hpp"
#include "smrs/support.hpp"

using namespace smrs;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  if (!pass) ++g_failures;
}

struct Spearman {
  double rho = 0.0;
  double p_one_sided = 1.0;
};

std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

Spearman spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  Spearman s;
  if (sxx <= 0.0 || syy <= 0.0) return s;
  s.rho = sxy / std::sqrt(sxx * syy);
  const double z = s.rho * std::sqrt(static_cast<double>(n) - 1.0);
  s.p_one_sided = 0.5 * std::erfc(z / std::sqrt(2.0));
  return s;
}

ExperimentConfig complex_base() {
  ExperimentConfig cfg;
  cfg.mode = SignalMode::complex_mode;
  cfg.channel_rates = {0.95e9, 1.0e9, 1.05e9};
  cfg.delta_f = 25e6;
  cfg.f_max = 20e9;
  cfg.band_count = 4;
  cfg.trials = 200;
  cfg.seed = 20260810;
  cfg.success_rule = SuccessRule::perfect;
  return cfg;
}

ExperimentConfig real_base() {
  ExperimentConfig cfg;
  cfg.mode = SignalMode::real_mode;
  cfg.channel_rates = {3.8e9, 4.0e9, 4.2e9};
  cfg.delta_f = 25e6;
  cfg.f_max = 40e9;
  cfg.band_count = 4;
  cfg.trials = 200;
  cfg.seed = 31337;
  cfg.success_rule = SuccessRule::perfect;
  return cfg;
}

double interpolate_at(const std::vector<SweepRow>& rows, double ratio,
                      double (*field)(const SweepRow&)) {
  // rows sorted by descending ratio; linear interpolation in ratio
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double r0 = rows[i].ratio, r1 = rows[i + 1].ratio;
    if ((ratio <= r0 && ratio >= r1) || (ratio >= r0 && ratio <= r1)) {
      const double t = (ratio - r0) / (r1 - r0);
      return field(rows[i]) + t * (field(rows[i + 1]) - field(rows[i]));
    }
  }
  return field(rows.back());
}

} // namespace

int main() {
  std::printf("desk-scale acceptance: 25 MHz grid, fixed seeds\n");

  // ---- complex sweep (criteria 1, 3, 8) -------------------------------
  ExperimentConfig ccfg = complex_base();
  // per-band widths 3..9 bins: ratios 10, 7.5, 6, 5, 4.29, 3.75, 3.33
  ccfg.landau_sweep.clear();
  for (int w : {3, 4, 5, 6, 7, 8, 9})
    ccfg.landau_sweep.push_back(4.0 * w * ccfg.delta_f);
  const SweepResult complex_sweep = run_sweep(ccfg);

  for (const auto& r : complex_sweep.rows)
    std::printf("  complex ratio %5.2f: success %5.1f%%  ill-posed %5.1f%%  "
                "ill-posed success %5.1f%%  solver %.1f ms\n",
                r.ratio, 100.0 * r.success_rate, 100.0 * r.ill_posed_rate,
                100.0 * r.ill_posed_success_rate,
                1000.0 * r.mean_solver_seconds);

  {
    bool high_ok = true;
    std::string detail;
    for (const auto& r : complex_sweep.rows)
      if (r.ratio >= 5.0 && r.success_rate < 0.98) high_ok = false;
    const double at353 = interpolate_at(
        complex_sweep.rows, 3.53, [](const SweepRow& r) { return r.success_rate; });
    const bool mid_ok = at353 >= 0.90;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "complex success >= 98%% at ratio >= 5, interpolated "
                  "%.1f%% at ratio 3.53 (>= 90%%)",
                  100.0 * at353);
    report(1, high_ok && mid_ok, buf);
  }

  // ---- real sweep (criterion 2) ---------------------------------------
  ExperimentConfig rcfg = real_base();
  rcfg.landau_sweep.clear();
  for (int w : {3, 4, 5, 6, 7, 8})
    rcfg.landau_sweep.push_back(8.0 * w * rcfg.delta_f);
  const SweepResult real_sweep = run_sweep(rcfg);
  for (const auto& r : real_sweep.rows)
    std::printf("  real    ratio %5.2f: success %5.1f%%  ill-posed %5.1f%%  "
                "solver %.1f ms\n",
                r.ratio, 100.0 * r.success_rate, 100.0 * r.ill_posed_rate,
                1000.0 * r.mean_solver_seconds);
  {
    bool ok = true;
    double worst = 1.0;
    for (const auto& r : real_sweep.rows)
      if (r.ratio >= 8.0) {
        worst = std::min(worst, r.success_rate);
        if (r.success_rate < 0.98) ok = false;
      }
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "real success >= 98%% for ratio >= 8 (worst %.1f%%)",
                  100.0 * worst);
    report(2, ok, buf);
  }

  // ---- ill-posed prevalence (criterion 3) ------------------------------
  {
    long ill = 0, total = 0, ill_succ = 0;
    bool recovered_ok = true;
    for (std::size_t i = 0; i < complex_sweep.rows.size(); ++i) {
      const auto& row = complex_sweep.rows[i];
      if (row.ratio < 4.0 || row.ratio > 10.0) continue;
      for (const auto& t : complex_sweep.trials[i]) {
        ++total;
        if (t.ill_posed) {
          ++ill;
          if (t.success) ++ill_succ;
        }
      }
      if (row.ratio >= 5.0 && row.ill_posed_rate > 0.0 &&
          row.ill_posed_success_rate < 0.95)
        recovered_ok = false;
    }
    const double frac = total > 0 ? static_cast<double>(ill) / total : 0.0;
    const double rec = ill > 0 ? static_cast<double>(ill_succ) / ill : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "ill-posed in %.1f%% of trials for 4 <= ratio <= 10 "
                  "(> 50%%), %.1f%% of them recovered",
                  100.0 * frac, 100.0 * rec);
    report(3, frac > 0.5 && recovered_ok, buf);
  }

  // ---- condition numbers (criterion 4) ---------------------------------
  {
    ExperimentConfig cfg = real_base();
    cfg.landau_sweep = {1.6e9}; // 4 bands of 200 MHz
    cfg.seed = 777;
    const SweepResult sw = run_sweep(cfg);
    double cmax = 0.0;
    std::vector<double> aliased, cond;
    bool all_finite = true;
    for (const auto& t : sw.trials[0]) {
      if (!std::isfinite(t.condition_number)) {
        all_finite = false;
        continue;
      }
      cmax = std::max(cmax, t.condition_number);
      aliased.push_back(static_cast<double>(t.aliased_bin_count));
      cond.push_back(t.condition_number);
    }
    const Spearman s = spearman(aliased, cond);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "real 200 MHz bands: max condition %.2f (<= 10), "
                  "rank corr(aliased, condition) %.2f with p %.2e (< 0.01)",
                  cmax, s.rho, s.p_one_sided);
    report(4, all_finite && cmax <= 10.0 && s.rho > 0.0 && s.p_one_sided < 0.01,
           buf);
  }

  // ---- noisy recovery (criterion 5) -------------------------------------
  {
    ExperimentConfig cfg = real_base();
    cfg.landau_sweep = {1.6e9};
    cfg.trials = 500;
    cfg.seed = 555;
    cfg.noise_sigma = 0.04;
    cfg.success_rule = SuccessRule::per_band_l1;
    cfg.detector.mode = DetectorConfig::Mode::noisy;
    cfg.detector.energy_window = 100e6;
    cfg.detector.widen_fraction = 0.2;
    cfg.solver.subblock_width = 100e6;
    const SweepResult sw = run_sweep(cfg);
    const double failure = 1.0 - sw.rows[0].success_rate;
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "noisy real recovery failure rate %.2f%% (<= 3%%)",
                  100.0 * failure);
    report(5, failure <= 0.03, buf);
  }

  // ---- oracle equivalence (criterion 6) ---------------------------------
  {
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> mpick(3, 9);
    std::uniform_int_distribution<int> width(1, 3);
    std::normal_distribution<double> g(0.0, 1.0);
    int tested = 0, agreed = 0, compared = 0;
    for (int attempt = 0; attempt < 5000 && tested < 100; ++attempt) {
      const int p = 2 + (tested % 2);
      std::vector<ChannelConfig> chans;
      for (int i = 0; i < p; ++i) {
        const int mi = mpick(rng);
        chans.push_back(ChannelConfig{mi, static_cast<double>(mi)});
      }
      const int m = 24;
      if (!check_unique_columns(chans, m).ok) continue;
      SpectrumGrid x = SpectrumGrid::zeros(1.0, m, false);
      std::uniform_int_distribution<int> pos(0, m - 4);
      const int nb = 1 + static_cast<int>(rng() % 2);
      for (int i = 0; i < nb; ++i) {
        const int s = pos(rng);
        const int w = width(rng);
        for (int j = 0; j < w && s + j < m; ++j)
          x.at(s + j) = cdouble{g(rng), g(rng)};
      }

      std::vector<ChannelSamples> samples;
      for (const auto& ch : chans) samples.push_back(fold_spectrum(x, ch));
      const DetectorConfig det;
      std::vector<std::vector<std::uint8_t>> inds;
      for (const auto& s : samples)
        inds.push_back(channel_indicator(s, det, m));
      const SupportMask mask = intersect_indicators(inds, m, false);
      FoldingMatrix fm;
      fm.channels = chans;
      fm.m_total = m;
      const ReducedSystem red = reduce_system(fm, samples, mask, det);
      if (red.empty()) continue;
      const std::vector<Block> blocks = reduced_blocks(mask, red.column_map);
      if (blocks.empty() || blocks.size() > 14) continue;
      ++tested;

      const SolveConfig cfg;
      const SolveOutcome omp = block_omp(red, blocks, cfg);
      if (!omp.converged || omp.posedness != Posedness::well_posed) continue;
      const ref::ExhaustiveResult oracle = ref::min_band_exhaustive(
          red, blocks, cfg.omp_threshold, cfg.rank_tolerance);
      if (oracle.found && !oracle.unique_minimum) continue; // ambiguous data
      ++compared;
      bool match = oracle.found;
      if (match)
        for (int blk : oracle.blocks)
          match = match && std::find(omp.selected_blocks.begin(),
                                     omp.selected_blocks.end(),
                                     blk) != omp.selected_blocks.end();
      if (match) {
        double scale = 1.0;
        for (Eigen::Index i = 0; i < oracle.solution.size(); ++i)
          scale = std::max(scale, std::abs(oracle.solution(i)));
        for (Eigen::Index i = 0; i < oracle.solution.size(); ++i)
          if (std::abs(omp.solution(i) - oracle.solution(i)) > 1e-8 * scale)
            match = false;
      }
      if (match) ++agreed;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "greedy vs exhaustive search: %d/%d successful solves agree "
                  "(over %d instances)",
                  agreed, compared, tested);
    report(6, tested >= 100 && compared > 0 && agreed == compared, buf);
  }

  // ---- invariant suite (criterion 7) -------------------------------------
  {
    bool ok = true;
    std::string why;
    std::mt19937_64 rng(707);

    { // folding linearity
      const ChannelConfig ch{7, 7.0};
      SpectrumGrid x = SpectrumGrid::zeros(1.0, 40, false);
      SpectrumGrid y = x, z = x;
      std::normal_distribution<double> g(0.0, 1.0);
      for (int k = 0; k < 40; ++k) {
        x.at(k) = cdouble{g(rng), g(rng)};
        y.at(k) = cdouble{g(rng), g(rng)};
        z.at(k) = 1.5 * x.at(k) - cdouble{0.0, 2.0} * y.at(k);
      }
      const auto fx = fold_spectrum(x, ch), fy = fold_spectrum(y, ch),
                 fz = fold_spectrum(z, ch);
      for (int k = 0; k < 7; ++k) {
        const cdouble want = 1.5 * fx.at(k) - cdouble{0.0, 2.0} * fy.at(k);
        if (std::abs(fz.at(k) - want) > 1e-12 * std::max(1.0, std::abs(want))) {
          ok = false;
          why = "linearity";
        }
      }
    }
    { // column weight P
      FoldingMatrix fm;
      fm.channels = {{38, 38.0}, {40, 40.0}, {42, 42.0}};
      fm.m_total = 800;
      const Eigen::MatrixXd a = dense(fm);
      for (int l = 0; l < 800 && ok; ++l)
        if ((a.col(l).array() != 0.0).count() != 3) {
          ok = false;
          why = "column weight";
        }
    }
    { // indicator periodicity
      const SpectrumGrid x = [&] {
        SpectrumGrid t = SpectrumGrid::zeros(1.0, 100, false);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int k = 11; k < 19; ++k) t.at(k) = cdouble{g(rng), g(rng)};
        return t;
      }();
      const ChannelConfig ch{9, 9.0};
      const auto ind = channel_indicator(fold_spectrum(x, ch), DetectorConfig{}, 100);
      for (int l = 0; l + 9 < 100 && ok; ++l)
        if (ind[static_cast<std::size_t>(l)] !=
            ind[static_cast<std::size_t>(l + 9)]) {
          ok = false;
          why = "indicator periodicity";
        }
    }
    { // conjugate symmetry through the real pipeline
      ExperimentConfig cfg = real_base();
      cfg.trials = 3;
      cfg.landau_sweep = {1.6e9};
      const SweepResult sw = run_sweep(cfg);
      (void)sw;
      std::mt19937_64 r2(1);
      const GeneratedSignal gsig = generate_real_signal(cfg, 8, r2);
      if (!gsig.spectrum.conjugate_symmetric(0.0)) {
        ok = false;
        why = "conjugate symmetry";
      }
    }
    { // lcm uniqueness checker, quoted production value
      const double df = 5e6;
      const auto v = check_unique_columns(
          {{190, 190 * df}, {200, 200 * df}, {210, 210 * df}}, 4000);
      if (!v.ok || v.max_supported_bins != 79800ull ||
          std::abs(v.max_supported_hz - 399e9) > 1.0) {
        ok = false;
        why = "lcm checker";
      }
    }
    { // greedy residual monotonicity
      std::normal_distribution<double> g(0.0, 1.0);
      for (int rep = 0; rep < 10 && ok; ++rep) {
        SpectrumGrid x = SpectrumGrid::zeros(1.0, 24, false);
        std::uniform_int_distribution<int> pos(0, 23);
        for (int i = 0; i < 6; ++i) x.at(pos(rng)) = cdouble{g(rng), g(rng)};
        const std::vector<ChannelConfig> chans{{4, 4.0}, {6, 6.0}};
        std::vector<ChannelSamples> samples;
        for (const auto& ch : chans) samples.push_back(fold_spectrum(x, ch));
        const DetectorConfig det;
        std::vector<std::vector<std::uint8_t>> inds;
        for (const auto& s : samples)
          inds.push_back(channel_indicator(s, det, 24));
        const SupportMask mask = intersect_indicators(inds, 24, false);
        FoldingMatrix fm;
        fm.channels = chans;
        fm.m_total = 24;
        const ReducedSystem red = reduce_system(fm, samples, mask, det);
        if (red.empty()) continue;
        const auto blocks = reduced_blocks(mask, red.column_map);
        if (blocks.empty()) continue;
        const SolveOutcome out = block_omp(red, blocks, SolveConfig{});
        for (std::size_t i = 1; i < out.residual_history.size(); ++i)
          if (out.residual_history[i] >
              out.residual_history[i - 1] * (1.0 + 1e-9)) {
            ok = false;
            why = "residual monotonicity";
          }
      }
    }
    { // reproducibility under a fixed seed
      ExperimentConfig cfg = complex_base();
      cfg.trials = 10;
      cfg.landau_sweep = {0.6e9};
      const SweepResult a = run_sweep(cfg);
      const SweepResult b = run_sweep(cfg);
      if (results_csv(a, false) != results_csv(b, false)) {
        ok = false;
        why = "reproducibility";
      }
    }
    report(7, ok,
           ok ? "invariant suite (linearity, column weight, periodicity, "
                "symmetry, lcm 399 GHz, monotonicity, reproducibility)"
              : "invariant suite failed at: " + why);
  }

  // ---- runtime trend (criterion 8) ---------------------------------------
  {
    std::vector<double> ratio, runtime;
    for (const auto& r : complex_sweep.rows) {
      ratio.push_back(r.ratio);
      runtime.push_back(r.mean_solver_seconds);
    }
    const Spearman s = spearman(ratio, runtime);
    char buf[140];
    std::snprintf(buf, sizeof buf,
                  "mean solver runtime falls as the ratio rises "
                  "(rank corr %.2f < 0)",
                  s.rho);
    report(8, s.rho < 0.0, buf);
  }

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
