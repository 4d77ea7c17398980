#include "smrs/support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace smrs {

namespace {

// Centered (odd) window length in bins.
int window_length(const ChannelSamples& s, const DetectorConfig& cfg) {
  int w = 1;
  if (cfg.energy_window > 0.0)
    w = std::max(1, static_cast<int>(std::lround(cfg.energy_window /
                                                 s.config.delta_f())));
  return 2 * (w / 2) + 1;
}

// Window-averaged |X|^2 over one baseband period, circular.
std::vector<double> window_energies(const ChannelSamples& s,
                                    const DetectorConfig& cfg) {
  const int m_i = s.config.m_i;
  std::vector<double> e2(static_cast<std::size_t>(m_i), 0.0);
  for (int j = 0; j < m_i; ++j) {
    const cdouble v = s.baseband[static_cast<std::size_t>(j)];
    e2[static_cast<std::size_t>(j)] = std::norm(v);
  }
  const int hw = window_length(s, cfg) / 2;
  std::vector<double> avg(static_cast<std::size_t>(m_i), 0.0);
  for (int j = 0; j < m_i; ++j) {
    double acc = 0.0;
    for (int d = -hw; d <= hw; ++d) {
      const int q = ((j + d) % m_i + m_i) % m_i;
      acc += e2[static_cast<std::size_t>(q)];
    }
    avg[static_cast<std::size_t>(j)] = acc / (2 * hw + 1);
  }
  return avg;
}

// Estimates the noise floor from the lowest-decile window energy. A window
// average of w exponential bins is Gamma(w)-distributed, so the observed
// 10th percentile divided by the Wilson-Hilferty quantile approximation of
// Gamma(w, 1)/w recovers the per-bin noise energy.
double auto_threshold(std::vector<double> energies, int window_bins,
                      double factor) {
  std::sort(energies.begin(), energies.end());
  const std::size_t n = energies.size();
  const double eq = energies[std::min(n - 1, n / 10)];
  const double a = static_cast<double>(window_bins);
  const double z10 = -1.2815515655446004; // standard normal 10th percentile
  const double t = 1.0 - 1.0 / (9.0 * a) + z10 / (3.0 * std::sqrt(a));
  const double gamma_q10 = a * t * t * t; // Gamma(a,1) quantile at 0.1
  const double noise_floor = eq * a / std::max(gamma_q10, 1e-12);
  return factor * noise_floor;
}

} // namespace

std::vector<std::uint8_t> baseband_indicator(const ChannelSamples& samples,
                                             const DetectorConfig& cfg) {
  const int m_i = samples.config.m_i;
  const int size = samples.storage_size();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(size), 0);

  if (cfg.mode == DetectorConfig::Mode::noiseless) {
    double maxmag = 0.0;
    for (const auto& v : samples.baseband)
      maxmag = std::max(maxmag, std::abs(v));
    const double thr = cfg.zero_tol * maxmag;
    for (int i = 0; i < size; ++i)
      out[static_cast<std::size_t>(i)] =
          std::abs(samples.baseband[static_cast<std::size_t>(i)]) > thr ? 1 : 0;
    return out;
  }

  // Noisy mode works on one period: for signed basebands index j corresponds
  // to k = j - m_i/2 and the duplicated edge bin k = +m_i/2 reuses j = 0.
  ChannelSamples period = samples;
  if (samples.signed_grid) {
    period.baseband.assign(samples.baseband.begin(),
                           samples.baseband.begin() + m_i);
  }
  const std::vector<double> e = window_energies(period, cfg);
  const double thr = cfg.energy_threshold > 0.0
                         ? cfg.energy_threshold
                         : auto_threshold(e, window_length(period, cfg),
                                          cfg.auto_threshold_factor);
  for (int i = 0; i < size; ++i) {
    const int j = i % m_i;
    out[static_cast<std::size_t>(i)] =
        e[static_cast<std::size_t>(j)] > thr ? 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> channel_indicator(const ChannelSamples& samples,
                                            const DetectorConfig& cfg,
                                            int m_total) {
  const std::vector<std::uint8_t> base = baseband_indicator(samples, cfg);
  const int m_i = samples.config.m_i;

  if (!samples.signed_grid) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(m_total), 0);
    for (int l = 0; l < m_total; ++l)
      out[static_cast<std::size_t>(l)] = base[static_cast<std::size_t>(l % m_i)];
    return out;
  }

  const int h = m_total / 2;
  const int h_i = m_i / 2;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(2 * h + 1), 0);
  for (int idx = 0; idx <= 2 * h; ++idx) {
    const int l = idx - h;
    // congruent baseband slot, expressed as an index into base
    const int j = ((l + h_i) % m_i + m_i) % m_i;
    out[static_cast<std::size_t>(idx)] = base[static_cast<std::size_t>(j)];
  }
  return out;
}

SupportMask intersect_indicators(
    const std::vector<std::vector<std::uint8_t>>& per_channel, int m_total,
    bool signed_grid) {
  if (per_channel.empty()) throw std::invalid_argument("no indicators");
  const std::size_t n = per_channel.front().size();
  for (const auto& v : per_channel)
    if (v.size() != n) throw std::invalid_argument("indicator length mismatch");

  SupportMask m;
  m.m_total = m_total;
  m.signed_grid = signed_grid;
  if (static_cast<int>(n) != m.storage_size())
    throw std::invalid_argument("indicator length does not match the grid");
  m.mask.assign(n, 1);
  for (const auto& v : per_channel)
    for (std::size_t i = 0; i < n; ++i)
      m.mask[i] = static_cast<std::uint8_t>(m.mask[i] & v[i]);
  m.recompute_blocks();
  return m;
}

SupportMask widen_mask(const SupportMask& mask, double widen_fraction) {
  if (widen_fraction < 0.0)
    throw std::invalid_argument("widen_fraction must be >= 0");
  SupportMask out = mask;
  if (widen_fraction == 0.0) return out;
  std::fill(out.mask.begin(), out.mask.end(), 0);
  const int n = static_cast<int>(out.mask.size());
  for (const auto& b : mask.blocks) {
    const int w = static_cast<int>(std::lround(widen_fraction * b.length));
    const int first = std::max(0, b.first - w);
    const int last = std::min(n - 1, b.first + b.length - 1 + w);
    for (int i = first; i <= last; ++i) out.mask[static_cast<std::size_t>(i)] = 1;
  }
  out.recompute_blocks();
  return out;
}

ReducedSystem reduce_system(const FoldingMatrix& full,
                            const std::vector<ChannelSamples>& samples,
                            const SupportMask& mask,
                            const DetectorConfig& det) {
  if (static_cast<int>(mask.mask.size()) != full.grid_storage_size())
    throw std::invalid_argument("mask length does not match the grid");
  if (samples.size() != full.channels.size())
    throw std::invalid_argument("one sample vector per channel required");

  const int p = static_cast<int>(full.channels.size());
  const int glo = full.grid_lo();

  // Column candidates from the mask.
  std::vector<int> cand;
  for (int i = 0; i < static_cast<int>(mask.mask.size()); ++i)
    if (mask.mask[static_cast<std::size_t>(i)]) cand.push_back(i);

  ReducedSystem sys;
  sys.pattern = full;
  if (cand.empty()) return sys; // no signal detected

  // Row retention from the per-channel baseband indicators.
  std::vector<std::vector<std::uint8_t>> keep_row(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    keep_row[static_cast<std::size_t>(i)] = baseband_indicator(samples[static_cast<std::size_t>(i)], det);

  auto class_of = [&](int storage, const ChannelSamples& s) {
    const int l = storage + glo;
    const int m_i = s.config.m_i;
    if (!s.signed_grid) return ((l % m_i) + m_i) % m_i;
    const int h_i = m_i / 2;
    return ((l + h_i) % m_i + m_i) % m_i; // index into baseband storage
  };

  if (det.mode == DetectorConfig::Mode::noisy) {
    // Widening can resurrect columns whose every congruent row fell below
    // the threshold; with no surviving row they are pinned to zero instead
    // of entering the matrix as null columns.
    for (int c : cand) {
      bool alive = false;
      for (int i = 0; i < p && !alive; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const int j = class_of(c, s);
        if (keep_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
          alive = true;
      }
      if (alive)
        sys.column_map.push_back(c);
      else
        sys.forced_zero_columns.push_back(c);
    }
  } else {
    sys.column_map = cand;
  }
  if (sys.column_map.empty()) return sys;

  // Kept rows that still touch a retained column.
  std::vector<std::vector<std::uint8_t>> class_used(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    class_used[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(full.channels[static_cast<std::size_t>(i)].m_i), 0);
  for (int c : sys.column_map)
    for (int i = 0; i < p; ++i) {
      const auto& s = samples[static_cast<std::size_t>(i)];
      const int j = class_of(c, s) % s.config.m_i;
      class_used[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    }

  for (int i = 0; i < p; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    for (int j = 0; j < s.storage_size(); ++j) {
      if (!keep_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
        continue;
      const int cls = j % s.config.m_i;
      if (!class_used[static_cast<std::size_t>(i)][static_cast<std::size_t>(cls)]) {
        ++sys.dropped_inconsistent_rows;
        continue;
      }
      sys.row_map.emplace_back(i, j);
    }
  }

  // Materialize.
  const int nrows = sys.rows();
  const int ncols = sys.cols();
  sys.matrix = Eigen::MatrixXd::Zero(nrows, ncols);
  sys.rhs = Eigen::VectorXcd::Zero(nrows);
  for (int r = 0; r < nrows; ++r) {
    const auto [ci, j] = sys.row_map[static_cast<std::size_t>(r)];
    const auto& s = samples[static_cast<std::size_t>(ci)];
    const int k = j + s.lo();
    const int m_i = s.config.m_i;
    sys.rhs(r) = s.baseband[static_cast<std::size_t>(j)];
    for (int c = 0; c < ncols; ++c) {
      const int l = sys.column_map[static_cast<std::size_t>(c)] + glo;
      if (((l - k) % m_i + m_i) % m_i == 0) sys.matrix(r, c) = s.config.rate;
    }
  }
  sys.pattern.retained_columns = sys.column_map;
  return sys;
}

std::vector<Block> reduced_blocks(const SupportMask& mask,
                                  const std::vector<int>& column_map) {
  std::vector<Block> out;
  for (const auto& b : mask.blocks) {
    const auto lo = std::lower_bound(column_map.begin(), column_map.end(),
                                     b.first);
    const auto hi = std::lower_bound(column_map.begin(), column_map.end(),
                                     b.first + b.length);
    const int len = static_cast<int>(hi - lo);
    if (len > 0)
      out.push_back(Block{static_cast<int>(lo - column_map.begin()), len});
  }
  return out;
}

std::vector<Block> split_blocks(const std::vector<Block>& blocks,
                                int max_len) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  std::vector<Block> out;
  for (const auto& b : blocks) {
    int off = 0;
    while (off < b.length) {
      const int len = std::min(max_len, b.length - off);
      out.push_back(Block{b.first + off, len});
      off += len;
    }
  }
  return out;
}

} // namespace smrs
