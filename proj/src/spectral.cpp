#include "smrs/spectral.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace smrs {

namespace {

void validate_channel(const ChannelConfig& channel, bool signed_grid) {
  if (channel.m_i < 1)
    throw std::invalid_argument("channel m_i must be >= 1");
  if (signed_grid && channel.m_i % 2 != 0)
    throw std::invalid_argument("signed-grid channels need an even m_i");
}

int floor_div(int a, int b) {
  int q = a / b;
  if (a % b != 0 && (a < 0) != (b < 0)) --q;
  return q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

} // namespace

ChannelSamples fold_spectrum(const SpectrumGrid& signal,
                             const ChannelConfig& channel) {
  validate_channel(channel, signal.signed_grid);
  if (signal.m_total < 1) throw std::invalid_argument("empty signal grid");

  ChannelSamples out;
  out.config = channel;
  out.signed_grid = signal.signed_grid;
  out.baseband.assign(static_cast<std::size_t>(out.storage_size()),
                      cdouble{0.0, 0.0});

  const int m_i = channel.m_i;
  const double rate = channel.rate;

  if (!signal.signed_grid) {
    const int m = signal.m_total;
    const int nbins = std::min(m_i, m); // grid may be shorter than one period
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nbins; ++k) {
      cdouble acc{0.0, 0.0};
      for (int l = k; l < m; l += m_i) acc += signal.at(l);
      out.at(k) = rate * acc;
    }
  } else {
    const int h = signal.half();
    const int hi_ch = m_i / 2;
#pragma omp parallel for schedule(static)
    for (int idx = 0; idx <= 2 * hi_ch; ++idx) {
      const int k = idx - hi_ch;
      // first replica >= -h, then ascend
      const int n0 = ceil_div(-h - k, m_i);
      cdouble acc{0.0, 0.0};
      for (int l = k + n0 * m_i; l <= h; l += m_i) acc += signal.at(l);
      out.at(k) = rate * acc;
    }
  }
  return out;
}

FoldingMatrix build_channel_matrix(const ChannelConfig& channel, int m_total,
                                   bool signed_grid) {
  validate_channel(channel, signed_grid);
  if (m_total < 1) throw std::invalid_argument("m_total must be >= 1");
  FoldingMatrix fm;
  fm.channels = {channel};
  fm.m_total = m_total;
  fm.signed_grid = signed_grid;
  return fm;
}

ConcatenatedSystem concatenate_system(
    const std::vector<FoldingMatrix>& blocks,
    const std::vector<ChannelSamples>& samples) {
  if (blocks.empty()) throw std::invalid_argument("no blocks to concatenate");

  ConcatenatedSystem sys;
  sys.matrix.m_total = blocks.front().m_total;
  sys.matrix.signed_grid = blocks.front().signed_grid;

  std::size_t sample_idx = 0;
  for (const auto& b : blocks) {
    if (b.m_total != sys.matrix.m_total ||
        b.signed_grid != sys.matrix.signed_grid)
      throw std::invalid_argument("blocks disagree on the grid");
    if (!b.retained_columns.empty())
      throw std::invalid_argument("cannot concatenate reduced blocks");
    for (const auto& ch : b.channels) {
      if (sample_idx >= samples.size())
        throw std::invalid_argument("fewer sample vectors than channels");
      const auto& s = samples[sample_idx++];
      if (s.config.m_i != ch.m_i || s.signed_grid != sys.matrix.signed_grid ||
          static_cast<int>(s.baseband.size()) != s.storage_size())
        throw std::invalid_argument("sample vector does not match its channel");
      sys.matrix.channels.push_back(ch);
      sys.stacked.insert(sys.stacked.end(), s.baseband.begin(),
                         s.baseband.end());
    }
  }
  if (sample_idx != samples.size())
    throw std::invalid_argument("more sample vectors than channels");
  return sys;
}

UniquenessVerdict check_unique_columns(
    const std::vector<ChannelConfig>& channels, int m_total) {
  if (channels.empty()) throw std::invalid_argument("no channels");
  constexpr unsigned long long kSaturate = 1ull << 62;
  unsigned long long l = 1;
  for (const auto& c : channels) {
    const unsigned long long m = static_cast<unsigned long long>(c.m_i);
    const unsigned long long g = std::gcd(l, m);
    if (l / g > kSaturate / m) {
      l = kSaturate;
      break;
    }
    l = l / g * m;
  }
  UniquenessVerdict v;
  v.max_supported_bins = l;
  v.max_supported_hz = static_cast<double>(l) * channels.front().delta_f();
  v.ok = static_cast<unsigned long long>(m_total) < l;
  return v;
}

Eigen::MatrixXd dense(const FoldingMatrix& fm) {
  std::vector<int> cols = fm.retained_columns;
  if (cols.empty()) {
    cols.resize(static_cast<std::size_t>(fm.grid_storage_size()));
    std::iota(cols.begin(), cols.end(), 0);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(fm.rows(), static_cast<int>(cols.size()));
  const int glo = fm.grid_lo();
  int row0 = 0;
  for (const auto& ch : fm.channels) {
    const int m_i = ch.m_i;
    const int ch_lo = fm.signed_grid ? -m_i / 2 : 0;
    const int ch_rows = fm.signed_grid ? m_i + 1 : m_i;
    for (int r = 0; r < ch_rows; ++r) {
      const int k = r + ch_lo;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const int l = cols[c] + glo;
        if (((l - k) % m_i + m_i) % m_i == 0)
          a(row0 + r, static_cast<int>(c)) = ch.rate;
      }
    }
    row0 += ch_rows;
  }
  return a;
}

std::vector<cdouble> apply(const FoldingMatrix& fm, const SpectrumGrid& x) {
  if (!fm.retained_columns.empty())
    throw std::invalid_argument("apply expects the full column set");
  if (x.m_total != fm.m_total || x.signed_grid != fm.signed_grid)
    throw std::invalid_argument("grid does not match the matrix");
  std::vector<cdouble> out;
  for (const auto& ch : fm.channels) {
    const ChannelSamples s = fold_spectrum(x, ch);
    out.insert(out.end(), s.baseband.begin(), s.baseband.end());
  }
  return out;
}

} // namespace smrs
