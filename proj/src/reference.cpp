#include "smrs/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smrs/solver.hpp"

namespace smrs::ref {

ChannelSamples fold_spectrum(const SpectrumGrid& signal,
                             const ChannelConfig& channel) {
  if (channel.m_i < 1) throw std::invalid_argument("channel m_i must be >= 1");
  if (signal.signed_grid && channel.m_i % 2 != 0)
    throw std::invalid_argument("signed-grid channels need an even m_i");

  ChannelSamples out;
  out.config = channel;
  out.signed_grid = signal.signed_grid;
  out.baseband.assign(static_cast<std::size_t>(out.storage_size()),
                      cdouble{0.0, 0.0});
  const int m_i = channel.m_i;

  // Scatter every grid bin into its congruent baseband bin.
  for (int l = signal.lo(); l <= signal.hi(); ++l) {
    const cdouble v = signal.at(l);
    if (!signal.signed_grid) {
      out.at(((l % m_i) + m_i) % m_i) += v;
    } else {
      const int h_i = m_i / 2;
      int k = ((l % m_i) + m_i) % m_i;
      if (k > h_i) k -= m_i;
      out.at(k) += v;
      if (k == -h_i) out.at(h_i) += v; // both edge bins carry the class
      if (k == h_i) out.at(-h_i) += v;
    }
  }
  for (auto& v : out.baseband) v *= channel.rate;
  return out;
}

Eigen::MatrixXd dense_channel_matrix(const ChannelConfig& channel, int m_total,
                                     bool signed_grid) {
  const int m_i = channel.m_i;
  const int h = m_total / 2;
  const int glo = signed_grid ? -h : 0;
  const int ghi = signed_grid ? h : m_total - 1;
  const int klo = signed_grid ? -m_i / 2 : 0;
  const int khi = signed_grid ? m_i / 2 : m_i - 1;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(khi - klo + 1, ghi - glo + 1);
  // Literal replica sum: entry = rate * sum_n delta[l - (k + n*m_i)].
  const int nmax = (ghi - glo) / m_i + 2;
  for (int k = klo; k <= khi; ++k)
    for (int l = glo; l <= ghi; ++l) {
      double acc = 0.0;
      for (int n = -nmax; n <= nmax; ++n)
        if (l - (k + n * m_i) == 0) acc += 1.0;
      a(k - klo, l - glo) = channel.rate * acc;
    }
  return a;
}

int aliased_bin_count(const BandSupport& support,
                      const std::vector<ChannelConfig>& channels,
                      const SpectrumGrid& grid) {
  std::vector<int> bins;
  for (const auto& b : support.bands)
    for (int i = 0; i < b.length; ++i) bins.push_back(b.first + i + grid.lo());
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());

  int aliased = 0;
  for (int l : bins) {
    bool everywhere = true;
    for (const auto& ch : channels) {
      bool collides = false;
      for (int l2 : bins)
        if (l2 != l && ((l2 - l) % ch.m_i) == 0) {
          collides = true;
          break;
        }
      if (!collides) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) ++aliased;
  }
  return aliased;
}

ExhaustiveResult min_band_exhaustive(const ReducedSystem& system,
                                     const std::vector<Block>& blocks,
                                     double eps, double rank_tol) {
  const int j = static_cast<int>(blocks.size());
  if (j > 20) throw std::invalid_argument("too many blocks to enumerate");

  Eigen::MatrixXd b(system.rhs.size(), 2);
  b.col(0) = system.rhs.real();
  b.col(1) = system.rhs.imag();

  // A qualifying subset explains the data at full column rank; a rank
  // deficient one has no unique coefficient vector and is no reconstruction.
  auto evaluate = [&](unsigned subset, std::vector<int>& chosen,
                      std::vector<int>& cols, detail::LstsqResult& ls) {
    chosen.clear();
    cols.clear();
    for (int i = 0; i < j; ++i)
      if (subset & (1u << i)) {
        chosen.push_back(i);
        for (int c = 0; c < blocks[static_cast<std::size_t>(i)].length; ++c)
          cols.push_back(blocks[static_cast<std::size_t>(i)].first + c);
      }
    std::sort(cols.begin(), cols.end());
    Eigen::MatrixXd a(system.matrix.rows(),
                      static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
      a.col(static_cast<Eigen::Index>(i)) = system.matrix.col(cols[i]);
    ls = detail::lstsq_svd(a, b, rank_tol);
    return ls.residual_sq <= eps &&
           ls.rank == static_cast<int>(cols.size());
  };

  ExhaustiveResult best;
  int best_count = j + 1;
  std::vector<int> chosen, cols;
  detail::LstsqResult ls;
  for (unsigned subset = 1; subset < (1u << j); ++subset) {
    const int count = __builtin_popcount(subset);
    if (count > best_count) continue;
    if (!evaluate(subset, chosen, cols, ls)) continue;
    const bool better =
        count < best_count || (count == best_count && chosen < best.blocks);
    if (count == best_count) best.unique_minimum = false;
    if (!better) continue;
    if (count < best_count) best.unique_minimum = true;
    best_count = count;
    best.found = true;
    best.blocks = chosen;
    best.residual_sq = ls.residual_sq;
    best.solution = Eigen::VectorXcd::Zero(system.cols());
    for (std::size_t i = 0; i < cols.size(); ++i)
      best.solution(cols[i]) =
          cdouble{ls.x(static_cast<Eigen::Index>(i), 0),
                  ls.x(static_cast<Eigen::Index>(i), 1)};
  }
  return best;
}

} // namespace smrs::ref
