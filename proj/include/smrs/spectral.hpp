#pragma once

#include <Eigen/Dense>

#include "smrs/types.hpp"

namespace smrs {

/// Folds a spectrum into one channel baseband:
/// baseband[k] = rate * sum of X[l] over all grid bins l ≡ k (mod m_i).
/// Replicas are summed in ascending order so results are reproducible.
/// Throws std::invalid_argument for an odd m_i on a signed grid.
ChannelSamples fold_spectrum(const SpectrumGrid& signal,
                             const ChannelConfig& channel);

/// Single-channel aliasing matrix block (implicit representation).
FoldingMatrix build_channel_matrix(const ChannelConfig& channel, int m_total,
                                   bool signed_grid = false);

struct ConcatenatedSystem {
  FoldingMatrix matrix;
  std::vector<cdouble> stacked; // basebands stacked in channel order
};

/// Stacks per-channel blocks and sample vectors into one linear system.
/// Throws std::invalid_argument on any dimension mismatch.
ConcatenatedSystem concatenate_system(const std::vector<FoldingMatrix>& blocks,
                                      const std::vector<ChannelSamples>& samples);

/// Column-uniqueness check: all columns of the concatenated matrix are
/// pairwise distinct iff m_total < lcm(m_1, ..., m_P).
struct UniquenessVerdict {
  bool ok = false;
  unsigned long long max_supported_bins = 0; // lcm of the m_i (saturating)
  double max_supported_hz = 0.0;             // lcm * delta_f
};

UniquenessVerdict check_unique_columns(const std::vector<ChannelConfig>& channels,
                                       int m_total);

/// Dense materialization honoring retained_columns. Intended for small
/// systems and tests.
Eigen::MatrixXd dense(const FoldingMatrix& fm);

/// Applies the implicit matrix to a spectrum (stacked matrix-vector product).
std::vector<cdouble> apply(const FoldingMatrix& fm, const SpectrumGrid& x);

} // namespace smrs
