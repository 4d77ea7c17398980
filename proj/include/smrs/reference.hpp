#pragma once

#include <Eigen/Dense>

#include "smrs/harness.hpp"
#include "smrs/support.hpp"
#include "smrs/types.hpp"

// Serial reference implementations, deliberately written from the defining
// formulas with different loop structure than the production kernels. Tests
// check the production paths against these; the benchmark compares speed.
namespace smrs::ref {

/// Serial fold: scatters every grid bin into its congruent baseband bin.
ChannelSamples fold_spectrum(const SpectrumGrid& signal,
                             const ChannelConfig& channel);

/// Dense single-channel matrix built from the literal replica sum
/// sum_n delta[l - (k + n*m_i)].
Eigen::MatrixXd dense_channel_matrix(const ChannelConfig& channel, int m_total,
                                     bool signed_grid = false);

/// Brute-force count of support bins aliased in every channel.
int aliased_bin_count(const BandSupport& support,
                      const std::vector<ChannelConfig>& channels,
                      const SpectrumGrid& grid);

/// Exhaustive minimum-band search over block subsets (the combinatorial
/// reference the greedy solver approximates). Finds the smallest subset whose
/// full-column-rank columns reach residual_sq <= eps; ties resolve to the
/// lexicographically smallest block set. unique_minimum is false when several
/// subsets of the minimal size qualify, in which case the reconstruction is
/// ambiguous and no solver can be held to one answer.
struct ExhaustiveResult {
  bool found = false;
  bool unique_minimum = false;
  std::vector<int> blocks; // sorted block indices
  Eigen::VectorXcd solution;
  double residual_sq = 0.0;
};

ExhaustiveResult min_band_exhaustive(const ReducedSystem& system,
                                     const std::vector<Block>& blocks,
                                     double eps, double rank_tol);

} // namespace smrs::ref
