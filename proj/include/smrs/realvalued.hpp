#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "smrs/solver.hpp"
#include "smrs/support.hpp"
#include "smrs/types.hpp"

namespace smrs {

/// Split of a signed-grid system into independent real-part and
/// imaginary-part systems over the positive-frequency unknowns.
///
/// With conjugate symmetry X[-p] = conj(X[p]), a baseband row k of channel i
/// reads sum_l A[k,l] X[l]; collecting mirrored columns gives, for p >= 1,
///   real coefficient = A[k, p] + A[k, -p]
///   imag coefficient = A[k, p] - A[k, -p]
/// and the DC column (p = 0, its own mirror) enters the real system once and
/// the imaginary system not at all. Only rows k >= 0 are retained; the
/// conjugate-symmetric baseband carries no further information.
struct RealSplitSystem {
  std::vector<ChannelConfig> channels;
  int m_total = 0;                     // signed-grid bin count
  std::vector<ChannelSamples> samples; // originals, for row elimination
  Eigen::VectorXd rhs_real;            // Re of positive-frequency baseband
  Eigen::VectorXd rhs_imag;            // Im of positive-frequency baseband
  /// row -> (channel index, baseband bin k >= 0)
  std::vector<std::pair<int, int>> row_map;

  int half() const { return m_total / 2; }

  /// Dense real/imag matrices on the given positive bins and rows
  /// (row indices into row_map).
  Eigen::MatrixXd materialize(const std::vector<int>& positive_bins,
                              const std::vector<int>& rows, bool imag) const;
};

/// Builds the split from a signed-grid folding matrix and its samples.
/// Throws std::invalid_argument when a channel m_i is odd or the grid is not
/// signed.
RealSplitSystem build_real_split(const FoldingMatrix& full,
                                 const std::vector<ChannelSamples>& samples);

struct RealSolveResult {
  SpectrumGrid spectrum;  // conjugate symmetric by construction
  SolveOutcome real_part; // diagnostics of the real-part system
  SolveOutcome imag_part;
  double condition_number = 0.0; // max over the two systems
  bool ill_posed = false;        // either system classified ill posed
  bool no_signal = false;
};

/// Reduces both split systems by the (signed, conjugate-symmetric) mask and
/// solves each independently, directly when well posed and by the greedy
/// block solver otherwise. Reassembles X[p] = xr[p] + j*xim[p] and mirrors
/// the conjugate onto negative bins.
RealSolveResult solve_real(const RealSplitSystem& system,
                           const SupportMask& mask, const DetectorConfig& det,
                           const SolveConfig& cfg);

} // namespace smrs
