#pragma once

#include <Eigen/Dense>
#include <utility>

#include "smrs/types.hpp"

namespace smrs {

/// Support-detector settings.
struct DetectorConfig {
  enum class Mode { noiseless, noisy };
  Mode mode = Mode::noiseless;

  /// Width of the local average-energy window, in the same frequency units
  /// as the grid (noisy mode).
  double energy_window = 0.0;
  /// Absolute energy level; 0 selects the data-driven estimate
  /// auto_threshold_factor * sigma2, with sigma2 taken from the lowest-decile
  /// window energies.
  double energy_threshold = 0.0;
  double auto_threshold_factor = 3.0;
  /// Per-side band widening applied to the intersected mask (noisy mode).
  double widen_fraction = 0.0;
  /// Relative magnitude tolerance of the noiseless zero test.
  double zero_tol = 1e-12;
};

/// Per-baseband-bin indicator: true where the channel carries energy.
/// Noiseless mode flags |X| > zero_tol * max|X|; noisy mode thresholds the
/// local average energy.
std::vector<std::uint8_t> baseband_indicator(const ChannelSamples& samples,
                                             const DetectorConfig& cfg);

/// Periodic extension of the baseband indicator over the full grid.
std::vector<std::uint8_t> channel_indicator(const ChannelSamples& samples,
                                            const DetectorConfig& cfg,
                                            int m_total);

/// Pointwise AND of per-channel indicators; recomputes blocks.
SupportMask intersect_indicators(
    const std::vector<std::vector<std::uint8_t>>& per_channel, int m_total,
    bool signed_grid);

/// Grows every block by round(widen_fraction * length) bins per side,
/// clipped to the grid; overlapping blocks merge.
SupportMask widen_mask(const SupportMask& mask, double widen_fraction);

/// Dense linear system after column and row elimination.
struct ReducedSystem {
  FoldingMatrix pattern;  // channels plus retained columns
  Eigen::MatrixXd matrix; // kept rows x kept columns
  Eigen::VectorXcd rhs;
  std::vector<int> column_map; // reduced column -> grid storage index
  /// reduced row -> (channel index, baseband storage index)
  std::vector<std::pair<int, int>> row_map;
  /// Masked columns with no surviving row (possible only after widening);
  /// their coefficients are fixed to zero.
  std::vector<int> forced_zero_columns;
  /// Rows above threshold that lost all their columns (noisy mode only).
  int dropped_inconsistent_rows = 0;

  int rows() const { return static_cast<int>(row_map.size()); }
  int cols() const { return static_cast<int>(column_map.size()); }
  bool empty() const { return column_map.empty(); }
};

/// Retains the masked columns, then drops rows whose baseband bin is flagged
/// zero by the channel indicator. An empty mask yields an empty system
/// (no signal detected).
ReducedSystem reduce_system(const FoldingMatrix& full,
                            const std::vector<ChannelSamples>& samples,
                            const SupportMask& mask,
                            const DetectorConfig& det);

/// Maps mask blocks to column ranges of the reduced system. Blocks that lost
/// every column are skipped.
std::vector<Block> reduced_blocks(const SupportMask& mask,
                                  const std::vector<int>& column_map);

/// Splits blocks into chunks of at most max_len columns (noisy mode).
std::vector<Block> split_blocks(const std::vector<Block>& blocks, int max_len);

} // namespace smrs
