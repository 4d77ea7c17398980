#pragma once

#include <Eigen/Dense>
#include <vector>

#include "smrs/support.hpp"
#include "smrs/types.hpp"

namespace smrs {

struct SolveConfig {
  /// Relative singular-value cutoff for numerical rank.
  double rank_tolerance = 1e-10;
  /// Residual-energy stop of the greedy block solver (noiseless).
  double omp_threshold = 1e-20;
  /// Noisy mode stops when the best block would make the selected matrix
  /// rank deficient; omp_threshold is kept as a secondary early exit.
  bool noisy_mode = false;
  /// Spectral width of the sub-blocks the harness splits candidate bands
  /// into before the greedy solve (noisy mode), grid frequency units.
  double subblock_width = 0.0;
};

enum class Posedness { well_posed, ill_posed };

struct SolveOutcome {
  Eigen::VectorXcd solution; // one coefficient per retained column
  Posedness posedness = Posedness::well_posed;
  std::vector<int> selected_blocks; // in selection order; empty for direct
  double residual_norm = 0.0;
  double condition_number = 0.0; // of the final solved matrix
  int iterations = 0;
  bool converged = true;
  std::vector<double> residual_history; // squared residual per iteration
};

/// well_posed iff the count of singular values above
/// rank_tolerance * sigma_max equals the column count.
Posedness classify_posedness(const ReducedSystem& system,
                             const SolveConfig& cfg);

/// Minimum-residual solution through the pseudo-inverse (rank-revealing SVD).
/// Throws std::invalid_argument on a zero-column system.
SolveOutcome solve_direct(const ReducedSystem& system, const SolveConfig& cfg);

/// Greedy block solver: repeatedly adds the candidate block with the smallest
/// least-squares residual (ties broken toward the lowest block index), then
/// re-solves on the selected columns. Unselected columns get coefficient 0.
SolveOutcome block_omp(const ReducedSystem& system,
                       const std::vector<Block>& blocks,
                       const SolveConfig& cfg);

/// 2-norm condition number of the reduced matrix; +infinity when rank
/// deficient.
double condition_diagnostics(const ReducedSystem& system);

namespace detail {

struct LstsqResult {
  Eigen::MatrixXd x; // columns match the rhs columns
  double residual_sq = 0.0;
  int rank = 0;
  double condition = 0.0;
};

/// Min-norm least squares via SVD with relative rank cutoff.
LstsqResult lstsq_svd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double rank_tol);

/// Residual energy and rank of one candidate column set (pivoted QR).
void residual_qr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double rank_tol, double& residual_sq, bool& rank_deficient);

} // namespace detail

} // namespace smrs
