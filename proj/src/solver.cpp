#include "smrs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smrs {

namespace detail {

LstsqResult lstsq_svd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double rank_tol) {
  LstsqResult res;
  if (a.cols() == 0) throw std::invalid_argument("degenerate system: no columns");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                        Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = rank_tol * smax;

  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  res.rank = rank;

  const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  res.condition = (rank < a.cols() || smin <= 0.0)
                      ? std::numeric_limits<double>::infinity()
                      : smax / smin;

  // Min-norm solution through the truncated pseudo-inverse.
  Eigen::MatrixXd ub = svd.matrixU().leftCols(rank).transpose() * b;
  for (int i = 0; i < rank; ++i) ub.row(i) /= sv(i);
  res.x = svd.matrixV().leftCols(rank) * ub;
  res.residual_sq = (b - a * res.x).squaredNorm();
  return res;
}

void residual_qr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double rank_tol, double& residual_sq, bool& rank_deficient) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(rank_tol);
  const Eigen::MatrixXd x = qr.solve(b);
  residual_sq = (b - a * x).squaredNorm();
  rank_deficient = qr.rank() < a.cols();
}

} // namespace detail

namespace {

Eigen::MatrixXd rhs_columns(const ReducedSystem& system) {
  Eigen::MatrixXd b(system.rhs.size(), 2);
  b.col(0) = system.rhs.real();
  b.col(1) = system.rhs.imag();
  return b;
}

Eigen::VectorXcd to_complex(const Eigen::MatrixXd& x) {
  Eigen::VectorXcd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i) = cdouble{x(i, 0), x(i, 1)};
  return out;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& a,
                               const std::vector<int>& cols) {
  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
  return out;
}

} // namespace

Posedness classify_posedness(const ReducedSystem& system,
                             const SolveConfig& cfg) {
  if (system.empty()) throw std::invalid_argument("empty system");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.matrix);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = cfg.rank_tolerance * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank == system.cols() ? Posedness::well_posed : Posedness::ill_posed;
}

SolveOutcome solve_direct(const ReducedSystem& system, const SolveConfig& cfg) {
  if (system.empty()) throw std::invalid_argument("degenerate system: no columns");
  const Eigen::MatrixXd b = rhs_columns(system);
  const detail::LstsqResult ls =
      detail::lstsq_svd(system.matrix, b, cfg.rank_tolerance);

  SolveOutcome out;
  out.solution = to_complex(ls.x);
  out.posedness = ls.rank == system.cols() ? Posedness::well_posed
                                           : Posedness::ill_posed;
  out.residual_norm = std::sqrt(ls.residual_sq);
  out.condition_number = ls.condition;
  out.iterations = 0;
  out.converged = true;
  return out;
}

SolveOutcome block_omp(const ReducedSystem& system,
                       const std::vector<Block>& blocks,
                       const SolveConfig& cfg) {
  if (system.empty()) throw std::invalid_argument("degenerate system: no columns");
  if (blocks.empty()) throw std::invalid_argument("no candidate blocks");

  const Eigen::MatrixXd b = rhs_columns(system);
  const double eps = cfg.omp_threshold;

  std::vector<int> selected_cols;
  std::vector<int> selected_blocks;
  std::vector<char> used(blocks.size(), 0);
  double current_res2 = b.squaredNorm();
  std::vector<double> history;
  bool converged = current_res2 <= eps; // nothing to explain
  bool stopped = converged;

  const int cap = static_cast<int>(blocks.size());
  for (int iter = 0; iter < cap && !stopped; ++iter) {
    // Evaluate every remaining block; the reduction is deterministic because
    // candidates are scanned in ascending block order afterwards.
    std::vector<double> res2(blocks.size(),
                             std::numeric_limits<double>::infinity());
    std::vector<char> rankdef(blocks.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (omp_get_level() == 0)
#endif
    for (int j = 0; j < static_cast<int>(blocks.size()); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      std::vector<int> cand = selected_cols;
      for (int c = 0; c < blocks[static_cast<std::size_t>(j)].length; ++c)
        cand.push_back(blocks[static_cast<std::size_t>(j)].first + c);
      std::sort(cand.begin(), cand.end());
      double r = 0.0;
      bool rd = false;
      detail::residual_qr(gather_columns(system.matrix, cand), b,
                          cfg.rank_tolerance, r, rd);
      res2[static_cast<std::size_t>(j)] = r;
      rankdef[static_cast<std::size_t>(j)] = rd ? 1 : 0;
    }

    int best = -1;
    for (int j = 0; j < static_cast<int>(blocks.size()); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || res2[static_cast<std::size_t>(j)] <
                          res2[static_cast<std::size_t>(best)])
        best = j;
    }
    if (best < 0) break;
    const double best_res2 = res2[static_cast<std::size_t>(best)];

    if (cfg.noisy_mode && rankdef[static_cast<std::size_t>(best)]) {
      // Adding the best block would make the matrix rank deficient: stop
      // without adding it.
      converged = true;
      stopped = true;
      break;
    }
    if (!cfg.noisy_mode && best_res2 >= current_res2 * (1.0 - 1e-12) &&
        best_res2 > eps) {
      // No block reduces the residual.
      converged = false;
      stopped = true;
      break;
    }

    used[static_cast<std::size_t>(best)] = 1;
    selected_blocks.push_back(best);
    for (int c = 0; c < blocks[static_cast<std::size_t>(best)].length; ++c)
      selected_cols.push_back(blocks[static_cast<std::size_t>(best)].first + c);
    std::sort(selected_cols.begin(), selected_cols.end());
    current_res2 = best_res2;
    history.push_back(best_res2);

    if (best_res2 <= eps) {
      converged = true;
      stopped = true;
    }
  }
  if (!stopped && current_res2 > eps) converged = false; // cap exhausted

  SolveOutcome out;
  out.selected_blocks = selected_blocks;
  out.iterations = static_cast<int>(selected_blocks.size());
  out.residual_history = history;
  out.converged = converged;
  out.solution = Eigen::VectorXcd::Zero(system.cols());

  if (selected_cols.empty()) {
    out.residual_norm = std::sqrt(b.squaredNorm());
    out.condition_number = std::numeric_limits<double>::infinity();
    out.posedness = Posedness::ill_posed;
    return out;
  }

  // Re-solve on the final selected columns; unselected columns stay zero.
  const Eigen::MatrixXd a_sel = gather_columns(system.matrix, selected_cols);
  const detail::LstsqResult ls = detail::lstsq_svd(a_sel, b, cfg.rank_tolerance);
  const Eigen::VectorXcd xs = to_complex(ls.x);
  for (std::size_t i = 0; i < selected_cols.size(); ++i)
    out.solution(selected_cols[i]) = xs(static_cast<Eigen::Index>(i));
  out.residual_norm = std::sqrt(ls.residual_sq);
  out.condition_number = ls.condition;
  out.posedness = ls.rank == static_cast<int>(selected_cols.size())
                      ? Posedness::well_posed
                      : Posedness::ill_posed;
  if (!cfg.noisy_mode && out.converged && ls.residual_sq > eps)
    out.converged = false; // the threshold must hold for the final solve too
  return out;
}

double condition_diagnostics(const ReducedSystem& system) {
  if (system.empty()) throw std::invalid_argument("empty system");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.matrix);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin <= smax * 1e-15 || smin == 0.0)
    return std::numeric_limits<double>::infinity();
  return smax / smin;
}

} // namespace smrs
