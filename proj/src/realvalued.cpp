#include "smrs/realvalued.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smrs {

namespace {

int wrap_mod(int a, int m) { return ((a % m) + m) % m; }

// Real/imag coefficient of channel row k >= 0 and positive bin p.
// Resolved convention (checked against the brute-force signed fold):
//   p >= 1: real = rate * ([p ~ k] + [-p ~ k]), imag = rate * ([p ~ k] - [-p ~ k])
//   p == 0: real = rate * [0 ~ k], imag = 0  (DC is its own mirror)
// where [a ~ k] is 1 when a ≡ k (mod m_i). A bin with p ≡ -p (mod m_i)
// contributes twice to the real part and cancels out of the imaginary part.
double split_entry(const ChannelConfig& ch, int k, int p, bool imag) {
  const int m_i = ch.m_i;
  const bool pos = wrap_mod(p - k, m_i) == 0;
  if (p == 0) return imag ? 0.0 : (pos ? ch.rate : 0.0);
  const bool neg = wrap_mod(-p - k, m_i) == 0;
  const double a = (pos ? ch.rate : 0.0);
  const double b = (neg ? ch.rate : 0.0);
  return imag ? a - b : a + b;
}

struct SplitSolve {
  SolveOutcome outcome;
  std::vector<int> bins; // positive bins actually solved
  bool solved = false;   // a matrix was factorized (condition is meaningful)
};

} // namespace

Eigen::MatrixXd RealSplitSystem::materialize(
    const std::vector<int>& positive_bins, const std::vector<int>& rows,
    bool imag) const {
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(positive_bins.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto [ci, k] = row_map[static_cast<std::size_t>(rows[r])];
    const ChannelConfig& ch = channels[static_cast<std::size_t>(ci)];
    for (std::size_t c = 0; c < positive_bins.size(); ++c)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          split_entry(ch, k, positive_bins[c], imag);
  }
  return a;
}

RealSplitSystem build_real_split(const FoldingMatrix& full,
                                 const std::vector<ChannelSamples>& samples) {
  if (!full.signed_grid)
    throw std::invalid_argument("real split needs a signed grid");
  if (samples.size() != full.channels.size())
    throw std::invalid_argument("one sample vector per channel required");
  for (const auto& ch : full.channels)
    if (ch.m_i % 2 != 0)
      throw std::invalid_argument("real split needs even m_i");

  RealSplitSystem sys;
  sys.channels = full.channels;
  sys.m_total = full.m_total;
  sys.samples = samples;

  int nrows = 0;
  for (const auto& ch : full.channels) nrows += ch.m_i / 2 + 1;
  sys.rhs_real.resize(nrows);
  sys.rhs_imag.resize(nrows);
  int r = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.config.m_i != full.channels[i].m_i || !s.signed_grid)
      throw std::invalid_argument("sample vector does not match its channel");
    for (int k = 0; k <= s.config.m_i / 2; ++k) {
      sys.rhs_real(r) = s.at(k).real();
      sys.rhs_imag(r) = s.at(k).imag();
      sys.row_map.emplace_back(static_cast<int>(i), k);
      ++r;
    }
  }
  return sys;
}

RealSolveResult solve_real(const RealSplitSystem& system,
                           const SupportMask& mask, const DetectorConfig& det,
                           const SolveConfig& cfg) {
  if (!mask.signed_grid || mask.m_total != system.m_total)
    throw std::invalid_argument("mask does not match the signed grid");

  const int half = system.half();
  RealSolveResult res;
  res.spectrum = SpectrumGrid::zeros(
      system.samples.front().config.delta_f(), system.m_total, true);

  // Positive-frequency candidate bins.
  std::vector<int> pos_bins;
  for (int p = 0; p <= half; ++p)
    if (mask.mask[static_cast<std::size_t>(p + half)]) pos_bins.push_back(p);
  if (pos_bins.empty()) {
    res.no_signal = true;
    return res;
  }

  // Row retention: per-channel baseband indicator, positive half.
  std::vector<std::vector<std::uint8_t>> keep(system.samples.size());
  for (std::size_t i = 0; i < system.samples.size(); ++i)
    keep[i] = baseband_indicator(system.samples[i], det);
  std::vector<int> rows;
  for (std::size_t r = 0; r < system.row_map.size(); ++r) {
    const auto [ci, k] = system.row_map[r];
    const auto& s = system.samples[static_cast<std::size_t>(ci)];
    const int storage = k - s.lo();
    if (keep[static_cast<std::size_t>(ci)][static_cast<std::size_t>(storage)])
      rows.push_back(static_cast<int>(r));
  }

  // Mask blocks clipped to the positive half, as runs over pos_bins.
  auto blocks_for = [&](const std::vector<int>& bins) {
    SupportMask pos_mask;
    pos_mask.m_total = mask.m_total;
    pos_mask.signed_grid = false; // storage indexed by p directly
    pos_mask.mask.assign(static_cast<std::size_t>(half) + 1, 0);
    for (const auto& b : mask.blocks) {
      for (int i = 0; i < b.length; ++i) {
        const int p = b.first + i - half;
        if (p >= 0 && p <= half) pos_mask.mask[static_cast<std::size_t>(p)] = 1;
      }
    }
    pos_mask.recompute_blocks();
    return reduced_blocks(pos_mask, bins);
  };

  const double grid_delta = system.samples.front().config.delta_f();
  int subblock_bins = 0;
  if (cfg.noisy_mode && cfg.subblock_width > 0.0)
    subblock_bins = std::max(
        1, static_cast<int>(std::lround(cfg.subblock_width / grid_delta)));

  auto run_side = [&](bool imag) {
    SplitSolve side;
    const Eigen::VectorXd& rhs_full = imag ? system.rhs_imag : system.rhs_real;

    // Column set: the imaginary system has no DC unknown; columns with no
    // surviving nonzero row are pinned to zero.
    std::vector<int> bins;
    for (int p : pos_bins) {
      if (imag && p == 0) continue;
      bool alive = false;
      for (int r : rows) {
        const auto [ci, k] = system.row_map[static_cast<std::size_t>(r)];
        if (split_entry(system.channels[static_cast<std::size_t>(ci)], k, p,
                        imag) != 0.0) {
          alive = true;
          break;
        }
      }
      if (alive) bins.push_back(p);
    }
    if (bins.empty()) {
      side.outcome.converged = true;
      return side;
    }

    // Assemble a ReducedSystem so the generic solver applies unchanged.
    ReducedSystem red;
    red.matrix = system.materialize(bins, rows, imag);
    red.rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      red.rhs(static_cast<Eigen::Index>(r)) =
          cdouble{rhs_full(rows[r]), 0.0};
    red.column_map = bins;
    for (int r : rows) red.row_map.emplace_back(system.row_map[static_cast<std::size_t>(r)]);

    // Drop rows that lost every column (possible after widening).
    std::vector<int> keep_r;
    for (Eigen::Index r = 0; r < red.matrix.rows(); ++r)
      if (red.matrix.row(r).cwiseAbs().maxCoeff() > 0.0)
        keep_r.push_back(static_cast<int>(r));
    if (static_cast<int>(keep_r.size()) != red.matrix.rows()) {
      Eigen::MatrixXd m2(static_cast<Eigen::Index>(keep_r.size()),
                         red.matrix.cols());
      Eigen::VectorXcd b2(static_cast<Eigen::Index>(keep_r.size()));
      std::vector<std::pair<int, int>> rm2;
      for (std::size_t i = 0; i < keep_r.size(); ++i) {
        m2.row(static_cast<Eigen::Index>(i)) = red.matrix.row(keep_r[i]);
        b2(static_cast<Eigen::Index>(i)) = red.rhs(keep_r[i]);
        rm2.push_back(red.row_map[static_cast<std::size_t>(keep_r[i])]);
      }
      red.matrix = std::move(m2);
      red.rhs = std::move(b2);
      red.row_map = std::move(rm2);
    }
    if (red.matrix.rows() == 0) {
      side.outcome.converged = true;
      return side;
    }

    std::vector<Block> blocks = blocks_for(bins);
    if (subblock_bins > 0) blocks = split_blocks(blocks, subblock_bins);

    const Posedness posed = classify_posedness(red, cfg);
    if (posed == Posedness::well_posed || blocks.empty()) {
      side.outcome = solve_direct(red, cfg);
    } else {
      side.outcome = block_omp(red, blocks, cfg);
    }
    side.outcome.posedness = posed;
    side.bins = bins;
    side.solved = true;
    return side;
  };

  SplitSolve re = run_side(false);
  SplitSolve im = run_side(true);

  for (std::size_t i = 0; i < re.bins.size(); ++i) {
    const int p = re.bins[i];
    res.spectrum.at(p) += cdouble{re.outcome.solution(static_cast<Eigen::Index>(i)).real(), 0.0};
  }
  for (std::size_t i = 0; i < im.bins.size(); ++i) {
    const int p = im.bins[i];
    res.spectrum.at(p) += cdouble{0.0, im.outcome.solution(static_cast<Eigen::Index>(i)).real()};
  }
  res.spectrum.enforce_conjugate_symmetry();

  res.real_part = re.outcome;
  res.imag_part = im.outcome;
  res.ill_posed = (re.solved && re.outcome.posedness == Posedness::ill_posed) ||
                  (im.solved && im.outcome.posedness == Posedness::ill_posed);
  double cond = 0.0;
  if (re.solved && std::isfinite(re.outcome.condition_number))
    cond = std::max(cond, re.outcome.condition_number);
  if (im.solved && std::isfinite(im.outcome.condition_number))
    cond = std::max(cond, im.outcome.condition_number);
  const bool any_inf =
      (re.solved && !std::isfinite(re.outcome.condition_number) &&
       !re.outcome.selected_blocks.empty()) ||
      (im.solved && !std::isfinite(im.outcome.condition_number) &&
       !im.outcome.selected_blocks.empty());
  res.condition_number =
      any_inf ? std::numeric_limits<double>::infinity() : cond;
  return res;
}

} // namespace smrs
