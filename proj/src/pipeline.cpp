#include "smrs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smrs/realvalued.hpp"
#include "smrs/spectral.hpp"

namespace smrs {

ReconstructionReport reconstruct(const SpectraFile& input,
                                 const DetectorConfig& det_in,
                                 const SolveConfig& cfg_in) {
  if (input.channels.empty()) throw std::invalid_argument("no channels");
  if (input.delta_f <= 0.0 || input.f_max <= 0.0)
    throw std::invalid_argument("delta_f and f_max must be positive");

  const bool real = input.mode == SignalMode::real_mode;
  const int m_total =
      static_cast<int>(std::ceil(input.f_max / input.delta_f - 1e-9));

  // Normalize: rates become the bin multiples and the baseband values are
  // divided by delta_f, which maps rate * sum(X) onto m_i * sum(X).
  std::vector<ChannelSamples> samples = input.channels;
  for (auto& s : samples) {
    const double m = s.config.rate / input.delta_f;
    const int m_i = static_cast<int>(std::llround(m));
    if (m_i != s.config.m_i)
      throw std::invalid_argument("channel rate disagrees with delta_f");
    s.config.rate = static_cast<double>(m_i);
    for (auto& v : s.baseband) v /= input.delta_f;
  }

  DetectorConfig det = det_in;
  if (det.energy_window > 0.0) det.energy_window /= input.delta_f;
  SolveConfig cfg = cfg_in;
  if (cfg.subblock_width > 0.0) cfg.subblock_width /= input.delta_f;

  std::vector<ChannelConfig> chans;
  for (const auto& s : samples) chans.push_back(s.config);

  std::vector<std::vector<std::uint8_t>> indicators;
  for (const auto& s : samples)
    indicators.push_back(channel_indicator(s, det, m_total));
  SupportMask mask = intersect_indicators(indicators, m_total, real);
  if (det.mode == DetectorConfig::Mode::noisy && det.widen_fraction > 0.0)
    mask = widen_mask(mask, det.widen_fraction);

  ReconstructionReport rep;
  rep.spectrum = SpectrumGrid::zeros(input.delta_f, m_total, real);
  rep.detected_bins = mask.count();
  if (!mask.any()) {
    rep.no_signal = true;
    return rep;
  }

  if (!real) {
    FoldingMatrix fm;
    fm.channels = chans;
    fm.m_total = m_total;
    fm.signed_grid = false;
    const ReducedSystem red = reduce_system(fm, samples, mask, det);
    rep.reduced_rows = red.rows();
    rep.reduced_cols = red.cols();
    if (red.empty()) {
      rep.no_signal = true;
      return rep;
    }
    std::vector<Block> blocks = reduced_blocks(mask, red.column_map);
    if (cfg.noisy_mode && cfg.subblock_width > 0.0)
      blocks = split_blocks(
          blocks,
          std::max(1, static_cast<int>(std::lround(cfg.subblock_width))));

    const Posedness posed = classify_posedness(red, cfg);
    const SolveOutcome out = posed == Posedness::well_posed || blocks.empty()
                                 ? solve_direct(red, cfg)
                                 : block_omp(red, blocks, cfg);
    rep.ill_posed = posed == Posedness::ill_posed;
    rep.converged = out.converged;
    rep.omp_iterations = out.iterations;
    rep.residual_norm = out.residual_norm;
    rep.condition_number = out.condition_number;
    for (std::size_t c = 0; c < red.column_map.size(); ++c)
      rep.spectrum.values[static_cast<std::size_t>(red.column_map[c])] =
          out.solution(static_cast<Eigen::Index>(c));
  } else {
    FoldingMatrix fm;
    fm.channels = chans;
    fm.m_total = m_total;
    fm.signed_grid = true;
    const RealSplitSystem split = build_real_split(fm, samples);
    const RealSolveResult res = solve_real(split, mask, det, cfg);
    if (res.no_signal) {
      rep.no_signal = true;
      return rep;
    }
    rep.ill_posed = res.ill_posed;
    rep.converged = res.real_part.converged && res.imag_part.converged;
    rep.omp_iterations = res.real_part.iterations + res.imag_part.iterations;
    rep.residual_norm =
        std::max(res.real_part.residual_norm, res.imag_part.residual_norm);
    rep.condition_number = res.condition_number;
    rep.spectrum.values = res.spectrum.values;
    rep.reduced_rows = static_cast<int>(split.row_map.size());
    rep.reduced_cols = rep.detected_bins;
  }
  return rep;
}

} // namespace smrs
