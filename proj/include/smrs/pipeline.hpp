#pragma once

#include <vector>

#include "smrs/config_io.hpp"
#include "smrs/solver.hpp"
#include "smrs/support.hpp"
#include "smrs/types.hpp"

namespace smrs {

/// Recovered spectrum plus solver diagnostics for a one-shot reconstruction.
struct ReconstructionReport {
  SpectrumGrid spectrum; // user frequency units
  bool no_signal = false;
  bool ill_posed = false;
  bool converged = true;
  int omp_iterations = 0;
  double residual_norm = 0.0; // normalized units
  double condition_number = 0.0;
  int detected_bins = 0;
  int reduced_rows = 0;
  int reduced_cols = 0;
};

/// Detect support, reduce, classify and solve the given baseband spectra.
/// Samples are normalized internally (frequencies in units of delta_f) so the
/// solver thresholds keep their meaning; the recovered amplitudes are
/// returned unchanged.
ReconstructionReport reconstruct(const SpectraFile& input,
                                 const DetectorConfig& det,
                                 const SolveConfig& cfg);

} // namespace smrs
