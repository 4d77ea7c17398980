#pragma once

#include <string>
#include <vector>

#include "smrs/harness.hpp"
#include "smrs/types.hpp"

namespace smrs {

/// Parses the key = value experiment config format (# comments, dotted keys
/// for the detector.* and solver.* groups). Throws std::invalid_argument on
/// unknown keys or malformed values.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string serialize_experiment_config(const ExperimentConfig& cfg);

/// Per-channel baseband spectra, as read from or written to the text format
/// documented in the README. Values follow the sampled-spectrum
/// normalization: each baseband equals the channel rate (Hz) times the sum
/// of the aliased replicas of X.
struct SpectraFile {
  SignalMode mode = SignalMode::complex_mode;
  double delta_f = 0.0; // Hz
  double f_max = 0.0;   // Hz; complex: max carrier, real: full Nyquist span
  std::vector<ChannelSamples> channels; // rates in Hz
};

SpectraFile parse_spectra(const std::string& text);
SpectraFile load_spectra(const std::string& path);
std::string serialize_spectra(const SpectraFile& file);

/// Reconstructed spectrum writer/reader (nonzero bins only).
std::string serialize_spectrum(const SpectrumGrid& grid);
SpectrumGrid parse_spectrum(const std::string& text);

} // namespace smrs
