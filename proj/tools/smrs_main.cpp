// smrs: multirate sub-Nyquist sampling experiments and reconstruction.
//
//   smrs run   --config <file> [--out-dir <dir>] [--paper-scale]
//   smrs solve --input <spectra> [--output <file>] [--channels r1,r2,...]
//   smrs check --channels r1,r2,... --delta-f <Hz> --fmax <Hz>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smrs/config_io.hpp"
#include "smrs/harness.hpp"
#include "smrs/pipeline.hpp"
#include "smrs/spectral.hpp"

namespace {

std::vector<double> parse_rates(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            bool paper_scale) {
  smrs::ExperimentConfig cfg = smrs::load_experiment_config(config_path);
  if (paper_scale) {
    cfg.delta_f = 5e6;
    cfg.trials = 1000;
  }
  cfg.validate();

  const smrs::SweepResult result = smrs::run_sweep(cfg);

  std::filesystem::create_directories(out_dir);
  const std::string csv = smrs::results_csv(result);
  write_file(out_dir + "/results.csv", csv);
  write_file(out_dir + "/trials.json", smrs::trials_json(cfg, result));
  std::fputs(csv.c_str(), stdout);
  std::printf("wrote %s/results.csv and %s/trials.json\n", out_dir.c_str(),
              out_dir.c_str());
  return 0;
}

int cmd_solve(const std::string& input, const std::string& output,
              const std::string& channels, bool noisy, double energy_window,
              double widen, double subblock) {
  const smrs::SpectraFile file = smrs::load_spectra(input);
  if (!channels.empty()) {
    const std::vector<double> rates = parse_rates(channels);
    if (rates.size() != file.channels.size())
      throw std::invalid_argument("--channels disagrees with the input file");
    for (std::size_t i = 0; i < rates.size(); ++i)
      if (std::abs(rates[i] - file.channels[i].config.rate) >
          1e-6 * file.channels[i].config.rate)
        throw std::invalid_argument("--channels disagrees with the input file");
  }

  smrs::DetectorConfig det;
  smrs::SolveConfig solve;
  if (noisy) {
    det.mode = smrs::DetectorConfig::Mode::noisy;
    det.energy_window = energy_window;
    det.widen_fraction = widen;
    solve.noisy_mode = true;
    solve.subblock_width = subblock;
  }

  const smrs::ReconstructionReport rep = smrs::reconstruct(file, det, solve);
  if (rep.no_signal) {
    std::printf("no signal detected\n");
    return 0;
  }
  std::printf("detected bins:   %d\n", rep.detected_bins);
  std::printf("reduced system:  %d rows x %d columns\n", rep.reduced_rows,
              rep.reduced_cols);
  std::printf("posedness:       %s\n", rep.ill_posed ? "ill posed" : "well posed");
  std::printf("greedy steps:    %d\n", rep.omp_iterations);
  std::printf("residual norm:   %.3e\n", rep.residual_norm);
  std::printf("condition:       %.3f\n", rep.condition_number);
  if (!rep.converged) std::printf("warning: solver did not converge\n");

  if (!output.empty()) {
    write_file(output, smrs::serialize_spectrum(rep.spectrum));
    std::printf("wrote %s\n", output.c_str());
  }
  return rep.converged ? 0 : 3;
}

int cmd_check(const std::string& channels, double delta_f, double fmax,
              bool real) {
  const std::vector<double> rates = parse_rates(channels);
  if (rates.empty()) throw std::invalid_argument("--channels is required");
  std::vector<smrs::ChannelConfig> chans;
  for (double r : rates) {
    const double m = r / delta_f;
    const int m_i = static_cast<int>(std::llround(m));
    if (m_i < 1 || std::abs(m - m_i) > 1e-6)
      throw std::invalid_argument(
          "channel rate is not an integer multiple of delta_f");
    if (real && m_i % 2 != 0)
      throw std::invalid_argument("real mode needs even rate multiples");
    chans.push_back(smrs::ChannelConfig{m_i, r});
  }
  const int m_total = static_cast<int>(std::ceil(fmax / delta_f - 1e-9));
  const smrs::UniquenessVerdict v = smrs::check_unique_columns(chans, m_total);
  std::printf("grid bins:        %d\n", m_total);
  std::printf("lcm of multiples: %llu bins (%.6g Hz)\n", v.max_supported_bins,
              v.max_supported_hz);
  std::printf("verdict:          %s\n",
              v.ok ? "ok, columns are unique"
                   : "NOT ok, f_max reaches the column period");
  return v.ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"synchronized multirate sub-Nyquist sampling toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  bool paper_scale = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment sweep");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_flag("--paper-scale", paper_scale,
                "override to the 5 MHz grid and 1000 trials per point");

  std::string input, output, channels;
  bool noisy = false;
  double energy_window = 100e6, widen = 0.2, subblock = 100e6;
  CLI::App* solve = app.add_subcommand("solve", "one-shot reconstruction");
  solve->add_option("--input", input, "spectra file")->required();
  solve->add_option("--output", output, "write the recovered spectrum here");
  solve->add_option("--channels", channels,
                    "expected channel rates in Hz, for validation");
  solve->add_flag("--noisy", noisy, "use the noisy detector and solver");
  solve->add_option("--energy-window", energy_window,
                    "noisy detector window (Hz)");
  solve->add_option("--widen", widen, "noisy mask widening per side");
  solve->add_option("--subblock", subblock, "noisy sub-block width (Hz)");

  std::string check_channels;
  double delta_f = 0.0, fmax = 0.0;
  bool real = false;
  CLI::App* check = app.add_subcommand("check", "column uniqueness bound");
  check->add_option("--channels", check_channels, "channel rates in Hz")
      ->required();
  check->add_option("--delta-f", delta_f, "frequency resolution (Hz)")
      ->required();
  check->add_option("--fmax", fmax, "monitored span (Hz)")->required();
  check->add_flag("--real", real, "real-signal mode (even multiples)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, paper_scale);
    if (solve->parsed())
      return cmd_solve(input, output, channels, noisy, energy_window, widen,
                       subblock);
    if (check->parsed()) return cmd_check(check_channels, delta_f, fmax, real);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
