#include "smrs/config_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smrs {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value for " + key + ": " + v);
  }
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(parse_double(tok, key));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "mode") {
      if (val == "complex")
        cfg.mode = SignalMode::complex_mode;
      else if (val == "real")
        cfg.mode = SignalMode::real_mode;
      else
        throw std::invalid_argument("mode must be complex or real");
    } else if (key == "channels") {
      cfg.channel_rates = parse_list(val, key);
    } else if (key == "delta_f") {
      cfg.delta_f = parse_double(val, key);
    } else if (key == "f_max") {
      cfg.f_max = parse_double(val, key);
    } else if (key == "band_count") {
      cfg.band_count = static_cast<int>(parse_double(val, key));
    } else if (key == "band_width") {
      cfg.band_width = parse_double(val, key);
    } else if (key == "landau_sweep") {
      cfg.landau_sweep = parse_list(val, key);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_double(val, key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_double(val, key));
    } else if (key == "noise_sigma") {
      cfg.noise_sigma = parse_double(val, key);
    } else if (key == "success_rule") {
      if (val == "perfect")
        cfg.success_rule = SuccessRule::perfect;
      else if (val == "per_band_l1")
        cfg.success_rule = SuccessRule::per_band_l1;
      else if (val == "per_band_l2")
        cfg.success_rule = SuccessRule::per_band_l2;
      else
        throw std::invalid_argument("unknown success_rule: " + val);
    } else if (key == "detector.mode") {
      if (val == "noiseless")
        cfg.detector.mode = DetectorConfig::Mode::noiseless;
      else if (val == "noisy")
        cfg.detector.mode = DetectorConfig::Mode::noisy;
      else
        throw std::invalid_argument("detector.mode must be noiseless or noisy");
    } else if (key == "detector.energy_window") {
      cfg.detector.energy_window = parse_double(val, key);
    } else if (key == "detector.energy_threshold") {
      cfg.detector.energy_threshold = parse_double(val, key);
    } else if (key == "detector.auto_threshold_factor") {
      cfg.detector.auto_threshold_factor = parse_double(val, key);
    } else if (key == "detector.widen_fraction") {
      cfg.detector.widen_fraction = parse_double(val, key);
    } else if (key == "detector.zero_tol") {
      cfg.detector.zero_tol = parse_double(val, key);
    } else if (key == "solver.rank_tolerance") {
      cfg.solver.rank_tolerance = parse_double(val, key);
    } else if (key == "solver.omp_threshold") {
      cfg.solver.omp_threshold = parse_double(val, key);
    } else if (key == "solver.subblock_width") {
      cfg.solver.subblock_width = parse_double(val, key);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_file(path));
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "mode = ";
  out += cfg.mode == SignalMode::real_mode ? "real" : "complex";
  out += "\nchannels = ";
  for (std::size_t i = 0; i < cfg.channel_rates.size(); ++i)
    out += (i ? ", " : "") + fmt(cfg.channel_rates[i]);
  out += "\ndelta_f = " + fmt(cfg.delta_f);
  out += "\nf_max = " + fmt(cfg.f_max);
  out += "\nband_count = " + std::to_string(cfg.band_count);
  if (cfg.band_width > 0.0) out += "\nband_width = " + fmt(cfg.band_width);
  if (!cfg.landau_sweep.empty()) {
    out += "\nlandau_sweep = ";
    for (std::size_t i = 0; i < cfg.landau_sweep.size(); ++i)
      out += (i ? ", " : "") + fmt(cfg.landau_sweep[i]);
  }
  out += "\ntrials = " + std::to_string(cfg.trials);
  out += "\nseed = " + std::to_string(cfg.seed);
  out += "\nnoise_sigma = " + fmt(cfg.noise_sigma);
  out += "\nsuccess_rule = ";
  switch (cfg.success_rule) {
    case SuccessRule::perfect: out += "perfect"; break;
    case SuccessRule::per_band_l1: out += "per_band_l1"; break;
    case SuccessRule::per_band_l2: out += "per_band_l2"; break;
  }
  out += "\ndetector.mode = ";
  out += cfg.detector.mode == DetectorConfig::Mode::noisy ? "noisy" : "noiseless";
  out += "\ndetector.energy_window = " + fmt(cfg.detector.energy_window);
  out += "\ndetector.energy_threshold = " + fmt(cfg.detector.energy_threshold);
  out += "\ndetector.auto_threshold_factor = " +
         fmt(cfg.detector.auto_threshold_factor);
  out += "\ndetector.widen_fraction = " + fmt(cfg.detector.widen_fraction);
  out += "\ndetector.zero_tol = " + fmt(cfg.detector.zero_tol);
  out += "\nsolver.rank_tolerance = " + fmt(cfg.solver.rank_tolerance);
  out += "\nsolver.omp_threshold = " + fmt(cfg.solver.omp_threshold);
  out += "\nsolver.subblock_width = " + fmt(cfg.solver.subblock_width);
  out += "\n";
  return out;
}

SpectraFile parse_spectra(const std::string& text) {
  SpectraFile file;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  bool have_delta = false, have_fmax = false;
  ChannelSamples* current = nullptr;

  auto finish_channel = [&](ChannelSamples& ch) {
    // sparse bins were filled as we read; nothing else to do
    (void)ch;
  };

  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::stringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "mode") {
      std::string v;
      ls >> v;
      if (v == "complex")
        file.mode = SignalMode::complex_mode;
      else if (v == "real")
        file.mode = SignalMode::real_mode;
      else
        throw std::invalid_argument("spectra: mode must be complex or real");
    } else if (word == "delta_f") {
      ls >> file.delta_f;
      have_delta = true;
    } else if (word == "f_max") {
      ls >> file.f_max;
      have_fmax = true;
    } else if (word == "channel") {
      if (!have_delta)
        throw std::invalid_argument("spectra: delta_f must precede channels");
      int m_i = 0;
      ls >> m_i;
      if (m_i < 1)
        throw std::invalid_argument("spectra: channel needs m_i >= 1");
      if (current) finish_channel(*current);
      ChannelSamples ch;
      ch.config = ChannelConfig{m_i, m_i * file.delta_f};
      ch.signed_grid = file.mode == SignalMode::real_mode;
      if (ch.signed_grid && m_i % 2 != 0)
        throw std::invalid_argument("spectra: real mode needs even m_i");
      ch.baseband.assign(static_cast<std::size_t>(ch.storage_size()),
                         cdouble{0.0, 0.0});
      file.channels.push_back(std::move(ch));
      current = &file.channels.back();
    } else {
      if (!current)
        throw std::invalid_argument("spectra line " + std::to_string(lineno) +
                                    ": bin before any channel header");
      int k = 0;
      double re = 0.0, im = 0.0;
      std::stringstream bs(line);
      if (!(bs >> k >> re >> im))
        throw std::invalid_argument("spectra line " + std::to_string(lineno) +
                                    ": expected 'k re im'");
      if (k < current->lo() || k > current->hi())
        throw std::invalid_argument("spectra line " + std::to_string(lineno) +
                                    ": bin out of baseband range");
      current->at(k) = cdouble{re, im};
    }
  }
  if (!have_delta || !have_fmax)
    throw std::invalid_argument("spectra: delta_f and f_max are required");
  if (file.channels.empty())
    throw std::invalid_argument("spectra: no channels");
  return file;
}

SpectraFile load_spectra(const std::string& path) {
  return parse_spectra(read_file(path));
}

std::string serialize_spectra(const SpectraFile& file) {
  std::string out;
  out += "mode ";
  out += file.mode == SignalMode::real_mode ? "real" : "complex";
  out += "\ndelta_f " + fmt(file.delta_f);
  out += "\nf_max " + fmt(file.f_max);
  out += "\n";
  for (const auto& ch : file.channels) {
    out += "channel " + std::to_string(ch.config.m_i) + "\n";
    for (int k = ch.lo(); k <= ch.hi(); ++k) {
      const cdouble v = ch.at(k);
      if (v != cdouble{0.0, 0.0})
        out += std::to_string(k) + " " + fmt(v.real()) + " " + fmt(v.imag()) +
               "\n";
    }
  }
  return out;
}

std::string serialize_spectrum(const SpectrumGrid& grid) {
  std::string out;
  out += "mode ";
  out += grid.signed_grid ? "real" : "complex";
  out += "\ndelta_f " + fmt(grid.delta_f);
  out += "\nm_total " + std::to_string(grid.m_total);
  out += "\n";
  for (int k = grid.lo(); k <= grid.hi(); ++k) {
    const cdouble v = grid.at(k);
    if (v != cdouble{0.0, 0.0})
      out += std::to_string(k) + " " + fmt(v.real()) + " " + fmt(v.imag()) + "\n";
  }
  return out;
}

SpectrumGrid parse_spectrum(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  bool signed_grid = false;
  double delta_f = 0.0;
  int m_total = 0;
  std::vector<std::tuple<int, double, double>> bins;
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "mode") {
      std::string v;
      ls >> v;
      signed_grid = v == "real";
    } else if (word == "delta_f") {
      ls >> delta_f;
    } else if (word == "m_total") {
      ls >> m_total;
    } else {
      std::stringstream bs(line);
      int k;
      double re, im;
      if (bs >> k >> re >> im) bins.emplace_back(k, re, im);
    }
  }
  if (m_total < 1 || delta_f <= 0.0)
    throw std::invalid_argument("spectrum: missing header");
  SpectrumGrid g = SpectrumGrid::zeros(delta_f, m_total, signed_grid);
  for (const auto& [k, re, im] : bins) g.at(k) = cdouble{re, im};
  return g;
}

} // namespace smrs
