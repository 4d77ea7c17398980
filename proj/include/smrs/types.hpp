#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace smrs {

using cdouble = std::complex<double>;

/// One sampling channel. The rate is an exact integer multiple of the grid
/// resolution: rate = m_i * delta_f.
struct ChannelConfig {
  int m_i = 0;       // baseband bins per period
  double rate = 0.0; // m_i * delta_f

  double delta_f() const { return rate / static_cast<double>(m_i); }
};

/// Uniformly discretized complex spectrum.
///
/// Complex signals: bins k = 0..m_total-1 at f = k*delta_f.
/// Real signals use a signed grid: bins k = -half()..half() at f = k*delta_f,
/// stored at offset k + half(). Signed grids are kept conjugate symmetric,
/// X[-k] == conj(X[k]).
struct SpectrumGrid {
  double delta_f = 1.0;
  int m_total = 0;
  bool signed_grid = false;
  std::vector<cdouble> values;

  int half() const { return m_total / 2; }
  int lo() const { return signed_grid ? -half() : 0; }
  int hi() const { return signed_grid ? half() : m_total - 1; }
  int storage_size() const { return signed_grid ? 2 * half() + 1 : m_total; }

  cdouble& at(int k) { return values[static_cast<std::size_t>(k - lo())]; }
  const cdouble& at(int k) const {
    return values[static_cast<std::size_t>(k - lo())];
  }

  static SpectrumGrid zeros(double delta_f, int m_total, bool signed_grid);

  /// Mirrors positive-frequency bins onto negative ones so that
  /// X[-k] == conj(X[k]) holds exactly; forces Im(X[0]) = 0.
  void enforce_conjugate_symmetry();
  bool conjugate_symmetric(double tol = 0.0) const;
};

/// Baseband spectrum of one channel. Complex mode holds m_i bins k = 0..m_i-1;
/// signed mode holds m_i+1 bins k = -m_i/2..m_i/2 (m_i even).
struct ChannelSamples {
  ChannelConfig config;
  bool signed_grid = false;
  std::vector<cdouble> baseband;

  int lo() const { return signed_grid ? -config.m_i / 2 : 0; }
  int hi() const { return signed_grid ? config.m_i / 2 : config.m_i - 1; }
  int storage_size() const { return signed_grid ? config.m_i + 1 : config.m_i; }

  cdouble& at(int k) { return baseband[static_cast<std::size_t>(k - lo())]; }
  const cdouble& at(int k) const {
    return baseband[static_cast<std::size_t>(k - lo())];
  }
};

/// Aliasing matrix of one or more stacked channels, stored implicitly.
/// The entry at baseband row k of channel i and full-grid column l equals the
/// channel rate when l ≡ k (mod m_i) and 0 otherwise. Dense materialization
/// happens only for reduced systems handed to the solver.
struct FoldingMatrix {
  std::vector<ChannelConfig> channels;
  int m_total = 0;
  bool signed_grid = false;
  /// Optional column subset (storage indices), used by reduced systems.
  /// Empty means all columns.
  std::vector<int> retained_columns;

  int grid_half() const { return m_total / 2; }
  int grid_lo() const { return signed_grid ? -grid_half() : 0; }
  int grid_storage_size() const {
    return signed_grid ? 2 * grid_half() + 1 : m_total;
  }
  int rows() const;
  int cols() const;
};

/// Maximal contiguous run of true bins, in storage indices.
struct Block {
  int first = 0;
  int length = 0;
};

/// Candidate-support indicator over the full grid plus its decomposition into
/// maximal contiguous blocks.
struct SupportMask {
  int m_total = 0;
  bool signed_grid = false;
  std::vector<std::uint8_t> mask; // one flag per storage index
  std::vector<Block> blocks;

  int storage_size() const {
    return signed_grid ? 2 * (m_total / 2) + 1 : m_total;
  }
  bool any() const;
  int count() const;
  void recompute_blocks();
};

} // namespace smrs
