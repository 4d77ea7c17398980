#pragma once

#include <complex>
#include <random>
#include <vector>

#include "smrs/types.hpp"

namespace smrs::test {

inline SpectrumGrid grid_with(double delta_f, int m_total, bool signed_grid,
                              const std::vector<std::pair<int, cdouble>>& bins) {
  SpectrumGrid g = SpectrumGrid::zeros(delta_f, m_total, signed_grid);
  for (const auto& [k, v] : bins) g.at(k) = v;
  return g;
}

inline SpectrumGrid random_grid(double delta_f, int m_total, bool signed_grid,
                                std::mt19937_64& rng) {
  SpectrumGrid g = SpectrumGrid::zeros(delta_f, m_total, signed_grid);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& v : g.values) v = cdouble{gauss(rng), gauss(rng)};
  if (signed_grid) g.enforce_conjugate_symmetry();
  return g;
}

inline double max_rel_diff(const std::vector<cdouble>& a,
                           const std::vector<cdouble>& b) {
  double scale = 1e-300;
  for (const auto& v : a) scale = std::max(scale, std::abs(v));
  for (const auto& v : b) scale = std::max(scale, std::abs(v));
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d / scale;
}

} // namespace smrs::test
