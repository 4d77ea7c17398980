#include "smrs/types.hpp"

#include <cmath>
#include <stdexcept>

namespace smrs {

SpectrumGrid SpectrumGrid::zeros(double delta_f, int m_total,
                                 bool signed_grid) {
  if (m_total < 1 || delta_f <= 0.0)
    throw std::invalid_argument("SpectrumGrid: need m_total >= 1, delta_f > 0");
  SpectrumGrid g;
  g.delta_f = delta_f;
  g.m_total = m_total;
  g.signed_grid = signed_grid;
  g.values.assign(static_cast<std::size_t>(g.storage_size()), cdouble{0.0, 0.0});
  return g;
}

void SpectrumGrid::enforce_conjugate_symmetry() {
  if (!signed_grid)
    throw std::logic_error("conjugate symmetry applies to signed grids only");
  at(0) = cdouble{at(0).real(), 0.0};
  for (int k = 1; k <= half(); ++k) at(-k) = std::conj(at(k));
}

bool SpectrumGrid::conjugate_symmetric(double tol) const {
  if (!signed_grid) return false;
  if (std::abs(at(0).imag()) > tol) return false;
  for (int k = 1; k <= half(); ++k)
    if (std::abs(at(-k) - std::conj(at(k))) > tol) return false;
  return true;
}

int FoldingMatrix::rows() const {
  int r = 0;
  for (const auto& c : channels) r += signed_grid ? c.m_i + 1 : c.m_i;
  return r;
}

int FoldingMatrix::cols() const {
  if (!retained_columns.empty())
    return static_cast<int>(retained_columns.size());
  return grid_storage_size();
}

bool SupportMask::any() const {
  for (auto v : mask)
    if (v) return true;
  return false;
}

int SupportMask::count() const {
  int n = 0;
  for (auto v : mask) n += v ? 1 : 0;
  return n;
}

void SupportMask::recompute_blocks() {
  blocks.clear();
  const int n = static_cast<int>(mask.size());
  int i = 0;
  while (i < n) {
    if (!mask[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && mask[static_cast<std::size_t>(j)]) ++j;
    blocks.push_back(Block{i, j - i});
    i = j;
  }
}

} // namespace smrs
