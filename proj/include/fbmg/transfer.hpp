#pragma once

#include <vector>

#include "fbmg/core.hpp"

namespace fbmg {

/// Full-weighting grid transfer between a fine grid and the coarse grid of
/// half resolution.
///
/// Restriction applies the tensor stencil R (x) R with R = [1/2 1 1/2]
/// centred at fine pixel (2r, 2c) for coarse pixel (r, c). Stencil taps
/// outside the fine grid are dropped without renormalisation. Prolongation is
/// the scaled adjoint, so that mu * prolong == restrict^T with mu = 4.
class GridTransfer {
 public:
  /// Throws std::invalid_argument when either fine dimension is below 3.
  explicit GridTransfer(GridShape fine);

  const GridShape& fine() const { return fine_; }
  const GridShape& coarse() const { return coarse_; }
  double mu() const { return 4.0; }

  ImageField restrict(const ImageField& fine_field) const;
  DualField restrict(const DualField& fine_field) const;
  ImageField prolong(const ImageField& coarse_field) const;
  DualField prolong(const DualField& coarse_field) const;

  /// Fine indices with nonzero restriction weight for coarse pixel l (A_l).
  std::vector<int> fine_support(int coarse_index) const;

 private:
  GridShape fine_;
  GridShape coarse_;
};

/// Coarse dimension used for a fine dimension: ceil(n / 2).
inline int coarse_dim(int fine_dim) { return (fine_dim + 1) / 2; }

}  // namespace fbmg
