#pragma once

#include "fbmg/core.hpp"

namespace fbmg {

/// Upper bound on |grad|^2 for the forward-difference gradient on 2-D grids.
inline constexpr double kGradientNormBound = 8.0;

/// Forward differences with replicate (Neumann) boundary: the row-direction
/// difference vanishes on the last row, the column-direction one on the last
/// column.
DualField gradient(const ImageField& y);

/// Exact adjoint of gradient (the negative divergence).
ImageField divergence_adjoint(const DualField& x);

/// Sum of pixelwise Euclidean norms.
double tv_norm(const DualField& g);

}  // namespace fbmg
