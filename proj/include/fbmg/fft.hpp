#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "fbmg/core.hpp"

namespace fbmg {

using Complex = std::complex<double>;
using ComplexField = std::vector<Complex>;

/// Unitary 2-D DFT on a fixed grid (F^* == F^{-1}), row-major layout.
///
/// Plans are created once under a global lock; execution uses the new-array
/// interface and is safe to call concurrently on one instance.
class Fft2d {
 public:
  explicit Fft2d(GridShape shape);

  const GridShape& shape() const { return shape_; }

  ComplexField forward(const ComplexField& in) const;
  ComplexField inverse(const ComplexField& in) const;
  ComplexField forward(const ImageField& in) const;

 private:
  struct Plans;
  GridShape shape_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace fbmg
