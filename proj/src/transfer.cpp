#include "fbmg/transfer.hpp"

#include <stdexcept>
#include <string>

namespace fbmg {

namespace {

constexpr double kTap[3] = {0.5, 1.0, 0.5};

// Visits every (coarse, fine, weight) triple of the restriction matrix.
template <class Fn>
void for_each_tap(const GridShape& fine, const GridShape& coarse, Fn&& fn) {
  for (int R = 0; R < coarse.rows; ++R) {
    for (int C = 0; C < coarse.cols; ++C) {
      const std::size_t l = coarse.index(R, C);
      for (int a = -1; a <= 1; ++a) {
        const int r = 2 * R + a;
        if (r < 0 || r >= fine.rows) continue;
        for (int b = -1; b <= 1; ++b) {
          const int c = 2 * C + b;
          if (c < 0 || c >= fine.cols) continue;
          fn(l, fine.index(r, c), kTap[a + 1] * kTap[b + 1]);
        }
      }
    }
  }
}

template <class Field>
void require_shape(const Field& f, const GridShape& s, const char* what) {
  if (!(f.shape == s)) throw std::invalid_argument(std::string(what) + ": field shape mismatch");
}

}  // namespace

GridTransfer::GridTransfer(GridShape fine) : fine_(fine) {
  if (fine.rows < 3 || fine.cols < 3) {
    throw std::invalid_argument("grid transfer needs at least 3 pixels per axis, got " +
                                std::to_string(fine.rows) + "x" + std::to_string(fine.cols));
  }
  coarse_ = {coarse_dim(fine.rows), coarse_dim(fine.cols)};
}

ImageField GridTransfer::restrict(const ImageField& f) const {
  require_shape(f, fine_, "restrict");
  ImageField out(coarse_);
  for_each_tap(fine_, coarse_, [&](std::size_t l, std::size_t i, double w) { out.values[l] += w * f.values[i]; });
  return out;
}

DualField GridTransfer::restrict(const DualField& f) const {
  require_shape(f, fine_, "restrict");
  DualField out(coarse_);
  for_each_tap(fine_, coarse_, [&](std::size_t l, std::size_t i, double w) { out.values[l] += w * f.values[i]; });
  return out;
}

ImageField GridTransfer::prolong(const ImageField& g) const {
  require_shape(g, coarse_, "prolong");
  ImageField out(fine_);
  const double s = 1.0 / mu();
  for_each_tap(fine_, coarse_, [&](std::size_t l, std::size_t i, double w) { out.values[i] += s * w * g.values[l]; });
  return out;
}

DualField GridTransfer::prolong(const DualField& g) const {
  require_shape(g, coarse_, "prolong");
  DualField out(fine_);
  const double s = 1.0 / mu();
  for_each_tap(fine_, coarse_, [&](std::size_t l, std::size_t i, double w) { out.values[i] += (s * w) * g.values[l]; });
  return out;
}

std::vector<int> GridTransfer::fine_support(int coarse_index) const {
  if (coarse_index < 0 || static_cast<std::size_t>(coarse_index) >= coarse_.size())
    throw std::out_of_range("coarse index out of range");
  const int R = coarse_index / coarse_.cols;
  const int C = coarse_index % coarse_.cols;
  std::vector<int> out;
  out.reserve(9);
  for (int r = 2 * R - 1; r <= 2 * R + 1; ++r) {
    if (r < 0 || r >= fine_.rows) continue;
    for (int c = 2 * C - 1; c <= 2 * C + 1; ++c) {
      if (c < 0 || c >= fine_.cols) continue;
      out.push_back(static_cast<int>(fine_.index(r, c)));
    }
  }
  return out;
}

}  // namespace fbmg
