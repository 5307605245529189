#include "fbmg/tv_ops.hpp"

namespace fbmg {

DualField gradient(const ImageField& y) {
  const GridShape s = y.shape;
  DualField g(s);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const double v = y(r, c);
      Vec2& out = g(r, c);
      out.x = (r + 1 < s.rows) ? y(r + 1, c) - v : 0.0;
      out.y = (c + 1 < s.cols) ? y(r, c + 1) - v : 0.0;
    }
  }
  return g;
}

ImageField divergence_adjoint(const DualField& x) {
  const GridShape s = x.shape;
  ImageField out(s);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const Vec2 v = x(r, c);
      if (r + 1 < s.rows) {
        out(r + 1, c) += v.x;
        out(r, c) -= v.x;
      }
      if (c + 1 < s.cols) {
        out(r, c + 1) += v.y;
        out(r, c) -= v.y;
      }
    }
  }
  return out;
}

double tv_norm(const DualField& g) {
  double s = 0.0;
  for (Vec2 v : g.values) s += norm(v);
  return s;
}

}  // namespace fbmg
