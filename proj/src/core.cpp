#include "fbmg/core.hpp"

#include <string>

namespace fbmg {

void GridShape::validate() const {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("grid must be at least 2x2, got " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
}

ImageField::ImageField(GridShape s, std::vector<double> v) : shape(s), values(std::move(v)) {
  if (values.size() != shape.size()) throw std::invalid_argument("image size does not match shape");
}

DualField::DualField(GridShape s, std::vector<Vec2> v) : shape(s), values(std::move(v)) {
  if (values.size() != shape.size()) throw std::invalid_argument("dual field size does not match shape");
}

namespace {

template <class Field>
void require_same_shape(const Field& a, const Field& b) {
  if (!(a.shape == b.shape)) throw std::invalid_argument("field shapes differ");
}

}  // namespace

double inner(const ImageField& a, const ImageField& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

double inner(const DualField& a, const DualField& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot(a.values[i], b.values[i]);
  return s;
}

double squared_norm(const ImageField& a) { return inner(a, a); }
double squared_norm(const DualField& a) { return inner(a, a); }

ImageField axpy(const ImageField& a, double s, const ImageField& b) {
  require_same_shape(a, b);
  ImageField out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] += s * b.values[i];
  return out;
}

DualField axpy(const DualField& a, double s, const DualField& b) {
  require_same_shape(a, b);
  DualField out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] += s * b.values[i];
  return out;
}

bool all_finite(const ImageField& a) {
  for (double v : a.values)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const DualField& a) {
  for (Vec2 v : a.values)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
  return true;
}

Vec2 project_ball(Vec2 v, double alpha) {
  const double n = norm(v);
  if (n <= alpha) return v;
  return (alpha / n) * v;
}

DualField project_balls(const DualField& x, double alpha) {
  DualField out(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) out.values[i] = project_ball(x.values[i], alpha);
  return out;
}

bool is_feasible(const DualField& x, double alpha, double boundary_tol) {
  const double limit = alpha * (1.0 + boundary_tol);
  for (Vec2 v : x.values)
    if (!(norm(v) <= limit)) return false;
  return true;
}

double relative_error(double v, double v0, double vstar) {
  if (!(v0 > vstar)) throw std::domain_error("relative_error: v0 <= vstar, problem already solved");
  return (v - vstar) / (v0 - vstar);
}

}  // namespace fbmg
