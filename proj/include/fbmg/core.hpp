#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fbmg {

/// Pixel grid geometry. Pixels are stored row-major: index = r * cols + c.
struct GridShape {
  int rows = 0;
  int cols = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols + c; }

  /// Throws std::invalid_argument unless rows >= 2 and cols >= 2.
  void validate() const;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// A 2-vector; one per pixel in a dual field.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise rotation by 90 degrees.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Real scalar image on a grid (a single colour channel).
struct ImageField {
  GridShape shape;
  std::vector<double> values;

  ImageField() = default;
  explicit ImageField(GridShape s, double fill = 0.0) : shape(s), values(s.size(), fill) {}
  ImageField(GridShape s, std::vector<double> v);

  double& operator()(int r, int c) { return values[shape.index(r, c)]; }
  double operator()(int r, int c) const { return values[shape.index(r, c)]; }
  std::size_t size() const { return values.size(); }
};

/// Dual variable: one 2-vector per pixel. Component x is the row-direction
/// difference, component y the column-direction difference.
struct DualField {
  GridShape shape;
  std::vector<Vec2> values;

  DualField() = default;
  explicit DualField(GridShape s) : shape(s), values(s.size()) {}
  DualField(GridShape s, std::vector<Vec2> v);

  Vec2& operator()(int r, int c) { return values[shape.index(r, c)]; }
  Vec2 operator()(int r, int c) const { return values[shape.index(r, c)]; }
  std::size_t size() const { return values.size(); }
};

double inner(const ImageField& a, const ImageField& b);
double inner(const DualField& a, const DualField& b);
double squared_norm(const ImageField& a);
double squared_norm(const DualField& a);

/// a + s * b, shapes must match.
ImageField axpy(const ImageField& a, double s, const ImageField& b);
DualField axpy(const DualField& a, double s, const DualField& b);

bool all_finite(const ImageField& a);
bool all_finite(const DualField& a);

/// Euclidean projection onto the closed ball B(0, alpha).
Vec2 project_ball(Vec2 v, double alpha);

/// Pixelwise projection of a dual field onto the product of balls.
DualField project_balls(const DualField& x, double alpha);

/// True when every pixel satisfies |x_i| <= alpha * (1 + boundary_tol).
bool is_feasible(const DualField& x, double alpha, double boundary_tol = 1e-12);

/// (v - vstar) / (v0 - vstar). Throws std::domain_error when v0 <= vstar,
/// which means the starting point already solves the problem.
double relative_error(double v, double v0, double vstar);

inline constexpr double kDefaultBoundaryTol = 1e-12;

}  // namespace fbmg
