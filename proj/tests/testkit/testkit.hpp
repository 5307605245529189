#pragma once

// Brute-force oracles for the tests. Nothing here calls into the library's
// numerical kernels; inputs and outputs are converted through plain vectors.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "fbmg/core.hpp"

namespace fbmg::testkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

/// Column i is op(e_i). Throws std::length_error beyond 10^4 rows or columns.
Matrix dense_matrix_of(const std::function<Vector(const Vector&)>& op, int dim_in, int dim_out);

/// Image <-> vector in row-major order.
Vector to_vector(const ImageField& f);
ImageField image_from(const GridShape& shape, const Vector& v);
/// Dual fields stack all x components, then all y components.
Vector to_vector(const DualField& f);
DualField dual_from(const GridShape& shape, const Vector& v);

/// Forward differences with Neumann boundary, written out entry by entry (2n x n).
Matrix dense_gradient(const GridShape& shape);
/// Tensor product of the 1-D [1/2 1 1/2] stencil at even fine indices.
Matrix dense_restriction(const GridShape& fine);
/// Same restriction applied to both components of a dual field.
Matrix dense_dual_restriction(const GridShape& fine);
/// Unitary 2-D DFT acting on row-major vectors.
CMatrix dense_dft(const GridShape& shape);

/// Quadratic data term 1/2 y^T T y - e^T y built from raw samples.
struct DenseProblem {
  GridShape shape;
  Matrix T;
  Vector e;
};
DenseProblem dense_denoising(const ImageField& b);
/// T = Re sum_s (S_s F)^* (S_s F), e = Re sum_s (S_s F)^* b_s with S_s keeping
/// the listed k-space rows.
DenseProblem dense_mri(const GridShape& shape, const std::vector<std::vector<int>>& lines,
                       const std::vector<std::vector<std::complex<double>>>& data);

/// Minimises 1/2 y^T T y - e^T y + alpha sum_i |(grad y)_i| by damped Newton on
/// the smoothed norm sqrt(|g|^2 + eps^2), continuing eps down to 1e-10.
/// Grids up to 16 x 16.
Vector primal_tv_solve_small(const DenseProblem& problem, double alpha, int newton_iters = 200);

/// Central differences of f at x.
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// Sampled polar and bipolar membership of a finite vector set.
///
/// Both cones are evaluated on `directions` equally spaced unit probes. A
/// probe within the angular band of a cone boundary is reported Ambiguous.
class BipolarProbe {
 public:
  enum class Verdict { In, Out, Ambiguous };

  explicit BipolarProbe(std::vector<Vec2> vectors, int directions = 360, double band_degrees = 2.0);

  Verdict polar(Vec2 w) const;
  Verdict bipolar(Vec2 u) const;
  const std::vector<Vec2>& probes() const { return probes_; }

 private:
  std::vector<Vec2> unit_vectors_;
  std::vector<Vec2> probes_;
  std::vector<Vec2> polar_inner_;
  std::vector<Vec2> polar_outer_;
  double delta_;
};

/// Variational-inequality check of a claimed projection `proj` of `point`
/// onto Omega = anchor + polar(ccone(directors)): proj must lie in Omega and
/// <point - proj, omega - proj> <= tol for sampled omega in Omega, including
/// the extreme rays of the polar cone.
bool projection_vi_check(Vec2 point, Vec2 proj, Vec2 anchor, const std::vector<Vec2>& directors,
                         std::mt19937_64& rng, int samples = 100, double tol = 1e-10);

/// 0-9 vectors of norm alpha: random directions mixed with repeats,
/// opposites and near-collinear perturbations of earlier members.
std::vector<Vec2> random_director_set(std::mt19937_64& rng, double alpha);

/// Uniform doubles in [lo, hi).
std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi);

/// Random dual field with every pixel norm at most alpha, a share of them
/// exactly on the boundary.
DualField random_feasible(const GridShape& shape, double alpha, double boundary_share, std::mt19937_64& rng);

}  // namespace fbmg::testkit
