#pragma once

#include <span>
#include <vector>

#include "fbmg/core.hpp"
#include "fbmg/dataterm.hpp"
#include "fbmg/transfer.hpp"

namespace fbmg {

/// Subdifferential of the ball indicator at one fine pixel: {0} in the
/// interior, the ray {beta x_i : beta >= 0} on the boundary.
struct PixelSubdiff {
  enum class Kind { Interior, Boundary };
  Kind kind = Kind::Interior;
  Vec2 direction{};
};

/// Pixels with |x| >= alpha (1 - boundary_tol) count as Boundary. Throws
/// std::domain_error when |x| > alpha (1 + boundary_tol).
PixelSubdiff classify_pixel(Vec2 x, double alpha, double boundary_tol);

enum class ConeForm { Zero, Ray, TwoCone, HalfPlane, Full };

const char* to_string(ConeForm form);

/// Closed convex cone generated by the boundary directions over one coarse
/// pixel's fine support. Every such cone in R^2 is one of five forms:
///   Zero       {0}
///   Ray        ccone{zj}
///   TwoCone    ccone{zj, zs}; a line when `opposing` is set (zs = -c zj)
///   HalfPlane  ccone{zj, zs, -zj}
///   Full       R^2
/// zj_o and zs_o are unit vectors orthogonal to zj and zs with
/// sup_{z in cone} <z, z_o> <= 0 (set for TwoCone and HalfPlane).
struct ConeClass {
  ConeForm form = ConeForm::Zero;
  Vec2 zj{};
  Vec2 zs{};
  Vec2 zj_o{};
  Vec2 zs_o{};
  bool opposing = false;

  /// Membership in the cone; `tol` is an angular tolerance on unit vectors.
  bool contains(Vec2 v, double tol) const;
  /// Membership in the polar cone {w : <w, z> <= 0 for all z in the cone}.
  bool polar_contains(Vec2 w, double tol) const;
  /// Generators whose conic hull is the cone (the line case lists both signs).
  std::vector<Vec2> generators() const;
};

/// Classifies ccone of the given directions by adding them one at a time and
/// resolving each three-director configuration through z_j b1 + z_s b2 = z_p.
/// `cone_tol` is the relative tolerance for collinearity and coefficient signs.
ConeClass reduce_directors(std::span<const Vec2> directions, double cone_tol);

/// p(v, z) = max(0, <v, z>) z / |z|^2, the projection of v onto z[0, inf).
Vec2 project_to_ray(Vec2 v, Vec2 z);

/// Euclidean projection of zeta onto anchor + polar(cone).
Vec2 project_to_constraint(Vec2 zeta, Vec2 anchor, const ConeClass& cone);

struct CoarseTolerances {
  double boundary_tol = 1e-9;
  double cone_tol = 1e-9;
};

/// Coarse problem built at one fine iterate: F_H^k + G_H^k with
/// G_H^k the indicator of prod_l (anchor_l + polar(cone_l)) and
/// F_H^k(zeta) = F_H(zeta) + <shift, zeta - anchor>.
struct CoarseModel {
  GridTransfer transfer;
  DataTerm coarse_data;
  std::vector<ConeClass> cones;
  DualField anchor;
  DualField shift;
  /// I_h^H grad F(x^k).
  DualField restricted_gradient;
  /// Lipschitz constant L_H of grad F_H.
  double lipschitz = 0.0;
};

/// Cone of coarse pixel l from the fine iterate over A_l.
ConeClass coarse_pixel_cone(const DualField& x, const GridTransfer& transfer, int coarse_index, double alpha,
                            const CoarseTolerances& tol);

CoarseModel build_coarse_model(const DualField& x, const DualField& fine_gradient, const DataTerm& coarse_data,
                               const GridTransfer& transfer, double alpha, const CoarseTolerances& tol = {});

CoarseModel build_coarse_model(const DualField& x, const DataTerm& fine_data, const DataTerm& coarse_data,
                               const GridTransfer& transfer, double alpha, const CoarseTolerances& tol = {});

/// Proximal map of G_H^k: pixelwise projection onto anchor_l + polar(cone_l).
/// Independent of the step length.
DualField prox_coarse(const DualField& zeta, const CoarseModel& model);

/// F_H(zeta) = 1/2 |T_H^{-1/2}(grad_H^* zeta - e_H)|^2.
double coarse_smooth_value(const DualField& zeta, const CoarseModel& model);
DualField coarse_smooth_gradient(const DualField& zeta, const CoarseModel& model);

/// G_H^k(zeta): 0 when every pixel satisfies the coarse constraint, +inf otherwise.
double coarse_constraint_value(const DualField& zeta, const CoarseModel& model, double tol = 1e-10);

struct CoarseRun {
  DualField zeta;
  /// sum_j |zeta^{j+1} - zeta^j|^2
  double step_sq_sum = 0.0;
};

/// m forward-backward steps on the coarse problem starting at the anchor.
CoarseRun coarse_fb_iterate(const CoarseModel& model, int m, double tau_coarse);

}  // namespace fbmg
