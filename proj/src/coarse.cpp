#include "fbmg/coarse.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fbmg/tv_ops.hpp"

namespace fbmg {

PixelSubdiff classify_pixel(Vec2 x, double alpha, double boundary_tol) {
  const double n = norm(x);
  if (n > alpha * (1.0 + boundary_tol)) throw std::domain_error("classify_pixel: pixel outside the dual ball");
  if (n >= alpha * (1.0 - boundary_tol)) return {PixelSubdiff::Kind::Boundary, x};
  return {PixelSubdiff::Kind::Interior, {}};
}

const char* to_string(ConeForm form) {
  switch (form) {
    case ConeForm::Zero: return "zero";
    case ConeForm::Ray: return "ray";
    case ConeForm::TwoCone: return "two-cone";
    case ConeForm::HalfPlane: return "half-plane";
    case ConeForm::Full: return "full";
  }
  return "?";
}

namespace {

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return n > 0.0 ? (1.0 / n) * v : Vec2{};
}

// Unit normal of a, oriented so that <side, result> <= 0.
Vec2 outward_normal(Vec2 a, Vec2 side) {
  Vec2 o = unit(perp(a));
  if (dot(side, o) > 0.0) o = -o;
  return o;
}

ConeClass make_ray(Vec2 a) {
  ConeClass c;
  c.form = ConeForm::Ray;
  c.zj = a;
  return c;
}

ConeClass make_two_cone(Vec2 a, Vec2 b, bool opposing) {
  ConeClass c;
  c.form = ConeForm::TwoCone;
  c.zj = a;
  c.zs = b;
  c.opposing = opposing;
  if (opposing) {
    c.zj_o = unit(perp(a));
    c.zs_o = -c.zj_o;
  } else {
    c.zj_o = outward_normal(a, b);
    c.zs_o = outward_normal(b, a);
  }
  return c;
}

ConeClass make_half_plane(Vec2 line, Vec2 side) {
  ConeClass c;
  c.form = ConeForm::HalfPlane;
  c.zj = line;
  c.zs = side;
  c.zj_o = outward_normal(line, side);
  return c;
}

ConeClass make_full() {
  ConeClass c;
  c.form = ConeForm::Full;
  return c;
}

// Coefficients of v in the basis (a, b); all three are unit vectors.
struct Coeffs {
  double b1;
  double b2;
};

Coeffs solve_2x2(Vec2 a, Vec2 b, Vec2 v) {
  const double det = cross(a, b);
  return {cross(v, b) / det, cross(a, v) / det};
}

int sign_with_tol(double v, double tol) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

}  // namespace

bool ConeClass::contains(Vec2 v, double tol) const {
  if (norm(v) == 0.0) return true;
  const Vec2 u = unit(v);
  switch (form) {
    case ConeForm::Zero:
      return false;
    case ConeForm::Ray:
      return std::abs(cross(unit(zj), u)) <= tol && dot(zj, u) > 0.0;
    case ConeForm::TwoCone: {
      const Vec2 a = unit(zj);
      if (opposing) return std::abs(cross(a, u)) <= tol;
      const Coeffs k = solve_2x2(a, unit(zs), u);
      return k.b1 >= -tol && k.b2 >= -tol;
    }
    case ConeForm::HalfPlane:
      return dot(u, zj_o) <= tol;
    case ConeForm::Full:
      return true;
  }
  return false;
}

std::vector<Vec2> ConeClass::generators() const {
  switch (form) {
    case ConeForm::Zero: return {};
    case ConeForm::Ray: return {zj};
    case ConeForm::TwoCone: return {zj, zs};
    case ConeForm::HalfPlane: return {zj, zs, -zj};
    case ConeForm::Full: return {Vec2{1, 0}, Vec2{0, 1}, Vec2{-1, 0}, Vec2{0, -1}};
  }
  return {};
}

bool ConeClass::polar_contains(Vec2 w, double tol) const {
  if (norm(w) == 0.0) return true;
  const Vec2 u = unit(w);
  for (Vec2 g : generators())
    if (dot(u, unit(g)) > tol) return false;
  return true;
}

ConeClass reduce_directors(std::span<const Vec2> directions, double cone_tol) {
  ConeClass cone;
  for (Vec2 raw : directions) {
    if (cone.form == ConeForm::Full) break;
    if (norm(raw) == 0.0) continue;
    const Vec2 p = unit(raw);
    switch (cone.form) {
      case ConeForm::Zero:
        cone = make_ray(raw);
        break;
      case ConeForm::Ray: {
        const Vec2 a = unit(cone.zj);
        if (std::abs(cross(a, p)) <= cone_tol) {
          // Collinear: a positive multiple is superfluous, an opposite one
          // makes the cone a line.
          if (dot(a, p) < 0.0) cone = make_two_cone(cone.zj, raw, true);
        } else {
          cone = make_two_cone(cone.zj, raw, false);
        }
        break;
      }
      case ConeForm::TwoCone: {
        const Vec2 a = unit(cone.zj);
        if (cone.opposing) {
          if (std::abs(cross(a, p)) > cone_tol) cone = make_half_plane(cone.zj, raw);
          break;
        }
        const Coeffs k = solve_2x2(a, unit(cone.zs), p);
        const int s1 = sign_with_tol(k.b1, cone_tol);
        const int s2 = sign_with_tol(k.b2, cone_tol);
        if (s1 >= 0 && s2 >= 0) {
          // z_p lies in ccone{z_j, z_s}.
        } else if (s1 > 0 && s2 < 0) {
          cone = make_two_cone(cone.zs, raw, false);  // z_j in ccone{z_s, z_p}
        } else if (s1 < 0 && s2 > 0) {
          cone = make_two_cone(cone.zj, raw, false);  // z_s in ccone{z_j, z_p}
        } else if (s1 == 0 && s2 < 0) {
          cone = make_half_plane(cone.zs, cone.zj);  // z_p = -z_s
        } else if (s1 < 0 && s2 == 0) {
          cone = make_half_plane(cone.zj, cone.zs);  // z_p = -z_j
        } else {
          cone = make_full();  // both negative: the three vectors span R^2 positively
        }
        break;
      }
      case ConeForm::HalfPlane:
        if (dot(p, cone.zj_o) > cone_tol) cone = make_full();
        break;
      case ConeForm::Full:
        break;
    }
  }
  return cone;
}

Vec2 project_to_ray(Vec2 v, Vec2 z) {
  const double zz = dot(z, z);
  if (zz == 0.0) return {};
  return (std::max(0.0, dot(v, z)) / zz) * z;
}

Vec2 project_to_constraint(Vec2 zeta, Vec2 anchor, const ConeClass& cone) {
  const Vec2 v = zeta - anchor;
  switch (cone.form) {
    case ConeForm::Zero:
      return zeta;
    case ConeForm::Ray:
      return zeta - project_to_ray(v, cone.zj);
    case ConeForm::HalfPlane:
      return anchor + project_to_ray(v, cone.zj_o);
    case ConeForm::Full:
      return anchor;
    case ConeForm::TwoCone: {
      if (cone.opposing) {
        const Vec2 a = unit(cone.zj);
        return anchor + (v - dot(v, a) * a);
      }
      const Coeffs k = solve_2x2(unit(cone.zj), unit(cone.zs), v);
      if (k.b1 >= 0.0 && k.b2 >= 0.0) return anchor;
      if (dot(v, cone.zj) <= 0.0 && dot(v, cone.zs) <= 0.0) return zeta;
      if (dot(v, cone.zj) >= 0.0 && dot(v, cone.zj_o) >= 0.0) return anchor + project_to_ray(v, cone.zj_o);
      return anchor + project_to_ray(v, cone.zs_o);
    }
  }
  return zeta;
}

ConeClass coarse_pixel_cone(const DualField& x, const GridTransfer& transfer, int coarse_index, double alpha,
                            const CoarseTolerances& tol) {
  Vec2 directions[9];
  std::size_t count = 0;
  for (int i : transfer.fine_support(coarse_index)) {
    const PixelSubdiff s = classify_pixel(x.values[i], alpha, tol.boundary_tol);
    if (s.kind == PixelSubdiff::Kind::Boundary) directions[count++] = s.direction;
  }
  return reduce_directors(std::span<const Vec2>(directions, count), tol.cone_tol);
}

CoarseModel build_coarse_model(const DualField& x, const DualField& fine_gradient, const DataTerm& coarse_data,
                               const GridTransfer& transfer, double alpha, const CoarseTolerances& tol) {
  if (!(x.shape == transfer.fine()) || !(fine_gradient.shape == transfer.fine()))
    throw std::invalid_argument("build_coarse_model: fine field shape mismatch");
  if (!(coarse_data.shape() == transfer.coarse()))
    throw std::invalid_argument("build_coarse_model: coarse data term shape mismatch");

  CoarseModel model{transfer, coarse_data, {}, {}, {}, {}, coarse_data.lipschitz()};
  const std::size_t n_coarse = transfer.coarse().size();
  model.cones.reserve(n_coarse);
  for (std::size_t l = 0; l < n_coarse; ++l)
    model.cones.push_back(coarse_pixel_cone(x, transfer, static_cast<int>(l), alpha, tol));

  model.anchor = transfer.restrict(x);
  model.restricted_gradient = transfer.restrict(fine_gradient);
  model.shift = axpy(model.restricted_gradient, -1.0, smooth_dual_gradient(model.anchor, coarse_data));
  return model;
}

CoarseModel build_coarse_model(const DualField& x, const DataTerm& fine_data, const DataTerm& coarse_data,
                               const GridTransfer& transfer, double alpha, const CoarseTolerances& tol) {
  return build_coarse_model(x, smooth_dual_gradient(x, fine_data), coarse_data, transfer, alpha, tol);
}

DualField prox_coarse(const DualField& zeta, const CoarseModel& model) {
  if (!(zeta.shape == model.anchor.shape)) throw std::invalid_argument("prox_coarse: shape mismatch");
  DualField out(zeta.shape);
  for (std::size_t l = 0; l < zeta.size(); ++l)
    out.values[l] = project_to_constraint(zeta.values[l], model.anchor.values[l], model.cones[l]);
  return out;
}

double coarse_smooth_value(const DualField& zeta, const CoarseModel& model) {
  return smooth_dual_value(zeta, model.coarse_data);
}

DualField coarse_smooth_gradient(const DualField& zeta, const CoarseModel& model) {
  return smooth_dual_gradient(zeta, model.coarse_data);
}

double coarse_constraint_value(const DualField& zeta, const CoarseModel& model, double tol) {
  for (std::size_t l = 0; l < zeta.size(); ++l) {
    if (!model.cones[l].polar_contains(zeta.values[l] - model.anchor.values[l], tol))
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

CoarseRun coarse_fb_iterate(const CoarseModel& model, int m, double tau_coarse) {
  if (m < 0) throw std::invalid_argument("coarse_fb_iterate: negative step count");
  CoarseRun run{model.anchor, 0.0};
  for (int j = 0; j < m; ++j) {
    DualField step = coarse_smooth_gradient(run.zeta, model);
    for (std::size_t l = 0; l < step.size(); ++l)
      step.values[l] = run.zeta.values[l] - tau_coarse * (step.values[l] + model.shift.values[l]);
    DualField next = prox_coarse(step, model);
    run.step_sq_sum += squared_norm(axpy(next, -1.0, run.zeta));
    run.zeta = std::move(next);
  }
  return run;
}

}  // namespace fbmg
