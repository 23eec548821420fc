#pragma once

#include <cmath>
#include <stdexcept>

#include "ldg/grid.hpp"
#include "ldg/rotation.hpp"

namespace ldg {

/// A helical director: axis/phase given by the rotation, pitch by tau.
struct HelicalSpec {
  Rotation rotation;
  double tau = 1.0;
};

/// Value of the helical director Q (cos(tau y3), sin(tau y3), 0) with
/// y = Q^T x, at an arbitrary point. Unit norm by construction.
inline Vec3 helical_value(const Rotation& q, double tau, const Vec3& x) {
  Vec3 y = q.rotate_back(x);
  double c = std::cos(tau * y[2]);
  double s = std::sin(tau * y[2]);
  return q.rotate({c, s, 0.0});
}

inline VectorField helical_field(const HelicalSpec& spec, const Grid& g) {
  VectorField out(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i)
        out(i, j, k) = helical_value(spec.rotation, spec.tau, g.point(i, j, k));
  return out;
}

/// Radial unit field (x-a)/|x-a| for a center strictly outside the cube.
/// A curl-free member of the tau = 0 family.
inline VectorField radial_field(const Vec3& a, const Grid& g) {
  double d0 = 0;
  for (int d = 0; d < 3; ++d) {
    double excess = std::abs(a[d]) - 0.5 * g.L;
    if (excess > 0) d0 += excess * excess;
  }
  if (!(std::sqrt(d0) > 0))
    throw std::invalid_argument("radial_field: center must lie outside the closed cube");
  VectorField out(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        Vec3 r = sub3(g.point(i, j, k), a);
        double nr = norm3(r);
        out(i, j, k) = {r[0] / nr, r[1] / nr, r[2] / nr};
      }
  return out;
}

/// Residuals of the helical-family defining identities:
///   curl n + tau n = 0,  div n = 0,  |n| = 1
/// measured in the max norm. Report only; thresholds live in the tests.
struct CtauResiduals {
  double curl_residual = 0;
  double div_residual = 0;
  double norm_residual = 0;
};

inline CtauResiduals verify_ctau(const VectorField& n, double tau, const Grid& g) {
  require_same_grid(n.grid, g, "verify_ctau");
  VectorField c = apply_curl(n, g);
  RealField dv = apply_div(n, g);
  CtauResiduals r;
  for (int m = 0; m < g.nodes(); ++m) {
    Vec3 res = {c.v[m][0] + tau * n.v[m][0], c.v[m][1] + tau * n.v[m][1],
                c.v[m][2] + tau * n.v[m][2]};
    r.curl_residual = std::max(r.curl_residual, norm3(res));
    r.div_residual = std::max(r.div_residual, std::abs(dv.v[m]));
    r.norm_residual = std::max(r.norm_residual, std::abs(norm3(n.v[m]) - 1.0));
  }
  return r;
}

}  // namespace ldg
