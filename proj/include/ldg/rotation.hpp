#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ldg/grid.hpp"

namespace ldg {

/// Unit quaternion (w, x, y, z) acting on R^3.
struct Rotation {
  double w = 1, x = 0, y = 0, z = 0;

  static Rotation identity() { return {}; }

  static Rotation from_axis_angle(const Vec3& axis, double angle) {
    double n = norm3(axis);
    if (n == 0) throw std::invalid_argument("rotation: zero axis");
    double s = std::sin(0.5 * angle) / n;
    return Rotation{std::cos(0.5 * angle), axis[0] * s, axis[1] * s, axis[2] * s};
  }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Rotation normalized() const {
    double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Rotation conjugate() const { return {w, -x, -y, -z}; }
  Rotation inverse() const { return conjugate(); }

  // Hamilton product; (a*b) rotates first by b, then by a.
  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // q v q^-1 via the expanded cross-product form.
    Vec3 u = {x, y, z};
    Vec3 c = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
              u[0] * v[1] - u[1] * v[0]};
    Vec3 cc = {u[1] * c[2] - u[2] * c[1], u[2] * c[0] - u[0] * c[2],
               u[0] * c[1] - u[1] * c[0]};
    return {v[0] + 2 * (w * c[0] + cc[0]), v[1] + 2 * (w * c[1] + cc[1]),
            v[2] + 2 * (w * c[2] + cc[2])};
  }

  // Action of the transposed (inverse) rotation.
  Vec3 rotate_back(const Vec3& v) const { return conjugate().rotate(v); }
};

inline bool same_rotation(const Rotation& a, const Rotation& b, double tol = 1e-9) {
  // q and -q define the same rotation.
  double dp = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
  return std::abs(std::abs(dp) - 1.0) < tol;
}

/// Coordinates on the reduced search space for helical directors:
/// helix axis (polar, azimuth) on the upper hemisphere and a phase angle
/// about the axis.
struct AxisPhase {
  double polar = 0;
  double azimuth = 0;
  double phase = 0;

  Rotation rotation() const {
    Rotation rz_az = Rotation::from_axis_angle({0, 0, 1}, azimuth);
    Rotation ry_po = Rotation::from_axis_angle({0, 1, 0}, polar);
    Rotation rz_ph = Rotation::from_axis_angle({0, 0, 1}, phase);
    return rz_az * ry_po * rz_ph;
  }
};

struct So3Resolution {
  int n_polar = 1;
  int n_azimuth = 1;
  int n_phase = 1;
};

/// Deterministic covering of the reduced SO(3) search space:
/// polar in [0, pi/2), azimuth in [0, 2pi), phase in [0, 2pi).
inline std::vector<Rotation> so3_sample(const So3Resolution& res) {
  if (res.n_polar < 1 || res.n_azimuth < 1 || res.n_phase < 1)
    throw std::invalid_argument("so3_sample: all counts must be >= 1");
  std::vector<Rotation> out;
  out.reserve(static_cast<std::size_t>(res.n_polar) * res.n_azimuth * res.n_phase);
  const double pi = std::numbers::pi;
  for (int ip = 0; ip < res.n_polar; ++ip)
    for (int ia = 0; ia < res.n_azimuth; ++ia)
      for (int ik = 0; ik < res.n_phase; ++ik) {
        AxisPhase c{0.5 * pi * ip / res.n_polar, 2.0 * pi * ia / res.n_azimuth,
                    2.0 * pi * ik / res.n_phase};
        out.push_back(c.rotation());
      }
  return out;
}

inline std::vector<AxisPhase> so3_sample_coords(const So3Resolution& res) {
  if (res.n_polar < 1 || res.n_azimuth < 1 || res.n_phase < 1)
    throw std::invalid_argument("so3_sample: all counts must be >= 1");
  std::vector<AxisPhase> out;
  const double pi = std::numbers::pi;
  for (int ip = 0; ip < res.n_polar; ++ip)
    for (int ia = 0; ia < res.n_azimuth; ++ia)
      for (int ik = 0; ik < res.n_phase; ++ik)
        out.push_back({0.5 * pi * ip / res.n_polar, 2.0 * pi * ia / res.n_azimuth,
                       2.0 * pi * ik / res.n_phase});
  return out;
}

/// The 24 rotations of the cube group, generated from quarter turns.
inline std::vector<Rotation> cube_symmetries() {
  const double pi = std::numbers::pi;
  std::vector<Rotation> gens = {
      Rotation::from_axis_angle({1, 0, 0}, 0.5 * pi),
      Rotation::from_axis_angle({0, 1, 0}, 0.5 * pi),
      Rotation::from_axis_angle({0, 0, 1}, 0.5 * pi)};
  std::vector<Rotation> group = {Rotation::identity()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < group.size(); ++i)
      for (const auto& gen : gens) {
        Rotation cand = (gen * group[i]).normalized();
        bool found = false;
        for (const auto& r : group)
          if (same_rotation(r, cand)) { found = true; break; }
        if (!found) {
          group.push_back(cand);
          grew = true;
        }
      }
  }
  return group;
}

}  // namespace ldg
