#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "ldg/director.hpp"
#include "ldg/rotation.hpp"

using namespace ldg;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

Vec3 approx_node(const Grid& g, const Vec3& x) {
  auto snap = [&](double c) {
    return static_cast<int>(std::lround((c + 0.5 * g.L) / g.h()));
  };
  return g.point(snap(x[0]), snap(x[1]), snap(x[2]));
}
}  // namespace

TEST_CASE("rotation group axioms") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Vec3 ax = {unif(rng), unif(rng), unif(rng)};
    if (norm3(ax) < 1e-3) continue;
    Rotation q = Rotation::from_axis_angle(ax, 3.0 * unif(rng));
    CHECK(std::abs(q.norm() - 1.0) <= 1e-12);
    Rotation qi = q * q.inverse();
    CHECK(same_rotation(qi, Rotation::identity(), 1e-12));
    Vec3 v = {unif(rng), unif(rng), unif(rng)};
    Vec3 rv = q.rotate(v);
    CHECK(norm3(rv) == Approx(norm3(v)).epsilon(1e-12));
    Vec3 back = q.rotate_back(rv);
    for (int d = 0; d < 3; ++d) CHECK(back[d] == Approx(v[d]).margin(1e-12));
  }
}

TEST_CASE("helical field point values") {
  Vec3 v0 = helical_value(Rotation::identity(), 2.0, {0, 0, 0});
  CHECK(v0[0] == Approx(1.0));
  CHECK(v0[1] == Approx(0.0).margin(1e-15));
  CHECK(v0[2] == Approx(0.0).margin(1e-15));

  Vec3 v1 = helical_value(Rotation::identity(), kPi, {0, 0, 1});
  CHECK(v1[0] == Approx(-1.0));
  CHECK(v1[1] == Approx(0.0).margin(1e-12));

  Rotation qz = Rotation::from_axis_angle({0, 0, 1}, 0.5 * kPi);
  Vec3 v2 = helical_value(qz, 1.0, {0, 0, 0});
  CHECK(v2[0] == Approx(0.0).margin(1e-12));
  CHECK(v2[1] == Approx(1.0));
  CHECK(v2[2] == Approx(0.0).margin(1e-15));
}

TEST_CASE("helical field is unit norm at every node") {
  Grid g = build_grid(17, 1.0);
  Rotation q = Rotation::from_axis_angle({1, 2, 3}, 0.8);
  VectorField n = helical_field({q, 2.0}, g);
  double worst = 0;
  for (const Vec3& v : n.v) worst = std::max(worst, std::abs(norm3(v) - 1.0));
  CHECK(worst <= 1e-14);
}

TEST_CASE("verify_ctau on the helical family") {
  Grid g = build_grid(33, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.0}, g);
  CtauResiduals r = verify_ctau(n, 1.0, g);
  double h2 = g.h() * g.h();
  CHECK(r.curl_residual <= 1.0 * h2);
  CHECK(r.div_residual <= 1.0 * h2);
  CHECK(r.norm_residual <= 1e-14);
}

TEST_CASE("verify_ctau flags a constant field") {
  Grid g = build_grid(9, 1.0);
  VectorField e3(g, Vec3{0, 0, 1});
  CtauResiduals r = verify_ctau(e3, 1.0, g);
  CHECK(r.curl_residual == Approx(1.0));
  CHECK(r.div_residual <= 1e-13);
}

TEST_CASE("radial field lies in the tau=0 family") {
  Grid g = build_grid(33, 1.0);
  VectorField n = radial_field({0, 0, 2}, g);
  CtauResiduals r = verify_ctau(n, 0.0, g);
  CHECK(r.curl_residual <= 2.0 * g.h() * g.h());
  CHECK(r.norm_residual <= 1e-14);
}

TEST_CASE("radial field point values and preconditions") {
  Grid g = build_grid(9, 1.0);
  VectorField n = radial_field({0, 0, 2}, g);
  Vec3 center = n(4, 4, 4);
  CHECK(center[2] == Approx(-1.0));

  CHECK_THROWS_AS(radial_field({0, 0, 0.4}, g), std::invalid_argument);
  CHECK_THROWS_AS(radial_field({0.5, 0, 0}, g), std::invalid_argument);

  VectorField n2 = radial_field({3, 0, 0}, g);
  Vec3 face = n2(8, 4, 4);  // node (0.5, 0, 0)
  CHECK(face[0] == Approx(-1.0));
  CHECK(face[1] == Approx(0.0).margin(1e-15));
}

TEST_CASE("so3_sample counts and special cases") {
  auto only = so3_sample({1, 1, 1});
  REQUIRE(only.size() == 1);
  CHECK(same_rotation(only[0], Rotation::identity(), 1e-12));

  auto eight = so3_sample({2, 4, 1});
  REQUIRE(eight.size() == 8);
  for (const auto& q : eight) CHECK(std::abs(q.norm() - 1.0) <= 1e-12);

  auto phases = so3_sample({1, 1, 4});
  REQUIRE(phases.size() == 4);
  for (int k = 0; k < 4; ++k) {
    double alpha = 0.5 * kPi * k;
    Vec3 v = phases[k].rotate({1, 0, 0});
    CHECK(v[0] == Approx(std::cos(alpha)).margin(1e-12));
    CHECK(v[1] == Approx(std::sin(alpha)).margin(1e-12));
  }

  CHECK_THROWS_AS(so3_sample({0, 1, 1}), std::invalid_argument);
}

TEST_CASE("helical equivariance under the cube symmetries") {
  Grid g = build_grid(9, 1.0);
  auto group = cube_symmetries();
  REQUIRE(group.size() == 24);
  double tau = 1.3;
  VectorField base = helical_field({Rotation::identity(), tau}, g);
  for (const Rotation& s : group) {
    VectorField rotated = helical_field({s, tau}, g);
    double worst = 0;
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          Vec3 x = g.point(i, j, k);
          Vec3 y = approx_node(g, s.rotate_back(x));
          // y is again a node; compare S * n_id(y) with the rotated field.
          auto snap = [&](double c) {
            return static_cast<int>(std::lround((c + 0.5 * g.L) / g.h()));
          };
          Vec3 ref = s.rotate(base(snap(y[0]), snap(y[1]), snap(y[2])));
          Vec3 got = rotated(i, j, k);
          worst = std::max(worst, norm3(sub3(got, ref)));
        }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("phase rotation equals translation along the helix axis") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    Vec3 ax = {unif(rng), unif(rng), unif(rng)};
    if (norm3(ax) < 1e-3) continue;
    Rotation q = Rotation::from_axis_angle(ax, 2.5 * unif(rng));
    double tau = 0.5 + std::abs(unif(rng));
    double alpha = 1.5 * unif(rng);
    Vec3 x = {unif(rng), unif(rng), unif(rng)};

    Rotation q_phase = q * Rotation::from_axis_angle({0, 0, 1}, alpha);
    Vec3 lhs = helical_value(q_phase, tau, x);

    Vec3 axis = q.rotate({0, 0, 1});
    Vec3 shifted = {x[0] + alpha / tau * axis[0], x[1] + alpha / tau * axis[1],
                    x[2] + alpha / tau * axis[2]};
    Vec3 rhs = helical_value(q, tau, shifted);
    for (int d = 0; d < 3; ++d) CHECK(lhs[d] == Approx(rhs[d]).margin(1e-11));
  }
}
