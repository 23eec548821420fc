#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "ldg/director.hpp"
#include "ldg/grid.hpp"
#include "test_support.hpp"

using namespace ldg;
using Catch::Approx;

TEST_CASE("build_grid basics") {
  Grid g = build_grid(9, 1.0);
  CHECK(g.h() == Approx(0.125).epsilon(1e-15));
  CHECK(g.nodes() == 729);
  CHECK(g.volume() == Approx(1.0));

  Grid g2 = build_grid(8, 2.0);
  CHECK(g2.h() == Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(g2.coord(0) == Approx(-1.0));
  CHECK(g2.coord(7) == Approx(1.0));

  CHECK_THROWS_AS(build_grid(7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(9, -1.0), std::invalid_argument);
}

TEST_CASE("node set symmetric under x -> -x") {
  Grid g = build_grid(10, 2.0);
  for (int i = 0; i < g.n; ++i)
    CHECK(g.coord(i) == Approx(-g.coord(g.n - 1 - i)).margin(1e-15));
}

TEST_CASE("distance_to_boundary") {
  Grid g = build_grid(9, 1.0);
  RealField d = distance_to_boundary(g);
  CHECK(d(4, 4, 4) == Approx(0.5));          // center
  CHECK(d(8, 4, 4) == Approx(0.0).margin(0));  // face node (0.5, 0, 0)
  // node (0.25, 0.1, -0.3) is not on this lattice; check the formula directly
  Grid g2 = build_grid(21, 1.0);
  RealField d2 = distance_to_boundary(g2);
  // (0.25, 0.1, -0.3) = nodes (15, 12, 4) at h = 0.05
  CHECK(d2(15, 12, 4) == Approx(0.2).margin(1e-14));
}

TEST_CASE("integrate is exact on constants") {
  Grid g = build_grid(9, 1.0);
  RealField one(g, 1.0);
  CHECK(integrate(one, g) == Approx(1.0).margin(1e-14));

  Grid g2 = build_grid(12, 2.0);
  RealField two(g2, 2.0);
  CHECK(integrate(two, g2) == Approx(16.0).margin(1e-13));
}

TEST_CASE("integrate x1^2 converges to 1/12") {
  Grid g = build_grid(33, 1.0);
  RealField f(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        double x = g.coord(i);
        f(i, j, k) = x * x;
      }
  double h2 = g.h() * g.h();
  CHECK(integrate(f, g) == Approx(1.0 / 12.0).margin(h2));
}

TEST_CASE("integrate rejects mismatched grids") {
  Grid g = build_grid(9, 1.0);
  Grid g2 = build_grid(10, 1.0);
  RealField f(g2, 1.0);
  CHECK_THROWS_AS(integrate(f, g), std::invalid_argument);
}

TEST_CASE("curl of a constant field vanishes exactly") {
  Grid g = build_grid(9, 1.0);
  VectorField u(g, Vec3{1, 0, 0});
  VectorField c = apply_curl(u, g);
  CHECK(max_norm(c) == 0.0);
}

TEST_CASE("curl of the helical field is -n to second order") {
  Grid g = build_grid(33, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.0}, g);
  VectorField c = apply_curl(n, g);
  double worst = 0;
  for (int m = 0; m < g.nodes(); ++m) {
    Vec3 r = {c.v[m][0] + n.v[m][0], c.v[m][1] + n.v[m][1], c.v[m][2] + n.v[m][2]};
    worst = std::max(worst, norm3(r));
  }
  // frozen regression bound for tau = 1
  CHECK(worst <= 1.0 * g.h() * g.h());
}

TEST_CASE("curl of a gradient vanishes to second order") {
  Grid g = build_grid(25, 1.0);
  RealField phi(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) phi(i, j, k) = g.coord(i) * g.coord(j);
  VectorField gp = apply_grad(phi, g);
  VectorField c = apply_curl(gp, g);
  CHECK(max_norm(c) <= 5.0 * g.h() * g.h());
}

TEST_CASE("differential operators are linear to machine precision") {
  Grid g = build_grid(13, 1.3);
  VectorField u = ldgtest::smooth_vector(g, 11);
  VectorField w = ldgtest::smooth_vector(g, 12);
  double a = 0.7, b = -1.9;
  VectorField comb(g);
  for (int m = 0; m < g.nodes(); ++m)
    for (int d = 0; d < 3; ++d) comb.v[m][d] = a * u.v[m][d] + b * w.v[m][d];

  RealField dc = apply_div(comb, g);
  RealField du = apply_div(u, g);
  RealField dw = apply_div(w, g);
  double worst = 0;
  for (int m = 0; m < g.nodes(); ++m)
    worst = std::max(worst, std::abs(dc.v[m] - a * du.v[m] - b * dw.v[m]));
  CHECK(worst <= 1e-12);

  VectorField cc = apply_curl(comb, g);
  VectorField cu = apply_curl(u, g);
  VectorField cw = apply_curl(w, g);
  worst = 0;
  for (int m = 0; m < g.nodes(); ++m)
    for (int d = 0; d < 3; ++d)
      worst = std::max(worst,
                       std::abs(cc.v[m][d] - a * cu.v[m][d] - b * cw.v[m][d]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("discrete integration by parts for fields vanishing on the boundary") {
  Grid g = build_grid(25, 1.0);
  VectorField u = ldgtest::smooth_vector(g, 21, /*dirichlet=*/true);
  RealField phi = ldgtest::smooth_scalar(g, 22);

  RealField div_u = apply_div(u, g);
  VectorField grad_phi = apply_grad(phi, g);

  RealField term1(g), term2(g), phi_sq(g);
  for (int m = 0; m < g.nodes(); ++m) {
    term1.v[m] = div_u.v[m] * phi.v[m];
    term2.v[m] = dot3(u.v[m], grad_phi.v[m]);
    phi_sq.v[m] = phi.v[m] * phi.v[m];
  }
  double lhs = integrate(term1, g) + integrate(term2, g);
  double scale = norm_l2(u) * std::sqrt(integrate(phi_sq, g));
  CHECK(std::abs(lhs) <= 5.0 * g.h() * g.h() * std::max(1.0, scale));
}

TEST_CASE("grad-norm splits into div and curl parts for Dirichlet fields") {
  Grid g = build_grid(25, 1.0);
  VectorField u = ldgtest::smooth_vector(g, 31, /*dirichlet=*/true);

  double grad_sq = 0;
  for (int d = 0; d < 3; ++d) {
    RealField comp(g);
    for (int m = 0; m < g.nodes(); ++m) comp.v[m] = u.v[m][d];
    VectorField gc = apply_grad(comp, g);
    RealField sq(g);
    for (int m = 0; m < g.nodes(); ++m) sq.v[m] = dot3(gc.v[m], gc.v[m]);
    grad_sq += integrate(sq, g);
  }

  RealField dv = apply_div(u, g);
  VectorField cu = apply_curl(u, g);
  RealField rhs(g);
  for (int m = 0; m < g.nodes(); ++m)
    rhs.v[m] = dv.v[m] * dv.v[m] + dot3(cu.v[m], cu.v[m]);
  double split = integrate(rhs, g);

  CHECK(std::abs(grad_sq - split) / grad_sq <= 20.0 * g.h() * g.h());
}

TEST_CASE("gradient of a constant integrates to zero exactly") {
  Grid g = build_grid(9, 1.0);
  RealField one(g, 1.0);
  VectorField gr = apply_grad(one, g);
  RealField mag(g);
  for (int m = 0; m < g.nodes(); ++m) mag.v[m] = norm3(gr.v[m]);
  CHECK(integrate(mag, g) == 0.0);
}
