#include <catch2/catch_amalgamated.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "ldg/director.hpp"
#include "ldg/magnetic.hpp"
#include "ldg/spectra.hpp"
#include "test_support.hpp"

using namespace ldg;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

RealField sample_phi_xy(const Grid& g) {
  RealField phi(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) phi(i, j, k) = g.coord(i) * g.coord(j);
  return phi;
}

double hermiticity_defect(const MagneticOperator& op, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int nn = op.grid.nodes();
  std::vector<cplx> f(nn), gvec(nn), Af, Ag;
  for (int m = 0; m < nn; ++m) {
    f[m] = cplx(unif(rng), unif(rng));
    gvec[m] = cplx(unif(rng), unif(rng));
  }
  op.apply_form(f, Af);
  op.apply_form(gvec, Ag);
  cplx s1 = 0, s2 = 0;
  double nf = 0, ng = 0;
  for (int m = 0; m < nn; ++m) {
    s1 += std::conj(Af[m]) * gvec[m];
    s2 += std::conj(f[m]) * Ag[m];
    nf += std::norm(f[m]);
    ng += std::norm(gvec[m]);
  }
  return std::abs(s1 - s2) / std::sqrt(nf * ng);
}
}  // namespace

TEST_CASE("free Neumann operator: links trivial, kernel is the constants") {
  Grid g = build_grid(12, 1.0);
  VectorField zero(g, Vec3{0, 0, 0});
  MagneticOperator op = assemble_magnetic(g, zero, 0.0, Bc::Neumann);
  CHECK(op.max_link_modulus_defect() == 0.0);

  std::vector<cplx> ones(g.nodes(), cplx(1, 0)), out;
  op.apply_form(ones, out);
  double worst = 0;
  for (const cplx& z : out) worst = std::max(worst, std::abs(z));
  CHECK(worst <= 1e-13);

  SpectralResult r = lowest_eig(op, 1e-9, 3);
  CHECK(r.converged);
  CHECK(std::abs(r.eigenvalue) <= 1e-9);
}

TEST_CASE("link phases stay on the unit circle") {
  Grid g = build_grid(10, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.5}, g);
  MagneticOperator op = assemble_magnetic(g, n, 7.0, Bc::Neumann);
  CHECK(op.max_link_modulus_defect() <= 1e-14);
}

TEST_CASE("assembled operator is Hermitian on random fields") {
  Grid g = build_grid(10, 1.0);
  VectorField n = helical_field({Rotation::from_axis_angle({1, 1, 0}, 0.7), 1.0}, g);
  MagneticOperator op = assemble_magnetic(g, n, 5.0, Bc::Neumann);
  CHECK(hermiticity_defect(op, 17) <= 1e-12);
  MagneticOperator opd = assemble_magnetic(g, n, 5.0, Bc::Dirichlet);
  CHECK(hermiticity_defect(opd, 18) <= 1e-12);
}

TEST_CASE("exact discrete gauge transform leaves the free spectrum at zero") {
  Grid g = build_grid(12, 1.0);
  VectorField zero(g, Vec3{0, 0, 0});
  MagneticOperator base = assemble_magnetic(g, zero, 1.0, Bc::Neumann);
  MagneticOperator gauged = base.gauge_transformed(sample_phi_xy(g));
  SpectralResult r = lowest_eig(gauged, 1e-10, 5);
  CHECK(r.converged);
  CHECK(std::abs(r.eigenvalue) <= 1e-10);
}

TEST_CASE("gauge transform is an exact isospectral map") {
  Grid g = build_grid(10, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.0}, g);
  MagneticOperator op = assemble_magnetic(g, n, 3.0, Bc::Neumann);
  MagneticOperator gauged = op.gauge_transformed(ldgtest::smooth_scalar(g, 44));
  SpectralResult a = lowest_eig(op, 1e-10, 7);
  SpectralResult b = lowest_eig(gauged, 1e-10, 7);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.eigenvalue - b.eigenvalue) <= 1e-10);
}

TEST_CASE("Dirichlet Laplacian ground state matches the cube value") {
  Grid g = build_grid(17, 1.0);
  VectorField zero(g, Vec3{0, 0, 0});
  MagneticOperator op = assemble_magnetic(g, zero, 0.0, Bc::Dirichlet);
  SpectralResult r = lowest_eig(op, 1e-9, 11);
  REQUIRE(r.converged);
  CHECK(r.eigenvalue == Approx(3.0 * kPi * kPi).epsilon(0.01));
  CHECK(r.eigenvalue > 0);
}

TEST_CASE("two seeds agree") {
  Grid g = build_grid(10, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.0}, g);
  MagneticOperator op = assemble_magnetic(g, n, 5.0, Bc::Neumann);
  double tol = 1e-9;
  SpectralResult a = lowest_eig(op, tol, 1);
  SpectralResult b = lowest_eig(op, tol, 99);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.eigenvalue - b.eigenvalue) <= 10 * tol);
}

TEST_CASE("helical operator positive; dense cross-check on the coarse cube") {
  Grid g = build_grid(8, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.0}, g);
  MagneticOperator op = assemble_magnetic(g, n, 5.0, Bc::Neumann);

  SpectralResult r = lowest_eig(op, 1e-10, 13);
  REQUIRE(r.converged);
  CHECK(r.eigenvalue > 0);

  // Dense eigensolve of the mass-symmetrized operator.
  const int nn = g.nodes();
  std::vector<double> sqw(nn);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i)
        sqw[g.idx(i, j, k)] = std::sqrt(g.weight(i, j, k));
  Eigen::MatrixXcd H(nn, nn);
  std::vector<cplx> e(nn), out;
  for (int c = 0; c < nn; ++c) {
    std::fill(e.begin(), e.end(), cplx(0, 0));
    e[c] = cplx(1.0 / sqw[c], 0);
    op.apply_form(e, out);
    for (int rr = 0; rr < nn; ++rr) H(rr, c) = out[rr] / sqw[rr];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  CHECK(r.eigenvalue == Approx(es.eigenvalues()(0)).margin(1e-8));
}

TEST_CASE("Rayleigh quotient of the returned eigenvector reproduces lambda") {
  Grid g = build_grid(10, 1.0);
  VectorField n = helical_field({Rotation::identity(), 1.0}, g);
  MagneticOperator op = assemble_magnetic(g, n, 5.0, Bc::Neumann);
  double tol = 1e-9;
  SpectralResult r = lowest_eig(op, tol, 2);
  REQUIRE(r.converged);
  double kin = op.kinetic_energy(r.eigenvector.v);
  double mass = std::pow(norm_l2(r.eigenvector), 2);
  CHECK(kin / mass == Approx(r.eigenvalue).margin(10 * tol));
}

TEST_CASE("sqrt-eigenvalue Lipschitz bound on nearby helical pairs") {
  Grid g = build_grid(10, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double q = 5.0;
  for (int t = 0; t < 5; ++t) {
    Rotation q0 = Rotation::from_axis_angle({unif(rng), unif(rng), 1.0 + 0.1 * unif(rng)}, unif(rng));
    Rotation q1 = q0 * Rotation::from_axis_angle({0, 0, 1}, 0.15 * unif(rng));
    double tau0 = 1.0 + 0.2 * unif(rng);
    double tau1 = tau0 + 0.1 * unif(rng);
    VectorField n0 = helical_field({q0, tau0}, g);
    VectorField n1 = helical_field({q1, tau1}, g);
    MagneticOperator op0 = assemble_magnetic(g, n0, q, Bc::Neumann);
    MagneticOperator op1 = assemble_magnetic(g, n1, q, Bc::Neumann);
    SpectralResult r0 = lowest_eig(op0, 1e-9, 31 + t);
    SpectralResult r1 = lowest_eig(op1, 1e-9, 81 + t);
    REQUIRE(r0.converged);
    REQUIRE(r1.converged);
    VectorField diff(g);
    for (int m = 0; m < g.nodes(); ++m) diff.v[m] = sub3(n0.v[m], n1.v[m]);
    double a_inf = q * max_norm(diff);
    double lhs = std::abs(std::sqrt(std::max(0.0, r0.eigenvalue)) -
                          std::sqrt(std::max(0.0, r1.eigenvalue)));
    double scale = std::max({1.0, std::sqrt(std::abs(r0.eigenvalue)),
                             std::sqrt(std::abs(r1.eigenvalue))});
    CHECK(lhs <= a_inf + 5.0 * g.h() * g.h() * scale);
  }
}

TEST_CASE("cube Dirichlet spectrum") {
  auto one = dirichlet_spectrum_cube(1.0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Approx(3.0 * kPi * kPi));

  auto four = dirichlet_spectrum_cube(1.0, 4);
  CHECK(four[0] == Approx(3.0 * kPi * kPi));
  for (int i = 1; i < 4; ++i) CHECK(four[i] == Approx(6.0 * kPi * kPi));

  auto scaled = dirichlet_spectrum_cube(2.0, 1);
  CHECK(scaled[0] == Approx(0.75 * kPi * kPi));

  CHECK(dist_to_dirichlet_spectrum(1.0, 1.0) ==
        Approx(3.0 * kPi * kPi - 1.0).epsilon(1e-12));
}

TEST_CASE("twist operator at tau=0 recovers the Dirichlet Laplacian level") {
  Grid g = build_grid(17, 1.0);
  VectorSpectralResult r = lowest_eig_ttau(g, 0.0, 1e-8, 3);
  REQUIRE(r.converged);
  CHECK(r.eigenvalue == Approx(3.0 * kPi * kPi).epsilon(0.02));
}

TEST_CASE("twist eigenvalue obeys the spectral-distance lower bound") {
  Grid g = build_grid(13, 1.0);
  for (double tau : {0.5, 1.0, 2.0}) {
    VectorSpectralResult r = lowest_eig_ttau(g, tau, 1e-8, 5);
    REQUIRE(r.converged);
    double d = dist_to_dirichlet_spectrum(g.L, tau);
    double bound = -tau + std::sqrt(tau * tau + d);
    CHECK(r.eigenvalue >= bound * (1.0 - 0.02) - 1e-8);
  }
}

TEST_CASE("L2 and H1 control via the twist form on random Dirichlet fields") {
  Grid g = build_grid(13, 1.0);
  double tau = 1.0;
  VectorSpectralResult mu1 = lowest_eig_ttau(g, tau, 1e-8, 7);
  REQUIRE(mu1.converged);
  for (int t = 0; t < 10; ++t) {
    VectorField u = ldgtest::smooth_vector(g, 100 + t, /*dirichlet=*/true);
    double q_form = q_tau_form(u, tau, g);
    double l2 = std::pow(norm_l2(u), 2);
    CHECK(l2 <= q_form / mu1.eigenvalue * (1 + 1e-6) + 1e-10);

    double grad_sq = 0;
    for (int d = 0; d < 3; ++d) {
      RealField comp(g);
      for (int m = 0; m < g.nodes(); ++m) comp.v[m] = u.v[m][d];
      VectorField gc = apply_grad(comp, g);
      RealField sq(g);
      for (int m = 0; m < g.nodes(); ++m) sq.v[m] = dot3(gc.v[m], gc.v[m]);
      grad_sq += integrate(sq, g);
    }
    double rhs = (1.0 + tau * tau / mu1.eigenvalue) * q_form;
    CHECK(0.5 * grad_sq <= rhs * (1.0 + 50.0 * g.h() * g.h()));
  }
}

TEST_CASE("half-space model constant") {
  double th = theta0();
  CHECK(th >= 0.589);
  CHECK(th <= 0.592);
  CHECK(theta0_band_minimum(0.0) > th);
  double th2 = theta0(4800);
  CHECK(std::abs(th2 - th) < 1e-4);
}

TEST_CASE("mu_star at q=0 vanishes for any rotation") {
  Grid g = build_grid(9, 1.0);
  MuStarOptions opt;
  opt.resolution = {1, 2, 2};
  opt.refine_steps = 0;
  MuStarResult r = mu_star(g, 0.0, 1.0, opt);
  CHECK(std::abs(r.value) <= 1e-8);
}

TEST_CASE("mu_star is the minimum of its trace and refinement never hurts") {
  Grid g = build_grid(9, 1.0);
  double q = 5.0, tau = 1.0;
  MuStarOptions coarse;
  coarse.resolution = {2, 4, 2};
  coarse.refine_steps = 0;
  coarse.seed = 3;
  MuStarResult rc = mu_star(g, q, tau, coarse);
  for (const auto& s : rc.trace)
    if (s.converged) CHECK(rc.value <= s.eigenvalue + 1e-12);

  // identity sample is in the trace: min <= mu(identity)
  bool conv = true;
  VectorField nid = helical_field({Rotation::identity(), tau}, g);
  SpectralResult rid = lowest_eig(assemble_magnetic(g, nid, q, Bc::Neumann), 1e-8, 5);
  CHECK(rc.value <= rid.eigenvalue + 1e-10);
  CHECK(conv);

  MuStarOptions refined = coarse;
  refined.refine_steps = 15;
  MuStarResult rr = mu_star(g, q, tau, refined);
  CHECK(rr.value <= rc.value + 1e-12);

  MuStarOptions doubled;
  doubled.resolution = {4, 8, 4};
  doubled.refine_steps = 0;
  doubled.seed = 3;
  MuStarResult rd = mu_star(g, q, tau, doubled);
  CHECK(std::abs(rd.value - rr.value) <= 0.05 * std::max(rd.value, rr.value));
}

TEST_CASE("mu_star rejects bad arguments") {
  Grid g = build_grid(9, 1.0);
  CHECK_THROWS_AS(mu_star(g, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mu_star(g, 1.0, 0.0), std::invalid_argument);
}
