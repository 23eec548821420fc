#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ldg/director.hpp"
#include "ldg/elastic.hpp"
#include "ldg/grid.hpp"
#include "ldg/lanczos.hpp"
#include "ldg/magnetic.hpp"
#include "ldg/rotation.hpp"
#include "ldg/thread_pool.hpp"

namespace ldg {

struct SpectralResult {
  double eigenvalue = 0;
  ScalarField eigenvector;   // L2-normalized on the full node set
  int iterations = 0;        // operator applications
  double residual_norm = 0;  // ||H v - lambda v|| / ||v|| in L2
  bool converged = false;
};

struct VectorSpectralResult {
  double eigenvalue = 0;
  VectorField eigenvector;   // zero on the boundary, L2-normalized
  int iterations = 0;
  double residual_norm = 0;
  bool converged = false;
};

/// Lowest eigenvalue of the magnetic operator against the trapezoid mass.
/// The pencil (A, M) is symmetrized as M^{-1/2} A M^{-1/2}; the reported
/// eigenvector is mapped back and L2-normalized.
inline SpectralResult lowest_eig(const MagneticOperator& op, double tol,
                                 std::uint64_t seed, int max_matvecs = 10000) {
  const Grid& g = op.grid;
  const int n = g.n;
  const int nodes = g.nodes();

  std::vector<double> sqw(nodes);
  std::vector<int> dof;  // node index per dof
  if (op.bc == Bc::Neumann) {
    dof.resize(nodes);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          int m = g.idx(i, j, k);
          dof[m] = m;
          sqw[m] = std::sqrt(g.weight(i, j, k));
        }
  } else {
    for (int k = 1; k < n - 1; ++k)
      for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
          int m = g.idx(i, j, k);
          dof.push_back(m);
          sqw[m] = std::sqrt(g.weight(i, j, k));
        }
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(dof.size());

  std::vector<cplx> full(nodes), out(nodes);
  using Vec = Eigen::VectorXcd;
  auto apply = [&](const Vec& x, Vec& y) {
    std::fill(full.begin(), full.end(), cplx(0, 0));
    for (Eigen::Index p = 0; p < dim; ++p) full[dof[p]] = x[p] / sqw[dof[p]];
    op.apply_form(full, out);
    y.resize(dim);
    for (Eigen::Index p = 0; p < dim; ++p) y[p] = out[dof[p]] / sqw[dof[p]];
  };

  EigOptions eopt;
  eopt.tol = tol;
  eopt.seed = seed;
  eopt.max_matvecs = max_matvecs;
  auto r = smallest_eigenpair<cplx>(dim, apply, eopt);

  SpectralResult res;
  res.eigenvalue = r.eigenvalue;
  res.iterations = r.matvecs;
  res.residual_norm = r.residual;
  res.converged = r.converged;
  res.eigenvector = ScalarField(g);
  for (Eigen::Index p = 0; p < dim; ++p)
    res.eigenvector.v[dof[p]] = r.vector[p] / sqw[dof[p]];
  double nrm = norm_l2(res.eigenvector);
  if (nrm > 0)
    for (auto& z : res.eigenvector.v) z /= nrm;
  return res;
}

/// The twist form Q_tau(u) = ||div u||^2 + ||curl u + tau u||^2, evaluated
/// via the cell form (same arithmetic as the assembled eigenproblem, so the
/// minimax inequalities hold exactly at the discrete level).
inline double q_tau_form(const VectorField& u, double tau, const Grid& g) {
  ElasticEnergies e = elastic_energies(u, tau, g);
  return e.div_sq + e.curl_twist_sq;
}

/// Sparse matrix of the twist eigenproblem on interior unknowns, already
/// divided by the uniform interior mass h^3. Nonnegative by construction.
inline Eigen::SparseMatrix<double> assemble_ttau_matrix(const Grid& g, double tau) {
  const int n = g.n;
  Eigen::SparseMatrix<double> S = build_elastic_matrix(g, tau, 1.0, 1.0);

  std::vector<int> flat_to_dof(3 * g.nodes(), -1);
  int ndof = 0;
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i)
        for (int d = 0; d < 3; ++d) flat_to_dof[3 * g.idx(i, j, k) + d] = ndof++;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(S.nonZeros());
  double inv_h3 = 1.0 / (g.h() * g.h() * g.h());
  for (int col = 0; col < S.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, col); it; ++it) {
      int r = flat_to_dof[it.row()], c = flat_to_dof[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value() * inv_h3);
    }
  Eigen::SparseMatrix<double> A(ndof, ndof);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

/// Lowest eigenvalue of -Delta + 2 tau curl + tau^2 with Dirichlet condition,
/// solved through the nonnegative form Q_tau.
inline VectorSpectralResult lowest_eig_ttau(const Grid& g, double tau, double tol,
                                            std::uint64_t seed = 1,
                                            int max_matvecs = 10000) {
  if (tau < 0) throw std::invalid_argument("lowest_eig_ttau: tau must be >= 0");
  Eigen::SparseMatrix<double> A = assemble_ttau_matrix(g, tau);
  const Eigen::Index dim = A.rows();
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = A * x;
  };
  EigOptions eopt;
  eopt.tol = tol;
  eopt.seed = seed;
  eopt.max_matvecs = max_matvecs;
  auto r = smallest_eigenpair<double>(dim, apply, eopt);

  VectorSpectralResult res;
  res.eigenvalue = r.eigenvalue;
  res.iterations = r.matvecs;
  res.residual_norm = r.residual;
  res.converged = r.converged;
  res.eigenvector = VectorField(g);
  const int n = g.n;
  int p = 0;
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        res.eigenvector(i, j, k) = {r.vector[3 * p], r.vector[3 * p + 1],
                                    r.vector[3 * p + 2]};
        ++p;
      }
  double nrm = norm_l2(res.eigenvector);
  if (nrm > 0)
    for (auto& v : res.eigenvector.v)
      for (int d = 0; d < 3; ++d) v[d] /= nrm;
  return res;
}

/// First `count` Dirichlet Laplacian eigenvalues of the cube, with
/// multiplicity: pi^2 (k^2 + l^2 + m^2) / L^2, k,l,m >= 1.
inline std::vector<double> dirichlet_spectrum_cube(double L, int count) {
  if (count < 1) throw std::invalid_argument("dirichlet_spectrum_cube: count >= 1");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  int bound = 2;
  for (;;) {
    std::vector<double> sums;
    for (int k = 1; k <= bound; ++k)
      for (int l = 1; l <= bound; ++l)
        for (int m = 1; m <= bound; ++m)
          sums.push_back(static_cast<double>(k * k + l * l + m * m));
    std::sort(sums.begin(), sums.end());
    // Values beyond the enumerated box are at least (bound+1)^2 + 2.
    double safe = static_cast<double>((bound + 1) * (bound + 1) + 2);
    if (static_cast<int>(sums.size()) >= count && sums[count - 1] <= safe) {
      std::vector<double> out(sums.begin(), sums.begin() + count);
      for (double& v : out) v *= pi2 / (L * L);
      return out;
    }
    bound *= 2;
  }
}

inline double dist_to_dirichlet_spectrum(double L, double tau) {
  double t2 = tau * tau;
  int count = 8;
  for (;;) {
    auto spec = dirichlet_spectrum_cube(L, count);
    if (spec.back() >= t2 || count > (1 << 20)) {
      double d = std::numeric_limits<double>::infinity();
      for (double s : spec) d = std::min(d, std::abs(t2 - s));
      return d;
    }
    count *= 2;
  }
}

// ---------------------------------------------------------------------------
// Half-space model constant.

namespace detail {

/// Number of eigenvalues of a symmetric tridiagonal matrix strictly below x
/// (Sturm count via the LDL^T recurrence).
inline int sturm_count(const std::vector<double>& diag,
                       const std::vector<double>& off, double x) {
  int count = 0;
  double d = 1.0;
  const double tiny = 1e-300;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    d = diag[i] - x - b2 / d;
    if (std::abs(d) < tiny) d = -tiny;
    if (d < 0) ++count;
  }
  return count;
}

inline double tridiag_smallest(const std::vector<double>& diag,
                               const std::vector<double>& off) {
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
               (i + 1 < diag.size() ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Lowest Neumann eigenvalue of -d^2/dt^2 + (t - xi)^2 on [0, t_max].
inline double half_line_ground(double xi, int resolution, double t_max) {
  const int m = resolution;
  const double h = t_max / (m - 1);
  std::vector<double> diag(m), off(m - 1), w(m);
  for (int i = 0; i < m; ++i) w[i] = (i == 0 || i == m - 1) ? 0.5 * h : h;
  for (int i = 0; i < m; ++i) {
    double t = i * h;
    double stiff = (i == 0 || i == m - 1) ? 1.0 / h : 2.0 / h;
    double pot = (t - xi) * (t - xi);
    diag[i] = stiff / w[i] + pot;
  }
  for (int i = 0; i + 1 < m; ++i) off[i] = (-1.0 / h) / std::sqrt(w[i] * w[i + 1]);
  return tridiag_smallest(diag, off);
}

}  // namespace detail

/// Lowest Neumann eigenvalue of the 1D half-line model at a fixed Fermi
/// parameter xi. Exposed so tests can probe the infimum property.
inline double theta0_band_minimum(double xi, int resolution = 2400,
                                  double t_max = 12.0) {
  if (resolution < 200)
    throw std::invalid_argument("theta0: resolution must be >= 200");
  return detail::half_line_ground(xi, resolution, t_max);
}

/// Ground energy of the half-space magnetic Neumann problem with unit field,
/// reduced to the 1D model and minimized over xi by golden-section search.
inline double theta0(int resolution = 2400, double xi_tolerance = 1e-8) {
  if (resolution < 200)
    throw std::invalid_argument("theta0: resolution must be >= 200");
  const double t_max = 12.0;
  auto f = [&](double xi) { return detail::half_line_ground(xi, resolution, t_max); };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xi_tolerance) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

// ---------------------------------------------------------------------------
// Critical temperature search over the helical family.

struct MuStarSample {
  AxisPhase coords;
  Rotation rotation;
  double eigenvalue = 0;
  bool converged = false;
};

struct MuStarResult {
  double value = 0;
  Rotation argmin_rotation;
  AxisPhase argmin_coords;
  std::vector<MuStarSample> trace;
  int eigensolves = 0;
};

struct MuStarOptions {
  So3Resolution resolution{4, 8, 4};
  int refine_steps = 40;      // objective evaluations granted to the simplex
  double tol = 1e-8;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  int max_matvecs = 10000;
};

namespace detail {

inline double mu_of_rotation(const Grid& g, double q, double tau,
                             const AxisPhase& c, double tol, std::uint64_t seed,
                             int max_matvecs, bool& converged) {
  VectorField n = helical_field({c.rotation(), tau}, g);
  MagneticOperator op = assemble_magnetic(g, n, q, Bc::Neumann);
  SpectralResult r = lowest_eig(op, tol, seed, max_matvecs);
  converged = r.converged;
  return r.eigenvalue;
}

}  // namespace detail

/// mu*(q, tau): minimize the lowest Neumann magnetic eigenvalue over the
/// helical family. Coarse deterministic covering of (axis, phase), then
/// derivative-free simplex refinement from the best sample. The full trace
/// is retained so a run can be audited.
inline MuStarResult mu_star(const Grid& g, double q, double tau,
                            const MuStarOptions& opt = {}) {
  if (q < 0) throw std::invalid_argument("mu_star: q must be >= 0");
  if (!(tau > 0)) throw std::invalid_argument("mu_star: tau must be > 0");

  std::vector<AxisPhase> coords = so3_sample_coords(opt.resolution);
  MuStarResult res;
  res.trace.resize(coords.size());

  parallel_for(coords.size(), opt.workers, [&](std::size_t i) {
    MuStarSample s;
    s.coords = coords[i];
    s.rotation = coords[i].rotation();
    bool conv = false;
    s.eigenvalue = detail::mu_of_rotation(g, q, tau, coords[i], opt.tol,
                                          opt.seed + 1000 + i, opt.max_matvecs,
                                          conv);
    s.converged = conv;
    res.trace[i] = s;
  });
  res.eigensolves = static_cast<int>(coords.size());

  int best = -1;
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    if (!res.trace[i].converged) continue;
    if (best < 0 || res.trace[i].eigenvalue < res.trace[best].eigenvalue)
      best = static_cast<int>(i);
  }
  if (best < 0) throw std::runtime_error("mu_star: all sample eigensolves failed");

  res.value = res.trace[best].eigenvalue;
  res.argmin_coords = res.trace[best].coords;
  res.argmin_rotation = res.trace[best].rotation;

  // Nelder-Mead in (polar, azimuth, phase) from the best coarse point.
  if (opt.refine_steps > 0) {
    const double pi = std::numbers::pi;
    std::array<double, 3> step = {0.25 * pi / opt.resolution.n_polar,
                                  pi / opt.resolution.n_azimuth,
                                  pi / opt.resolution.n_phase};
    int evals = 0;
    auto eval = [&](const std::array<double, 3>& p) {
      AxisPhase c{p[0], p[1], p[2]};
      bool conv = false;
      double v = detail::mu_of_rotation(g, q, tau, c, opt.tol,
                                        opt.seed + 500000 + evals,
                                        opt.max_matvecs, conv);
      ++evals;
      ++res.eigensolves;
      MuStarSample s{c, c.rotation(), v, conv};
      res.trace.push_back(s);
      if (conv && v < res.value) {
        res.value = v;
        res.argmin_coords = c;
        res.argmin_rotation = s.rotation;
      }
      return conv ? v : std::numeric_limits<double>::infinity();
    };

    std::array<std::array<double, 3>, 4> simplex;
    std::array<double, 4> fval;
    simplex[0] = {res.argmin_coords.polar, res.argmin_coords.azimuth,
                  res.argmin_coords.phase};
    fval[0] = res.trace[best].eigenvalue;
    for (int v = 1; v < 4; ++v) {
      simplex[v] = simplex[0];
      simplex[v][v - 1] += step[v - 1];
      if (evals < opt.refine_steps) fval[v] = eval(simplex[v]);
      else fval[v] = std::numeric_limits<double>::infinity();
    }

    auto order = [&]() {
      std::array<int, 4> idx = {0, 1, 2, 3};
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fval[a] < fval[b]; });
      std::array<std::array<double, 3>, 4> s2;
      std::array<double, 4> f2;
      for (int i = 0; i < 4; ++i) { s2[i] = simplex[idx[i]]; f2[i] = fval[idx[i]]; }
      simplex = s2; fval = f2;
    };

    while (evals < opt.refine_steps) {
      order();
      std::array<double, 3> centroid = {0, 0, 0};
      for (int v = 0; v < 3; ++v)
        for (int d = 0; d < 3; ++d) centroid[d] += simplex[v][d] / 3.0;
      auto combine = [&](double t) {
        std::array<double, 3> p;
        for (int d = 0; d < 3; ++d)
          p[d] = centroid[d] + t * (simplex[3][d] - centroid[d]);
        return p;
      };
      auto pr = combine(-1.0);
      double fr = eval(pr);
      if (fr < fval[0] && evals < opt.refine_steps) {
        auto pe = combine(-2.0);
        double fe = eval(pe);
        if (fe < fr) { simplex[3] = pe; fval[3] = fe; }
        else { simplex[3] = pr; fval[3] = fr; }
      } else if (fr < fval[2]) {
        simplex[3] = pr; fval[3] = fr;
      } else if (evals < opt.refine_steps) {
        auto pc = combine(0.5);
        double fc = eval(pc);
        if (fc < fval[3]) { simplex[3] = pc; fval[3] = fc; }
        else {
          for (int v = 1; v < 4; ++v) {
            for (int d = 0; d < 3; ++d)
              simplex[v][d] = 0.5 * (simplex[v][d] + simplex[0][d]);
            if (evals >= opt.refine_steps) break;
            fval[v] = eval(simplex[v]);
          }
        }
      }
    }
  }
  return res;
}

}  // namespace ldg
