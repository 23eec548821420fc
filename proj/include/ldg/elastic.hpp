#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <vector>

#include "ldg/grid.hpp"

namespace ldg {

/// Cell-based quadratic forms for the twist elastic energies
///
///   ||div u||^2   and   ||curl u + tau u||^2
///
/// computed from the trilinear interpolant on each grid cell with 2x2x2
/// Gauss quadrature. The quadrature is exact for products of the
/// interpolant's derivatives, so both forms are the exact integrals over the
/// interpolant: symmetric, nonnegative, and second-order consistent without
/// boundary artifacts. Node-stencil operators remain the tool for pointwise
/// diagnostics; these forms are what the eigensolver and the minimizers use.
namespace cellform {

struct GaussData {
  // Per Gauss point: value and physical-gradient coefficients of the 8
  // trilinear shape functions (gradient scaled by 1/h afterwards).
  std::array<std::array<double, 8>, 8> value;
  std::array<std::array<std::array<double, 8>, 3>, 8> dref;
};

inline const GaussData& gauss_data() {
  static const GaussData gd = [] {
    GaussData d{};
    const double p = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
    const double pts[2] = {p, 1.0 - p};
    int gp = 0;
    for (int gz = 0; gz < 2; ++gz)
      for (int gy = 0; gy < 2; ++gy)
        for (int gx = 0; gx < 2; ++gx, ++gp) {
          double xi[3] = {pts[gx], pts[gy], pts[gz]};
          int a = 0;
          for (int kz = 0; kz < 2; ++kz)
            for (int ky = 0; ky < 2; ++ky)
              for (int kx = 0; kx < 2; ++kx, ++a) {
                double f[3] = {kx ? xi[0] : 1 - xi[0], ky ? xi[1] : 1 - xi[1],
                               kz ? xi[2] : 1 - xi[2]};
                double s[3] = {kx ? 1.0 : -1.0, ky ? 1.0 : -1.0, kz ? 1.0 : -1.0};
                d.value[gp][a] = f[0] * f[1] * f[2];
                d.dref[gp][0][a] = s[0] * f[1] * f[2];
                d.dref[gp][1][a] = f[0] * s[1] * f[2];
                d.dref[gp][2][a] = f[0] * f[1] * s[2];
              }
        }
    return d;
  }();
  return gd;
}

/// 24x24 local matrices on one cell (dofs: node-major, 3 per node) such that
///   u_loc^T (c_div * Ldiv + c_curl * (L2 + tau L1 + tau^2 L0)) u_loc
/// equals the cell integral c_div (div u)^2 + c_curl |curl u + tau u|^2.
struct LocalMatrices {
  Eigen::Matrix<double, 24, 24> div;   // div-div
  Eigen::Matrix<double, 24, 24> c2;    // curl-curl
  Eigen::Matrix<double, 24, 24> c1;    // curl-value cross term
  Eigen::Matrix<double, 24, 24> c0;    // value-value
};

inline LocalMatrices local_matrices(double h) {
  const GaussData& gd = gauss_data();
  LocalMatrices lm;
  lm.div.setZero();
  lm.c2.setZero();
  lm.c1.setZero();
  lm.c0.setZero();
  const double w = h * h * h / 8.0;
  constexpr int A[3] = {1, 2, 0};
  constexpr int B[3] = {2, 0, 1};
  using Row = Eigen::Matrix<double, 1, 24>;
  for (int gp = 0; gp < 8; ++gp) {
    Row ldiv = Row::Zero();
    Row lc[3] = {Row::Zero(), Row::Zero(), Row::Zero()};
    Row lv[3] = {Row::Zero(), Row::Zero(), Row::Zero()};
    for (int a = 0; a < 8; ++a)
      for (int d = 0; d < 3; ++d) {
        double gdad = gd.dref[gp][d][a] / h;
        ldiv(3 * a + d) += gdad;
        lv[d](3 * a + d) = gd.value[gp][a];
      }
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 8; ++a) {
        lc[c](3 * a + B[c]) += gd.dref[gp][A[c]][a] / h;
        lc[c](3 * a + A[c]) -= gd.dref[gp][B[c]][a] / h;
      }
    lm.div += w * ldiv.transpose() * ldiv;
    for (int c = 0; c < 3; ++c) {
      lm.c2 += w * lc[c].transpose() * lc[c];
      lm.c1 += w * (lc[c].transpose() * lv[c] + lv[c].transpose() * lc[c]);
      lm.c0 += w * lv[c].transpose() * lv[c];
    }
  }
  return lm;
}

}  // namespace cellform

/// Sparse matrix S with u^T S u = c_div ||div u||^2 + c_curl ||curl u + tau u||^2
/// over flat vector fields (3*node + component).
inline Eigen::SparseMatrix<double> build_elastic_matrix(const Grid& g, double tau,
                                                        double c_div,
                                                        double c_curl) {
  cellform::LocalMatrices lm = cellform::local_matrices(g.h());
  Eigen::Matrix<double, 24, 24> local =
      c_div * lm.div + c_curl * (lm.c2 + tau * lm.c1 + tau * tau * lm.c0);

  const int n = g.n;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n - 1) * (n - 1) * (n - 1) * 576);
  for (int k = 0; k + 1 < n; ++k)
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        int nodes[8];
        int a = 0;
        for (int kz = 0; kz < 2; ++kz)
          for (int ky = 0; ky < 2; ++ky)
            for (int kx = 0; kx < 2; ++kx, ++a)
              nodes[a] = g.idx(i + kx, j + ky, k + kz);
        for (int r = 0; r < 24; ++r)
          for (int c = 0; c < 24; ++c) {
            double v = local(r, c);
            if (v != 0.0)
              trips.emplace_back(3 * nodes[r / 3] + r % 3,
                                 3 * nodes[c / 3] + c % 3, v);
          }
      }
  Eigen::SparseMatrix<double> S(3 * g.nodes(), 3 * g.nodes());
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

// ---------------------------------------------------------------------------
// Node-stencil twist form. The same second-order stencils as the field
// operators, squared against the trapezoid weights. On smooth zero-residual
// fields (the helical family) the integrand is O(h^2) pointwise, so the
// value is O(h^4): this is the form the functional minimizers use, so that
// the helical boundary data itself carries no spurious elastic cost. The
// tau u mass term covers the centered-stencil null space, so the form has
// no soft non-physical modes for the descent to exploit.

inline Eigen::SparseMatrix<double> build_div_matrix(const Grid& g) {
  std::vector<Eigen::Triplet<double>> trips;
  const int n = g.n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int row = g.idx(i, j, k);
        for (int d = 0; d < 3; ++d) {
          int pos = d == 0 ? i : (d == 1 ? j : k);
          detail::d1_stencil(n, g.h(), pos, [&](int p, double c) {
            int ii = d == 0 ? p : i, jj = d == 1 ? p : j, kk = d == 2 ? p : k;
            trips.emplace_back(row, 3 * g.idx(ii, jj, kk) + d, c);
          });
        }
      }
  Eigen::SparseMatrix<double> D(g.nodes(), 3 * g.nodes());
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

inline Eigen::SparseMatrix<double> build_curl_matrix(const Grid& g) {
  std::vector<Eigen::Triplet<double>> trips;
  const int n = g.n;
  constexpr int A[3] = {1, 2, 0};
  constexpr int B[3] = {2, 0, 1};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int node = g.idx(i, j, k);
        for (int c = 0; c < 3; ++c) {
          int row = 3 * node + c;
          int a = A[c], b = B[c];
          int posa = a == 0 ? i : (a == 1 ? j : k);
          detail::d1_stencil(n, g.h(), posa, [&](int p, double coef) {
            int ii = a == 0 ? p : i, jj = a == 1 ? p : j, kk = a == 2 ? p : k;
            trips.emplace_back(row, 3 * g.idx(ii, jj, kk) + b, coef);
          });
          int posb = b == 0 ? i : (b == 1 ? j : k);
          detail::d1_stencil(n, g.h(), posb, [&](int p, double coef) {
            int ii = b == 0 ? p : i, jj = b == 1 ? p : j, kk = b == 2 ? p : k;
            trips.emplace_back(row, 3 * g.idx(ii, jj, kk) + a, -coef);
          });
        }
      }
  Eigen::SparseMatrix<double> C(3 * g.nodes(), 3 * g.nodes());
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

/// Node-stencil matrix S with
///   u^T S u = c_div ||div u||^2 + c_curl ||curl u + tau u||^2
/// in the trapezoid quadrature.
inline Eigen::SparseMatrix<double> build_node_elastic_matrix(const Grid& g,
                                                             double tau,
                                                             double c_div,
                                                             double c_curl) {
  const int nn = g.nodes();
  Eigen::VectorXd ws(nn), wv(3 * nn);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        double w = g.weight(i, j, k);
        ws[g.idx(i, j, k)] = w;
        for (int d = 0; d < 3; ++d) wv[3 * g.idx(i, j, k) + d] = w;
      }
  Eigen::SparseMatrix<double> D = build_div_matrix(g);
  Eigen::SparseMatrix<double> C = build_curl_matrix(g);
  Eigen::SparseMatrix<double> I3(3 * nn, 3 * nn);
  I3.setIdentity();
  Eigen::SparseMatrix<double> Ct = C + tau * I3;
  Eigen::SparseMatrix<double> S =
      c_div * Eigen::SparseMatrix<double>(D.transpose()) * ws.asDiagonal() * D +
      c_curl * Eigen::SparseMatrix<double>(Ct.transpose()) * wv.asDiagonal() * Ct;
  return S;
}

/// Values of the two elastic integrals for one field.
struct ElasticEnergies {
  double div_sq = 0;       // ||div u||^2
  double curl_twist_sq = 0;  // ||curl u + tau u||^2
};

/// Node-stencil route (matches the field operators and grid quadrature).
inline ElasticEnergies elastic_energies_node(const VectorField& u, double tau,
                                             const Grid& g) {
  RealField dv = apply_div(u, g);
  VectorField cu = apply_curl(u, g);
  ElasticEnergies out;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        double w = g.weight(i, j, k);
        int m = g.idx(i, j, k);
        out.div_sq += w * dv.v[m] * dv.v[m];
        for (int d = 0; d < 3; ++d) {
          double c = cu.v[m][d] + tau * u.v[m][d];
          out.curl_twist_sq += w * c * c;
        }
      }
  return out;
}

inline ElasticEnergies elastic_energies(const VectorField& u, double tau,
                                        const Grid& g) {
  require_same_grid(u.grid, g, "elastic_energies");
  const cellform::GaussData& gd = cellform::gauss_data();
  const int n = g.n;
  const double h = g.h();
  const double w = h * h * h / 8.0;
  constexpr int A[3] = {1, 2, 0};
  constexpr int B[3] = {2, 0, 1};
  ElasticEnergies out;
  for (int k = 0; k + 1 < n; ++k)
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        const Vec3* u8[8];
        int a = 0;
        for (int kz = 0; kz < 2; ++kz)
          for (int ky = 0; ky < 2; ++ky)
            for (int kx = 0; kx < 2; ++kx, ++a)
              u8[a] = &u.v[g.idx(i + kx, j + ky, k + kz)];
        for (int gp = 0; gp < 8; ++gp) {
          double grad[3][3] = {};  // grad[d][c] = d_d u_c
          double val[3] = {};
          for (int m = 0; m < 8; ++m) {
            double nv = gd.value[gp][m];
            for (int c = 0; c < 3; ++c) {
              val[c] += nv * (*u8[m])[c];
              for (int d = 0; d < 3; ++d)
                grad[d][c] += gd.dref[gp][d][m] / h * (*u8[m])[c];
            }
          }
          double dv = grad[0][0] + grad[1][1] + grad[2][2];
          out.div_sq += w * dv * dv;
          for (int c = 0; c < 3; ++c) {
            double cc = grad[A[c]][B[c]] - grad[B[c]][A[c]] + tau * val[c];
            out.curl_twist_sq += w * cc * cc;
          }
        }
      }
  return out;
}

}  // namespace ldg
