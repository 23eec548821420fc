#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldg {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

inline double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}
inline Vec3 sub3(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Uniform collocated discretization of the cube [-L/2, L/2]^3.
/// Nodes sit at x_i = -L/2 + i*h per axis with h = L/(n-1), so the node set
/// is symmetric under x -> -x and rotations about the origin act on the
/// domain center.
struct Grid {
  int n = 0;      // nodes per axis
  double L = 0;   // cube edge length

  double h() const { return L / (n - 1); }
  int nodes() const { return n * n * n; }
  double volume() const { return L * L * L; }

  int idx(int i, int j, int k) const { return (k * n + j) * n + i; }
  double coord(int i) const { return -0.5 * L + i * h(); }
  Vec3 point(int i, int j, int k) const { return {coord(i), coord(j), coord(k)}; }

  // 1D trapezoid weight; the product over axes integrates exactly on constants.
  double w1(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h() : h(); }
  double weight(int i, int j, int k) const { return w1(i) * w1(j) * w1(k); }

  bool interior(int i, int j, int k) const {
    return i > 0 && i < n - 1 && j > 0 && j < n - 1 && k > 0 && k < n - 1;
  }
  bool boundary(int i, int j, int k) const { return !interior(i, j, k); }

  bool operator==(const Grid& o) const { return n == o.n && L == o.L; }
};

inline Grid build_grid(int n_per_axis, double L) {
  if (n_per_axis < 8)
    throw std::invalid_argument("grid: need at least 8 nodes per axis, got " +
                                std::to_string(n_per_axis));
  if (!(L > 0))
    throw std::invalid_argument("grid: edge length must be positive");
  return Grid{n_per_axis, L};
}

template <class T>
struct FieldT {
  Grid grid;
  std::vector<T> v;

  FieldT() = default;
  explicit FieldT(const Grid& g, T fill = T{}) : grid(g), v(g.nodes(), fill) {}

  T& operator()(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
  std::size_t size() const { return v.size(); }
};

using ScalarField = FieldT<cplx>;    // complex order parameter
using RealField = FieldT<double>;
using VectorField = FieldT<Vec3>;    // real 3-vector per node
using CVectorField = FieldT<CVec3>;

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

/// Distance from each node to the cube boundary: min over axes of L/2 - |x|.
inline RealField distance_to_boundary(const Grid& g) {
  RealField d(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        Vec3 x = g.point(i, j, k);
        double m = 0.5 * g.L - std::abs(x[0]);
        m = std::min(m, 0.5 * g.L - std::abs(x[1]));
        m = std::min(m, 0.5 * g.L - std::abs(x[2]));
        d(i, j, k) = m;
      }
  return d;
}

inline double integrate(const RealField& f, const Grid& g) {
  require_same_grid(f.grid, g, "integrate");
  double s = 0;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) s += g.weight(i, j, k) * f(i, j, k);
  return s;
}

namespace detail {

// Second-order first-derivative stencil along one axis: centered in the
// interior, one-sided (3-point) at the two ends. Emits (index, coefficient)
// pairs with the 1/h factor included.
template <class F>
inline void d1_stencil(int n, double h, int i, F&& emit) {
  if (i == 0) {
    emit(0, -1.5 / h);
    emit(1, 2.0 / h);
    emit(2, -0.5 / h);
  } else if (i == n - 1) {
    emit(n - 1, 1.5 / h);
    emit(n - 2, -2.0 / h);
    emit(n - 3, 0.5 / h);
  } else {
    emit(i - 1, -0.5 / h);
    emit(i + 1, 0.5 / h);
  }
}

// d/dx_axis of a node-sampled quantity, fetched through `get`.
template <class T, class Get>
inline T partial_at(const Grid& g, int i, int j, int k, int axis, Get&& get) {
  T acc{};
  int pos = axis == 0 ? i : (axis == 1 ? j : k);
  d1_stencil(g.n, g.h(), pos, [&](int p, double c) {
    int ii = axis == 0 ? p : i;
    int jj = axis == 1 ? p : j;
    int kk = axis == 2 ? p : k;
    acc += c * get(ii, jj, kk);
  });
  return acc;
}

}  // namespace detail

template <class T>
inline FieldT<T> apply_partial(const FieldT<T>& f, int axis) {
  FieldT<T> out(f.grid);
  const Grid& g = f.grid;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i)
        out(i, j, k) = detail::partial_at<T>(
            g, i, j, k, axis, [&](int a, int b, int c) { return f(a, b, c); });
  return out;
}

inline CVectorField apply_grad(const ScalarField& f, const Grid& g) {
  require_same_grid(f.grid, g, "apply_grad");
  CVectorField out(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i)
        for (int d = 0; d < 3; ++d)
          out(i, j, k)[d] = detail::partial_at<cplx>(
              g, i, j, k, d, [&](int a, int b, int c) { return f(a, b, c); });
  return out;
}

inline VectorField apply_grad(const RealField& f, const Grid& g) {
  require_same_grid(f.grid, g, "apply_grad");
  VectorField out(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i)
        for (int d = 0; d < 3; ++d)
          out(i, j, k)[d] = detail::partial_at<double>(
              g, i, j, k, d, [&](int a, int b, int c) { return f(a, b, c); });
  return out;
}

inline RealField apply_div(const VectorField& u, const Grid& g) {
  require_same_grid(u.grid, g, "apply_div");
  RealField out(g);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        double s = 0;
        for (int d = 0; d < 3; ++d)
          s += detail::partial_at<double>(
              g, i, j, k, d, [&](int a, int b, int c) { return u(a, b, c)[d]; });
        out(i, j, k) = s;
      }
  return out;
}

inline VectorField apply_curl(const VectorField& u, const Grid& g) {
  require_same_grid(u.grid, g, "apply_curl");
  VectorField out(g);
  auto comp = [&](int a, int b, int c, int d) { return u(a, b, c)[d]; };
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        auto dpart = [&](int axis, int d) {
          return detail::partial_at<double>(
              g, i, j, k, axis,
              [&](int a, int b, int c) { return comp(a, b, c, d); });
        };
        out(i, j, k) = {dpart(1, 2) - dpart(2, 1),
                        dpart(2, 0) - dpart(0, 2),
                        dpart(0, 1) - dpart(1, 0)};
      }
  return out;
}

/// Componentwise div(grad(.)) Laplacian built from the first-order stencils.
inline RealField apply_laplacian(const RealField& f, const Grid& g) {
  RealField out(g, 0.0);
  for (int d = 0; d < 3; ++d) {
    RealField df = apply_partial(f, d);
    RealField ddf = apply_partial(df, d);
    for (std::size_t m = 0; m < out.v.size(); ++m) out.v[m] += ddf.v[m];
  }
  return out;
}

inline VectorField apply_vector_laplacian(const VectorField& u, const Grid& g) {
  VectorField out(g);
  for (int d = 0; d < 3; ++d) {
    RealField comp(g);
    for (int m = 0; m < g.nodes(); ++m) comp.v[m] = u.v[m][d];
    RealField lap = apply_laplacian(comp, g);
    for (int m = 0; m < g.nodes(); ++m) out.v[m][d] = lap.v[m];
  }
  return out;
}

// L2 norms and inner products in the trapezoid quadrature.

inline double norm_l2(const ScalarField& f) {
  double s = 0;
  const Grid& g = f.grid;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) s += g.weight(i, j, k) * std::norm(f(i, j, k));
  return std::sqrt(s);
}

inline double norm_l2(const VectorField& u) {
  double s = 0;
  const Grid& g = u.grid;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const Vec3& x = u(i, j, k);
        s += g.weight(i, j, k) * dot3(x, x);
      }
  return std::sqrt(s);
}

inline double max_abs(const RealField& f) {
  double m = 0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_norm(const VectorField& u) {
  double m = 0;
  for (const Vec3& x : u.v) m = std::max(m, norm3(x));
  return m;
}

inline double max_modulus(const ScalarField& f) {
  double m = 0;
  for (const cplx& z : f.v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace ldg
