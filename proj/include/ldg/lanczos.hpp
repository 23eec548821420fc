#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace ldg {

struct EigOptions {
  double tol = 1e-8;          // residual tolerance, relative to max(1, |lambda|)
  std::uint64_t seed = 1;     // start-vector seed
  int max_matvecs = 10000;
  int basis_max = 60;
  int keep = 10;              // Ritz vectors retained at restart
};

template <class Scalar>
struct EigenPairResult {
  double eigenvalue = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
  int matvecs = 0;
  double residual = 0;
  bool converged = false;
};

/// Smallest eigenpair of a Hermitian operator by restarted Rayleigh-Ritz
/// with residual expansion (thick restart). The basis is kept fully
/// orthonormal, which is what makes the method dependable on the stiff,
/// small-gap operators the fine grids produce. Deterministic for a fixed
/// seed. ApplyFn has signature apply(const Vec& x, Vec& y).
template <class Scalar, class ApplyFn>
EigenPairResult<Scalar> smallest_eigenpair(Eigen::Index dim, ApplyFn&& apply,
                                           const EigOptions& opt = {}) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const int m_max = static_cast<int>(std::min<Eigen::Index>(opt.basis_max, dim));
  const int keep = std::max(1, std::min(opt.keep, m_max - 2));

  Mat V(dim, m_max);
  Mat AV(dim, m_max);
  Mat H = Mat::Zero(m_max, m_max);
  int m = 0;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_vec = [&]() {
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
        v[i] = Scalar(unif(rng), unif(rng));
      else
        v[i] = Scalar(unif(rng));
    }
    return v;
  };

  // Two-pass Gram-Schmidt against the current basis; false if t is
  // numerically inside the span.
  auto orthonormalize = [&](Vec& t) {
    double n0 = t.norm();
    if (n0 == 0) return false;
    for (int pass = 0; pass < 2; ++pass)
      if (m > 0) t -= V.leftCols(m) * (V.leftCols(m).adjoint() * t).eval();
    double nt = t.norm();
    if (nt <= 1e-10 * n0 || nt == 0) return false;
    t /= nt;
    return true;
  };

  EigenPairResult<Scalar> res;
  Vec work(dim);
  auto append = [&](const Vec& v) {
    apply(v, work);
    ++res.matvecs;
    V.col(m) = v;
    AV.col(m) = work;
    for (int i = 0; i <= m; ++i) {
      Scalar hij = V.col(i).dot(AV.col(m));
      H(i, m) = hij;
      H(m, i) = Eigen::numext::conj(hij);
    }
    ++m;
  };

  {
    Vec v0 = random_vec();
    v0 /= v0.norm();
    append(v0);
  }

  double theta = 0;
  Vec x(dim), Ax(dim), r(dim);

  while (true) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H.topLeftCorner(m, m));
    const auto& evals = es.eigenvalues();
    const Mat Y = es.eigenvectors();
    theta = evals(0);
    x.noalias() = V.leftCols(m) * Y.col(0);
    Ax.noalias() = AV.leftCols(m) * Y.col(0);
    r = Ax - Scalar(theta) * x;
    res.residual = r.norm();

    if (res.residual <= opt.tol * std::max(1.0, std::abs(theta))) {
      res.converged = true;
      break;
    }
    if (res.matvecs >= opt.max_matvecs) break;

    if (m == m_max) {
      // Thick restart: compress onto the `keep` lowest Ritz vectors.
      Mat Vk = V.leftCols(m) * Y.leftCols(keep);
      Mat AVk = AV.leftCols(m) * Y.leftCols(keep);
      V.leftCols(keep) = Vk;
      AV.leftCols(keep) = AVk;
      H.setZero();
      for (int i = 0; i < keep; ++i) H(i, i) = Scalar(evals(i));
      m = keep;
    }

    Vec t = r;
    if (!orthonormalize(t)) {
      t = random_vec();
      if (!orthonormalize(t)) break;
    }
    append(t);
  }

  res.eigenvalue = theta;
  res.vector = x;
  double nx = res.vector.norm();
  if (nx > 0) res.vector /= nx;
  return res;
}

}  // namespace ldg
