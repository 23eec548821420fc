#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ldg/grid.hpp"

namespace ldg {

/// Random smooth scalar sample: a seeded combination of low-wavenumber
/// cosine products (plus a constant term), scaled to O(1) amplitude.
inline RealField random_smooth_scalar(const Grid& g, int max_mode,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double pi = std::numbers::pi;
  RealField f(g, 0.0);
  double c0 = unif(rng);
  for (auto& x : f.v) x = c0;
  for (int a = 0; a <= max_mode; ++a)
    for (int b = 0; b <= max_mode; ++b)
      for (int c = 0; c <= max_mode; ++c) {
        if (a + b + c == 0) continue;
        double amp = unif(rng) / (1.0 + a + b + c);
        double pa = unif(rng) * pi, pb = unif(rng) * pi, pc = unif(rng) * pi;
        for (int k = 0; k < g.n; ++k)
          for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
              Vec3 x = g.point(i, j, k);
              f(i, j, k) += amp * std::cos(a * pi * x[0] / g.L + pa) *
                            std::cos(b * pi * x[1] / g.L + pb) *
                            std::cos(c * pi * x[2] / g.L + pc);
            }
      }
  return f;
}

/// Random smooth vector sample. With `dirichlet` set, components are sine
/// products vanishing on the cube boundary.
inline VectorField random_smooth_vector(const Grid& g, int max_mode,
                                        std::uint64_t seed, bool dirichlet) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double pi = std::numbers::pi;
  VectorField u(g);
  if (!dirichlet) {
    for (int d = 0; d < 3; ++d) {
      RealField comp = random_smooth_scalar(g, max_mode, rng());
      for (int m = 0; m < g.nodes(); ++m) u.v[m][d] = comp.v[m];
    }
    return u;
  }
  for (int d = 0; d < 3; ++d)
    for (int a = 1; a <= max_mode; ++a)
      for (int b = 1; b <= max_mode; ++b)
        for (int c = 1; c <= max_mode; ++c) {
          double amp = unif(rng) / (a + b + c);
          for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
              for (int i = 0; i < g.n; ++i) {
                Vec3 x = g.point(i, j, k);
                double sx = std::sin(a * pi * (x[0] / g.L + 0.5));
                double sy = std::sin(b * pi * (x[1] / g.L + 0.5));
                double sz = std::sin(c * pi * (x[2] / g.L + 0.5));
                u(i, j, k)[d] += amp * sx * sy * sz;
              }
        }
  return u;
}

}  // namespace ldg
