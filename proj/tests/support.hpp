#pragma once

// Shared fixtures for the unit suites.

#include <cmath>
#include <numbers>
#include <random>

#include "penudge/grid.hpp"
#include "penudge/hydrostatic.hpp"

namespace testing {

using namespace penudge;
inline constexpr double kPi = std::numbers::pi;

inline GridSpec small_grid(int n = 16, int nz = 9, double l = 1.0) {
  GridSpec g;
  g.nx = n;
  g.ny = n;
  g.nz = nz;
  g.l = l;
  return g;
}

/// Random field built from a handful of low modes with random vertical
/// profiles that vanish at the bottom; exactly band limited.
inline ScalarField random_smooth(const GridSpec& g, unsigned seed, int band = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ScalarField f(g);
  for (int a = -band; a <= band; ++a)
    for (int b = -band; b <= band; ++b) {
      const double c = n(rng), d = n(rng), e = n(rng), ph = n(rng);
      f += sample(g, [&](double x, double y, double z) {
        const double s = (z + g.l) / g.l;
        return (c * std::sin(kPi * s / 2) + d * s * s * (1.5 - s) + e * std::sin(kPi * s)) *
               std::cos(a * x + b * y + ph);
      });
    }
  return f;
}

/// Uncorrelated nodal noise: not band limited.
inline ScalarField random_nodal(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values()) v = n(rng);
  return f;
}

inline HVelocity random_velocity(const GridSpec& g, unsigned seed, int band = 3) {
  return HVelocity(random_smooth(g, seed, band), random_smooth(g, seed + 1000, band));
}

/// Independent L2 norm: straight trapezoid-in-z node sum.
inline double l2_direct(const ScalarField& f) {
  const GridSpec& g = f.grid();
  double s = 0.0;
  for (int iz = 0; iz < g.nz; ++iz) {
    const double w = (iz == 0 || iz == g.nz - 1) ? 0.5 * g.dz() : g.dz();
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iy = 0; iy < g.ny; ++iy) s += w * f(ix, iy, iz) * f(ix, iy, iz);
  }
  return std::sqrt(s * g.cell_area());
}

inline double l2_direct(const HVelocity& v) {
  return std::hypot(l2_direct(v.c1), l2_direct(v.c2));
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline double max_diff(const HVelocity& a, const HVelocity& b) {
  return std::max(max_diff(a.c1, b.c1), max_diff(a.c2, b.c2));
}

}  // namespace testing
