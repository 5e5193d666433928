#include "penudge/hydrostatic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "penudge/detail/fft.hpp"

namespace penudge {
namespace {

GridSpec plane_grid(const GridSpec& g) {
  GridSpec p = g;
  p.nz = 1;
  return p;
}

std::vector<double> mean_over_depth(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const auto w = g.trapezoid_weights();
  const std::size_t plane = g.plane();
  std::vector<double> m(plane, 0.0);
  const auto v = f.values();
  for (int iz = 0; iz < g.nz; ++iz)
    for (std::size_t p = 0; p < plane; ++p) m[p] += w[iz] * v[iz * plane + p];
  for (double& x : m) x /= g.l;
  return m;
}

std::vector<Complex> mean_over_depth(const GridSpec& g, std::span<const Complex> F) {
  const auto w = g.trapezoid_weights();
  const std::size_t plane = g.plane();
  std::vector<Complex> m(plane);
  for (int iz = 0; iz < g.nz; ++iz)
    for (std::size_t p = 0; p < plane; ++p) m[p] += w[iz] * F[iz * plane + p];
  for (auto& x : m) x /= g.l;
  return m;
}

// Removes k (k . mean_k)/|k|^2 * profile[iz] from every mode.
HVelocity remove_gradient(const HVelocity& phi, const std::vector<double>& profile) {
  const GridSpec& g = phi.grid();
  SpectralScalar a = to_spectral(phi.c1), b = to_spectral(phi.c2);
  const auto ma = mean_over_depth(g, a.coeffs());
  const auto mb = mean_over_depth(g, b.coeffs());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double k2 = g.k_squared(i, j);
      if (k2 == 0.0) continue;
      const double kx = g.kx(i), ky = g.ky(j);
      const std::size_t p = static_cast<std::size_t>(i) * g.ny + j;
      const Complex s = (kx * ma[p] + ky * mb[p]) / k2;
      for (int iz = 0; iz < g.nz; ++iz) {
        a(i, j, iz) -= kx * s * profile[iz];
        b(i, j, iz) -= ky * s * profile[iz];
      }
    }
  HVelocity out(g);
  detail::fft_inverse_real(g, a.coeffs(), out.c1.values());
  detail::fft_inverse_real(g, b.coeffs(), out.c2.values());
  return out;
}

}  // namespace

namespace {

void require_constraint(const HVelocity& v, double bound) {
  const double res = check_div_constraint(v);
  if (!(res <= bound)) {
    std::ostringstream os;
    os << "depth-averaged divergence residual " << res << " exceeds " << bound;
    throw ConstraintError(os.str());
  }
}

}  // namespace

ProjectedVelocity ProjectedVelocity::checked(HVelocity v, double rel_tol) {
  require_constraint(v, rel_tol * std::sqrt(std::max(0.0, inner(v, v))));
  return ProjectedVelocity(std::move(v));
}

ProjectedVelocity ProjectedVelocity::difference(const ProjectedVelocity& a,
                                                const ProjectedVelocity& b) {
  const double scale = std::sqrt(inner(a.v_, a.v_)) + std::sqrt(inner(b.v_, b.v_));
  return checked_at_scale(a.v_ - b.v_, scale);
}

ProjectedVelocity ProjectedVelocity::checked_at_scale(HVelocity v, double scale) {
  require_constraint(v, kTolerance * scale);
  return ProjectedVelocity(std::move(v));
}

ScalarField depth_average(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const auto m = mean_over_depth(f);
  ScalarField out(g);
  auto v = out.values();
  const std::size_t plane = g.plane();
  for (int iz = 0; iz < g.nz; ++iz)
    std::copy(m.begin(), m.end(), v.begin() + iz * plane);
  return out;
}

HVelocity depth_average(const HVelocity& v) {
  return HVelocity(depth_average(v.c1), depth_average(v.c2));
}

ProjectedVelocity project(const HVelocity& phi) {
  const std::vector<double> ones(phi.grid().nz, 1.0);
  return ProjectedVelocity::checked_at_scale(remove_gradient(phi, ones),
                                            std::sqrt(inner(phi, phi)));
}

ProjectedVelocity project_bc_compatible(const HVelocity& phi) {
  const GridSpec& g = phi.grid();
  std::vector<double> profile(g.nz);
  for (int iz = 0; iz < g.nz; ++iz)
    profile[iz] = std::sin(std::numbers::pi * (g.z(iz) + g.l) / (2.0 * g.l));
  const auto w = g.trapezoid_weights();
  double mean = 0.0;
  for (int iz = 0; iz < g.nz; ++iz) mean += w[iz] * profile[iz];
  mean /= g.l;
  for (double& p : profile) p /= mean;
  return ProjectedVelocity::checked_at_scale(remove_gradient(phi, profile),
                                            std::sqrt(inner(phi, phi)));
}

ScalarField div_horizontal(const HVelocity& v) {
  const GridSpec& g = v.grid();
  auto d = d_horizontal(to_spectral(v.c1), 1);
  d += d_horizontal(to_spectral(v.c2), 2);
  ScalarField out(g);
  detail::fft_inverse_real(g, d.coeffs(), out.values());
  return out;
}

ScalarField compute_w(const HVelocity& v) {
  return compute_w(ProjectedVelocity::checked(v));
}

ScalarField compute_w(const ProjectedVelocity& pv) {
  const HVelocity& v = pv.velocity();
  auto w = integrate_vertical(div_horizontal(v));
  w *= -1.0;
  return w;
}

double check_div_constraint(const HVelocity& v) {
  const GridSpec& g = v.grid();
  const GridSpec pg = plane_grid(g);
  const auto m1 = mean_over_depth(v.c1);
  const auto m2 = mean_over_depth(v.c2);
  std::vector<Complex> a(pg.size()), b(pg.size());
  detail::fft_forward(pg, m1, a);
  detail::fft_forward(pg, m2, b);
  double res = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * g.ny + j;
      const Complex d = Complex(0.0, g.kx(i)) * a[p] + Complex(0.0, g.ky(j)) * b[p];
      res = std::max(res, 2.0 * std::abs(d));
    }
  return res;
}

}  // namespace penudge
