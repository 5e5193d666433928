#include "penudge/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "penudge/detail/fft.hpp"

namespace penudge {
namespace {

// Sum over levels/modes of w(iz) * weight(k) * Re(a conj b), scaled by area.
// With our normalisation the grid sum of f*g over a level is
// nx*ny * sum_k a_k conj(b_k).
template <class W>
double spectral_inner(const GridSpec& g, const SpectralScalar& a, const SpectralScalar& b,
                      W&& weight) {
  const auto wz = g.trapezoid_weights();
  double total = 0.0;
  for (int iz = 0; iz < g.nz; ++iz) {
    double level = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        level += weight(i, j) * (a(i, j, iz) * std::conj(b(i, j, iz))).real();
    total += wz[iz] * level;
  }
  return total * g.lx * g.ly;
}

// Forward-difference energy between levels, midpoint rule in z.
template <class W>
double vertical_diff_inner(const GridSpec& g, const SpectralScalar& a,
                           const SpectralScalar& b, W&& weight) {
  const double dz = g.dz();
  double total = 0.0;
  for (int iz = 0; iz + 1 < g.nz; ++iz) {
    double level = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const Complex da = (a(i, j, iz + 1) - a(i, j, iz)) / dz;
        const Complex db = (b(i, j, iz + 1) - b(i, j, iz)) / dz;
        level += weight(i, j) * (da * std::conj(db)).real();
      }
    total += dz * level;
  }
  return total * g.lx * g.ly;
}

double second_vertical_sq(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const double h2 = g.dz() * g.dz();
  const int top = g.nz - 1;
  const auto wz = g.trapezoid_weights();
  double total = 0.0;
  for (int iz = 0; iz < g.nz; ++iz) {
    double level = 0.0;
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iy = 0; iy < g.ny; ++iy) {
        double d;
        if (iz == 0)
          d = (2.0 * f(ix, iy, 0) - 5.0 * f(ix, iy, 1) + 4.0 * f(ix, iy, 2) -
               f(ix, iy, 3)) / h2;
        else if (iz == top)
          d = (2.0 * f(ix, iy, top) - 5.0 * f(ix, iy, top - 1) +
               4.0 * f(ix, iy, top - 2) - f(ix, iy, top - 3)) / h2;
        else
          d = (f(ix, iy, iz + 1) - 2.0 * f(ix, iy, iz) + f(ix, iy, iz - 1)) / h2;
        level += d * d;
      }
    total += wz[iz] * level;
  }
  return total * g.cell_area();
}

double norm_sq(const ScalarField& f, NormOrder order) {
  const GridSpec& g = f.grid();
  double total = inner(f, f);
  if (order == NormOrder::L2) return total;
  const auto F = to_spectral(f);
  total += spectral_inner(g, F, F, [&](int i, int j) { return g.k_squared(i, j); });
  total += vertical_diff_inner(g, F, F, [](int, int) { return 1.0; });
  if (order == NormOrder::H1) return total;
  total += spectral_inner(g, F, F, [&](int i, int j) {
    const double k2 = g.k_squared(i, j);
    return k2 * k2;
  });
  total += 2.0 * vertical_diff_inner(g, F, F,
                                     [&](int i, int j) { return g.k_squared(i, j); });
  total += second_vertical_sq(f);
  return total;
}

}  // namespace

double norm(const ScalarField& f, NormOrder order) {
  return std::sqrt(std::max(0.0, norm_sq(f, order)));
}

double norm(const HVelocity& v, NormOrder order) {
  return std::sqrt(std::max(0.0, norm_sq(v.c1, order) + norm_sq(v.c2, order)));
}

double grad_inner(const ScalarField& f, const ScalarField& h) {
  const GridSpec& g = f.grid();
  const auto F = to_spectral(f);
  const auto H = to_spectral(h);
  return spectral_inner(g, F, H, [&](int i, int j) { return g.k_squared(i, j); }) +
         vertical_diff_inner(g, F, H, [](int, int) { return 1.0; });
}

double grad_inner(const HVelocity& f, const HVelocity& g) {
  return grad_inner(f.c1, g.c1) + grad_inner(f.c2, g.c2);
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   double t_a, double t_b) {
  if (times.size() != values.size())
    throw ConfigError("fit_decay: times and values differ in length");
  if (!(t_a < t_b)) throw ConfigError("fit_decay: empty window");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a || times[i] > t_b) continue;
    if (!(values[i] > 0.0))
      throw NumericalError("fit_decay: non-positive value at t = " +
                           std::to_string(times[i]) +
                           " (window must precede the floating-point floor)");
    xs.push_back(times[i]);
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 2) throw NumericalError("fit_decay: fewer than two samples in window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  fit.t_a = t_a;
  fit.t_b = t_b;
  fit.samples = static_cast<int>(xs.size());
  // A flat series is fitted exactly.
  const double ss_res = std::max(0.0, syy - slope * sxy);
  fit.r_squared = syy > 1e-300 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::pair<double, double> default_decay_window(std::span<const double> times,
                                               std::span<const double> values,
                                               double floor) {
  if (times.empty()) throw ConfigError("default_decay_window: empty series");
  const double t0 = times.front();
  const double T = times.back() - t0;
  double t_a = t0 + 0.2 * T;
  double t_b = t0 + 0.8 * T;
  const double level = floor * values.front();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] <= level) {
      const double last_good = i > 0 ? times[i - 1] : times[0];
      t_b = std::min(t_b, last_good);
      break;
    }
  }
  return {t_a, t_b};
}

PlateauEstimate plateau(std::span<const double> times, std::span<const double> values,
                        double tail_fraction) {
  if (values.size() < 10) throw ConfigError("plateau: need at least 10 samples");
  if (times.size() != values.size())
    throw ConfigError("plateau: times and values differ in length");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw ConfigError("plateau: tail_fraction must lie in (0, 1]");
  const std::size_t n = values.size();
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  const std::size_t first = n - std::min(count, n);
  PlateauEstimate p;
  p.level = *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(first),
                              values.end());
  p.t_from = times[first];
  p.t_to = times.back();
  return p;
}

double scaling_fit(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw ConfigError("scaling_fit: need at least 3 pairs");
  double lo = pairs.front().first, hi = lo;
  for (const auto& [d, p] : pairs) {
    if (!(d > 0.0) || !(p > 0.0))
      throw NumericalError("scaling_fit: all deltas and levels must be positive");
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi / lo < 2.0) throw ConfigError("scaling_fit: delta spread below a factor of 2");
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [d, p] : pairs) {
    mx += std::log(d);
    my += std::log(p);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [d, p] : pairs) {
    const double x = std::log(d) - mx;
    sxx += x * x;
    sxy += x * (std::log(p) - my);
  }
  return sxy / sxx;
}

std::vector<double> energy_budget(std::span<const EnergyTerms> steps) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const auto& a = steps[i];
    const auto& b = steps[i + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) throw NumericalError("energy_budget: non-increasing times");
    out.push_back((b.half_norm_sq - a.half_norm_sq) / dt +
                  0.5 * (a.dissipation + b.dissipation) + 0.5 * (a.nudging + b.nudging) -
                  0.5 * (a.forcing + b.forcing));
  }
  return out;
}

}  // namespace penudge
