#include "penudge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "penudge/detail/fft.hpp"
#include "penudge/detail/random.hpp"
#include "penudge/diagnostics.hpp"

namespace penudge {

// ---------------------------------------------------------------------------
// SpectralVelocity

SpectralVelocity& SpectralVelocity::operator+=(const SpectralVelocity& o) {
  c1 += o.c1;
  c2 += o.c2;
  return *this;
}
SpectralVelocity& SpectralVelocity::operator-=(const SpectralVelocity& o) {
  c1 -= o.c1;
  c2 -= o.c2;
  return *this;
}
SpectralVelocity& SpectralVelocity::operator*=(double a) {
  c1 *= a;
  c2 *= a;
  return *this;
}

SpectralVelocity to_spectral(const HVelocity& v) {
  return {to_spectral(v.c1), to_spectral(v.c2)};
}

HVelocity to_physical(const SpectralVelocity& v) {
  const GridSpec& g = v.grid();
  HVelocity out(g);
  detail::fft_inverse_real(g, v.c1.coeffs(), out.c1.values());
  detail::fft_inverse_real(g, v.c2.coeffs(), out.c2.values());
  return out;
}

void dealias(SpectralVelocity& v) {
  dealias(v.c1);
  dealias(v.c2);
}

double inner(const SpectralVelocity& a, const SpectralVelocity& b) {
  const GridSpec& g = a.grid();
  const auto wz = g.trapezoid_weights();
  const std::size_t plane = g.plane();
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto x = a[c].coeffs();
    const auto y = b[c].coeffs();
    for (int iz = 0; iz < g.nz; ++iz) {
      double level = 0.0;
      for (std::size_t p = 0; p < plane; ++p)
        level += (x[iz * plane + p] * std::conj(y[iz * plane + p])).real();
      total += wz[iz] * level;
    }
  }
  return total * g.lx * g.ly;
}

// ---------------------------------------------------------------------------
// Forcing

namespace {

std::vector<double> quarter_sine(const GridSpec& g) {
  std::vector<double> s(g.nz);
  for (int iz = 0; iz < g.nz; ++iz)
    s[iz] = std::sin(std::numbers::pi * (g.z(iz) + g.l) / (2.0 * g.l));
  return s;
}

HVelocity with_profile(const GridSpec& g, const std::vector<double>& prof,
                       const std::function<std::array<double, 2>(double, double)>& h) {
  HVelocity out(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy) {
      const auto val = h(g.x(ix), g.y(iy));
      for (int iz = 0; iz < g.nz; ++iz) {
        out.c1(ix, iy, iz) = val[0] * prof[iz];
        out.c2(ix, iy, iz) = val[1] * prof[iz];
      }
    }
  return out;
}

HVelocity broadband_pattern(const ForcingSpec& spec, const GridSpec& g) {
  detail::Rng rng(detail::split_seed(spec.seed, 0));
  const double kmax = spec.wavenumber;
  SpectralScalar a(g), b(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const int m1 = GridSpec::mode_index(i, g.nx), m2 = GridSpec::mode_index(j, g.ny);
      const bool upper = m1 > 0 || (m1 == 0 && m2 > 0);
      const double m = std::hypot(m1, m2);
      if (!upper || m > kmax + 1e-12 || !g.retained(i, j)) continue;
      const double phase = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const Complex c = std::polar(1.0 / m, phase);
      const double kx = g.kx(i), ky = g.ky(j), kk = std::hypot(kx, ky);
      const int mi = (g.nx - i) % g.nx, mj = (g.ny - j) % g.ny;
      a(i, j, 0) = -ky / kk * c;
      b(i, j, 0) = kx / kk * c;
      a(mi, mj, 0) = std::conj(a(i, j, 0));
      b(mi, mj, 0) = std::conj(b(i, j, 0));
    }
  ScalarField p1(g), p2(g);
  detail::fft_inverse_real(g, a.coeffs(), p1.values());
  detail::fft_inverse_real(g, b.coeffs(), p2.values());
  const auto prof = quarter_sine(g);
  HVelocity out(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int iz = 0; iz < g.nz; ++iz) {
        out.c1(ix, iy, iz) = p1(ix, iy, 0) * prof[iz];
        out.c2(ix, iy, iz) = p2(ix, iy, 0) * prof[iz];
      }
  const double rms = std::sqrt(inner(out, out) / g.volume());
  if (rms > 0.0) out *= 1.0 / rms;
  return out;
}

}  // namespace

const char* to_string(ForcingPattern p) {
  switch (p) {
    case ForcingPattern::None: return "none";
    case ForcingPattern::Shear: return "shear";
    case ForcingPattern::Cellular: return "cellular";
    case ForcingPattern::Broadband: return "broadband";
  }
  return "?";
}

double ForcingSpec::time_factor(double t) const {
  return mean + modulation * std::sin(omega * t);
}

SpectralVelocity forcing_pattern(const ForcingSpec& spec, const GridSpec& g) {
  thread_local std::deque<std::pair<std::pair<ForcingSpec, GridSpec>, SpectralVelocity>> cache;
  for (const auto& [key, val] : cache)
    if (key.first == spec && key.second == g) return val;

  const double sx = 2.0 * std::numbers::pi / g.lx, sy = 2.0 * std::numbers::pi / g.ly;
  const double k = spec.wavenumber;
  const auto prof = quarter_sine(g);
  HVelocity f(g);
  switch (spec.pattern) {
    case ForcingPattern::None: break;
    case ForcingPattern::Shear:
      f = with_profile(g, prof, [&](double, double y) {
        return std::array<double, 2>{std::sin(k * sy * y), 0.0};
      });
      break;
    case ForcingPattern::Cellular:
      f = with_profile(g, prof, [&](double x, double y) {
        return std::array<double, 2>{-std::sin(k * sx * x) * std::cos(k * sy * y),
                                     std::cos(k * sx * x) * std::sin(k * sy * y)};
      });
      break;
    case ForcingPattern::Broadband: f = broadband_pattern(spec, g); break;
  }
  f *= spec.amplitude;
  auto F = to_spectral(f);
  dealias(F);
  cache.emplace_back(std::make_pair(spec, g), F);
  if (cache.size() > 8) cache.pop_front();
  return F;
}

HVelocity evaluate_forcing(const ForcingSpec& spec, const GridSpec& g, double t) {
  auto F = forcing_pattern(spec, g);
  F *= spec.time_factor(t);
  return to_physical(F);
}

void SimParams::validate() const {
  grid.validate();
  if (!(dt > 0.0)) throw ConfigError("sim: dt must be positive");
  if (!(nu > 0.0)) throw ConfigError("sim: nu must be positive");
  if (!(cfl_max > 0.0 && cfl_max < 1.0)) throw ConfigError("sim: cfl_max must lie in (0, 1)");
  if (!(t_end >= 0.0)) throw ConfigError("sim: t_end must be non-negative");
  if (!(sample_interval > 0.0)) throw ConfigError("sim: sample_interval must be positive");
}

// ---------------------------------------------------------------------------
// Operators

namespace detail {

SpectralVelocity advect(const HVelocity& u, const ScalarField& w, const HVelocity& target) {
  const GridSpec& g = u.grid();
  const std::size_t plane = g.plane();
  const double dz = g.dz();
  const auto uu1 = u.c1.values();
  const auto uu2 = u.c2.values();
  const auto ww = w.values();
  SpectralVelocity out(g);

  std::vector<double> col(g.nz), dcol(g.nz);
  std::vector<double> phys(g.size()), tmp(g.size());
  std::vector<Complex> spec(g.size()), prod(g.size());

  for (int c = 0; c < 2; ++c) {
    const auto T = target[c].values();
    SpectralScalar That = to_spectral(target[c]);

    // 0.5 (v . grad_H T)
    auto d1 = d_horizontal(That, 1);
    fft_inverse_real(g, d1.coeffs(), tmp);
    for (std::size_t p = 0; p < g.size(); ++p) phys[p] = 0.5 * uu1[p] * tmp[p];
    auto d2 = d_horizontal(That, 2);
    fft_inverse_real(g, d2.coeffs(), tmp);
    for (std::size_t p = 0; p < g.size(); ++p) phys[p] += 0.5 * uu2[p] * tmp[p];

    // 0.5 (w dT/dz + d(wT)/dz), summation-by-parts columns
    for (std::size_t p = 0; p < plane; ++p) {
      for (int iz = 0; iz < g.nz; ++iz) col[iz] = T[iz * plane + p];
      d_vertical_sbp(col, dcol, dz);
      for (int iz = 0; iz < g.nz; ++iz) phys[iz * plane + p] += 0.5 * ww[iz * plane + p] * dcol[iz];
      for (int iz = 0; iz < g.nz; ++iz) col[iz] = ww[iz * plane + p] * T[iz * plane + p];
      d_vertical_sbp(col, dcol, dz);
      for (int iz = 0; iz < g.nz; ++iz) phys[iz * plane + p] += 0.5 * dcol[iz];
    }
    fft_forward(g, std::span<const double>(phys), spec);

    // 0.5 div_H(v T)
    for (int a = 0; a < 2; ++a) {
      const auto ua = a == 0 ? uu1 : uu2;
      for (std::size_t p = 0; p < g.size(); ++p) tmp[p] = ua[p] * T[p];
      fft_forward(g, std::span<const double>(tmp), prod);
      for (int iz = 0; iz < g.nz; ++iz)
        for (int i = 0; i < g.nx; ++i)
          for (int j = 0; j < g.ny; ++j) {
            const std::size_t q = g.index(i, j, iz);
            const double k = a == 0 ? g.kx(i) : g.ky(j);
            spec[q] += 0.5 * Complex(0.0, k) * prod[q];
          }
    }
    auto& dst = out[c].raw();
    dst.assign(spec.begin(), spec.end());
  }
  dealias(out);
  return out;
}

}  // namespace detail

HVelocity advection(const ProjectedVelocity& v, const HVelocity& target) {
  const auto w = compute_w(v);
  return to_physical(detail::advect(v.velocity(), w, target));
}

HVelocity diffusion(const HVelocity& v) {
  const GridSpec& g = v.grid();
  HVelocity out(g);
  for (int c = 0; c < 2; ++c) {
    auto F = to_spectral(v[c]);
    for (int iz = 0; iz < g.nz; ++iz)
      for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) F(i, j, iz) *= -g.k_squared(i, j);
    ScalarField lap(g);
    detail::fft_inverse_real(g, F.coeffs(), lap.values());
    lap += d2_vertical(v[c]);
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iy = 0; iy < g.ny; ++iy) lap(ix, iy, 0) = 0.0;
    out[c] = std::move(lap);
  }
  return out;
}

ProjectedVelocity seed_state(const GridSpec& g, double amplitude) {
  const double sx = 2.0 * std::numbers::pi / g.lx, sy = 2.0 * std::numbers::pi / g.ly;
  const auto s1 = quarter_sine(g);
  std::vector<double> s3(g.nz);
  for (int iz = 0; iz < g.nz; ++iz)
    s3[iz] = std::sin(3.0 * std::numbers::pi * (g.z(iz) + g.l) / (2.0 * g.l));
  const auto w = g.trapezoid_weights();
  double m1 = 0.0, m3 = 0.0;
  for (int iz = 0; iz < g.nz; ++iz) {
    m1 += w[iz] * s1[iz];
    m3 += w[iz] * s3[iz];
  }
  std::vector<double> sbc(g.nz);
  for (int iz = 0; iz < g.nz; ++iz) sbc[iz] = s3[iz] - (m3 / m1) * s1[iz];

  // psi = cos(y) + 0.6 sin(x + y) + 0.4 cos(2x - y), in scaled coordinates
  auto rot = with_profile(g, s1, [&](double x, double y) {
    const double X = sx * x, Y = sy * y;
    const double psi_x = 0.6 * std::cos(X + Y) * sx - 0.8 * std::sin(2.0 * X - Y) * sx;
    const double psi_y = -std::sin(Y) * sy + 0.6 * std::cos(X + Y) * sy +
                         0.4 * std::sin(2.0 * X - Y) * sy;
    return std::array<double, 2>{-psi_y, psi_x};
  });
  // chi = sin(x) cos(y)
  auto bc = with_profile(g, sbc, [&](double x, double y) {
    const double X = sx * x, Y = sy * y;
    return std::array<double, 2>{std::cos(X) * std::cos(Y) * sx,
                                 -std::sin(X) * std::sin(Y) * sy};
  });
  rot += 0.5 * bc;
  rot *= amplitude;
  return ProjectedVelocity::checked(std::move(rot));
}

void check_cfl(const ProjectedVelocity& pv, const SimParams& p) {
  const HVelocity& v = pv.velocity();
  const GridSpec& g = v.grid();
  double speed = 0.0;
  const auto a = v.c1.values();
  const auto b = v.c2.values();
  for (std::size_t i = 0; i < a.size(); ++i) speed = std::max(speed, std::hypot(a[i], b[i]));
  const double wmax = compute_w(pv).max_abs();
  const double ch = p.dt * speed / std::min(g.dx(), g.dy());
  const double cv = p.dt * wmax / g.dz();
  if (!std::isfinite(ch) || !std::isfinite(cv) || ch > p.cfl_max || cv > p.cfl_max) {
    std::ostringstream os;
    os << "CFL violation: dt = " << p.dt << " gives horizontal Courant number " << ch
       << " and vertical " << cv << " (cfl_max " << p.cfl_max << ")";
    throw NumericalError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Time stepping

namespace detail {

ImexOperator::ImexOperator(const GridSpec& g, double nu, double dt, std::vector<double> damping)
    : grid_(g), nu_(nu), dt_(dt), n_(g.nz - 1), damping_(std::move(damping)) {
  const std::size_t modes = g.plane();
  if (damping_.size() != modes) throw ConfigError("ImexOperator: damping size mismatch");
  inv_denom_.assign(modes * n_, 0.0);
  upper_.assign(modes * n_, 0.0);
  response_.assign(modes * n_, 0.0);
  response_mean_.assign(modes, 0.0);
  const double r = dt * nu / (2.0 * g.dz() * g.dz());
  const auto w = g.trapezoid_weights();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const std::size_t m = static_cast<std::size_t>(i) * g.ny + j;
      if (!g.retained(i, j)) continue;
      const double alpha = 1.0 + 0.5 * dt * (nu * g.k_squared(i, j) + damping_[m]);
      const double diag = alpha + 2.0 * r;
      double* inv = &inv_denom_[m * n_];
      double* up = &upper_[m * n_];
      for (int row = 0; row < n_; ++row) {
        const double sub = row == 0 ? 0.0 : (row == n_ - 1 ? -2.0 * r : -r);
        const double denom = diag - (row == 0 ? 0.0 : sub * up[row - 1]);
        inv[row] = 1.0 / denom;
        up[row] = row == n_ - 1 ? 0.0 : -r / denom;
      }
      std::vector<Complex> ones(n_, 1.0);
      solve(m, ones);
      double mean = 0.0;
      for (int row = 0; row < n_; ++row) {
        response_[m * n_ + row] = ones[row].real();
        mean += w[row + 1] * ones[row].real();
      }
      response_mean_[m] = mean / g.l;
    }
}

void ImexOperator::solve(std::size_t m, std::vector<Complex>& d) const {
  const double r = dt_ * nu_ / (2.0 * grid_.dz() * grid_.dz());
  const double* inv = &inv_denom_[m * n_];
  const double* up = &upper_[m * n_];
  d[0] *= inv[0];
  for (int row = 1; row < n_; ++row) {
    const double sub = row == n_ - 1 ? -2.0 * r : -r;
    d[row] = (d[row] - sub * d[row - 1]) * inv[row];
  }
  for (int row = n_ - 2; row >= 0; --row) d[row] -= up[row] * d[row + 1];
}

SpectralVelocity ImexOperator::advance(const SpectralVelocity& v,
                                       const SpectralVelocity& tend) const {
  const GridSpec& g = grid_;
  const double r = dt_ * nu_ / (2.0 * g.dz() * g.dz());
  const auto w = g.trapezoid_weights();
  const int top = g.nz - 1;
  SpectralVelocity out(g);
  std::array<std::vector<Complex>, 2> x{std::vector<Complex>(n_), std::vector<Complex>(n_)};
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      if (!g.retained(i, j)) continue;
      const std::size_t m = static_cast<std::size_t>(i) * g.ny + j;
      const double beta = 1.0 - 0.5 * dt_ * (nu_ * g.k_squared(i, j) + damping_[m]);
      std::array<Complex, 2> mean{};
      for (int c = 0; c < 2; ++c) {
        const auto& V = v[c];
        const auto& N = tend[c];
        for (int iz = 1; iz <= top; ++iz) {
          Complex e;
          if (iz < top)
            e = (beta - 2.0 * r) * V(i, j, iz) + r * (V(i, j, iz - 1) + V(i, j, iz + 1));
          else
            e = (beta - 2.0 * r) * V(i, j, iz) + 2.0 * r * V(i, j, iz - 1);
          x[c][iz - 1] = e + dt_ * N(i, j, iz);
        }
        solve(m, x[c]);
        for (int row = 0; row < n_; ++row) mean[c] += w[row + 1] * x[c][row];
        mean[c] /= g.l;
      }
      const double kx = g.kx(i), ky = g.ky(j), k2 = kx * kx + ky * ky;
      if (k2 > 0.0) {
        // x <- x - i k pi G with k . mean(x) = 0
        const Complex pi = (kx * mean[0] + ky * mean[1]) / (Complex(0.0, k2) * response_mean_[m]);
        for (int row = 0; row < n_; ++row) {
          const double G = response_[m * n_ + row];
          x[0][row] -= Complex(0.0, kx) * pi * G;
          x[1][row] -= Complex(0.0, ky) * pi * G;
        }
      }
      for (int c = 0; c < 2; ++c) {
        out[c](i, j, 0) = 0.0;
        for (int iz = 1; iz <= top; ++iz) out[c](i, j, iz) = x[c][iz - 1];
      }
    }
  return out;
}

std::shared_ptr<const ImexOperator> imex_operator(const GridSpec& g, double nu, double dt,
                                                  const std::vector<double>& damping) {
  struct Entry {
    GridSpec g;
    double nu, dt;
    std::vector<double> damping;
    std::shared_ptr<const ImexOperator> op;
  };
  thread_local std::deque<Entry> cache;
  for (const auto& e : cache)
    if (e.g == g && e.nu == nu && e.dt == dt && e.damping == damping) return e.op;
  auto op = std::make_shared<const ImexOperator>(g, nu, dt, damping);
  cache.push_back({g, nu, dt, damping, op});
  if (cache.size() > 8) cache.pop_front();
  return op;
}

SpectralVelocity extrapolate(const SpectralVelocity& current, const StateSnapshot& s, double dt) {
  if (!s.history || std::abs(s.history_dt - dt) > 1e-14 * dt) return current;
  SpectralVelocity out = current;
  out *= 1.5;
  SpectralVelocity old = *s.history;
  old *= 0.5;
  out -= old;
  return out;
}

StateSnapshot finish_step(const SpectralVelocity& next, double t, SpectralVelocity tendency,
                          double dt) {
  HVelocity v = to_physical(next);
  if (!v.all_finite()) {
    std::ostringstream os;
    os << "non-finite velocity at t = " << t;
    throw NumericalError(os.str());
  }
  StateSnapshot s;
  s.t = t;
  s.v = ProjectedVelocity::checked(std::move(v));
  s.history = std::move(tendency);
  s.history_dt = dt;
  return s;
}

}  // namespace detail

StateSnapshot step_reference(const StateSnapshot& s, const SimParams& p) {
  const GridSpec& g = p.grid;
  check_cfl(s.v, p);
  const HVelocity& u = s.v.velocity();
  const auto w = compute_w(s.v);
  SpectralVelocity N = forcing_pattern(p.forcing, g);
  N *= p.forcing.time_factor(s.t);
  N -= detail::advect(u, w, u);
  const auto Nstar = detail::extrapolate(N, s, p.dt);
  const auto op = detail::imex_operator(g, p.nu, p.dt, std::vector<double>(g.plane(), 0.0));
  const auto next = op->advance(to_spectral(u), Nstar);
  return detail::finish_step(next, s.t + p.dt, std::move(N), p.dt);
}

SpinUpResult spin_up(const SimParams& p, double t_spin, StateSnapshot start) {
  p.validate();
  if (!(t_spin >= 0.0)) throw ConfigError("spin_up: t_spin must be non-negative");
  const auto steps = static_cast<long>(std::ceil(t_spin / p.dt - 1e-9));
  const long every = std::max(1L, std::lround(p.sample_interval / p.dt));
  SpinUpResult r;
  StateSnapshot s = std::move(start);
  auto record = [&](const StateSnapshot& st) {
    r.times.push_back(st.t);
    r.l2.push_back(norm(st.v.velocity(), NormOrder::L2));
    r.h2.push_back(norm(st.v.velocity(), NormOrder::H2));
  };
  record(s);
  for (long n = 1; n <= steps; ++n) {
    s = step_reference(s, p);
    if (n % every == 0 || n == steps) record(s);
  }
  r.sup_h2 = *std::max_element(r.h2.begin(), r.h2.end());
  const std::size_t tail = r.h2.size() - std::max<std::size_t>(1, r.h2.size() / 5);
  r.tail_sup_h2 = *std::max_element(r.h2.begin() + static_cast<std::ptrdiff_t>(tail), r.h2.end());
  r.state = std::move(s);
  return r;
}

SpinUpResult spin_up(const SimParams& p, double t_spin) {
  StateSnapshot s;
  s.t = 0.0;
  s.v = seed_state(p.grid, p.seed_amplitude);
  return spin_up(p, t_spin, std::move(s));
}

}  // namespace penudge
