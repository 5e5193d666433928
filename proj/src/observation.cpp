#include "penudge/observation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "penudge/detail/fft.hpp"
#include "penudge/detail/random.hpp"
#include "penudge/diagnostics.hpp"

namespace penudge {
namespace {

int cells_along(double period, double h, int n, const char* axis) {
  const int m = static_cast<int>(std::lround(period / h));
  if (m < 1 || std::abs(period / m - h) > 0.01 * h)
    throw ConfigError(std::string("local_average: cell side ") + std::to_string(h) +
                      " does not divide the " + axis + " period " + std::to_string(period) +
                      " within 1%");
  if (n % m != 0)
    throw ConfigError(std::string("local_average: ") + std::to_string(m) +
                      " cells do not tile the " + std::to_string(n) + " grid points along " +
                      axis);
  return m;
}

ScalarField local_average(const ObservationOp& J, const ScalarField& f) {
  const GridSpec& g = f.grid();
  const int mx = cells_along(g.lx, J.cell, g.nx, "x1");
  const int my = cells_along(g.ly, J.cell, g.ny, "x2");
  const int bx = g.nx / mx, by = g.ny / my;
  ScalarField out(g);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int cx = 0; cx < mx; ++cx)
      for (int cy = 0; cy < my; ++cy) {
        double s = 0.0;
        for (int ix = cx * bx; ix < (cx + 1) * bx; ++ix)
          for (int iy = cy * by; iy < (cy + 1) * by; ++iy) s += f(ix, iy, iz);
        s /= bx * by;
        for (int ix = cx * bx; ix < (cx + 1) * bx; ++ix)
          for (int iy = cy * by; iy < (cy + 1) * by; ++iy) out(ix, iy, iz) = s;
      }
  return out;
}

ScalarField cutoff(const ObservationOp& J, const ScalarField& f) {
  const GridSpec& g = f.grid();
  auto F = to_spectral(f);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        if (!J.observes(g, i, j)) F(i, j, iz) = 0.0;
  ScalarField out(g);
  detail::fft_inverse_real(g, F.coeffs(), out.values());
  return out;
}

std::vector<double> random_profile(const GridSpec& g, detail::Rng& rng) {
  std::vector<double> p(g.nz, 0.0);
  const double a0 = detail::normal(rng), a1 = detail::normal(rng), a2 = detail::normal(rng);
  const double a3 = detail::normal(rng);
  for (int iz = 0; iz < g.nz; ++iz) {
    const double s = (g.z(iz) + g.l) / g.l;
    p[iz] = a0 + a1 * std::cos(std::numbers::pi * s) + a2 * std::sin(0.5 * std::numbers::pi * s) +
            a3 * std::cos(2.0 * std::numbers::pi * s);
  }
  return p;
}

}  // namespace

ObservationOp ObservationOp::spectral_cutoff(double K) {
  if (!(K > 0.0)) throw ConfigError("spectral_cutoff: K must be positive");
  ObservationOp J;
  J.kind = ObservationKind::SpectralCutoff;
  J.cutoff = K;
  return J;
}

ObservationOp ObservationOp::local_average(double h) {
  if (!(h > 0.0)) throw ConfigError("local_average: h must be positive");
  ObservationOp J;
  J.kind = ObservationKind::LocalAverage;
  J.cell = h;
  return J;
}

double ObservationOp::delta() const {
  switch (kind) {
    case ObservationKind::Identity: return 0.0;
    case ObservationKind::SpectralCutoff: return 1.0 / cutoff;
    case ObservationKind::LocalAverage: return cell;
  }
  return 0.0;
}

bool ObservationOp::observes(const GridSpec& g, int i, int j) const {
  switch (kind) {
    case ObservationKind::Identity: return true;
    case ObservationKind::SpectralCutoff:
      return g.k_squared(i, j) <= cutoff * cutoff * (1.0 + 1e-12);
    case ObservationKind::LocalAverage: break;
  }
  throw ConfigError("observes: local averaging is not diagonal in Fourier space");
}

void ObservationOp::validate(const GridSpec& g) const {
  if (kind == ObservationKind::LocalAverage) {
    cells_along(g.lx, cell, g.nx, "x1");
    cells_along(g.ly, cell, g.ny, "x2");
  }
}

const char* to_string(ObservationKind k) {
  switch (k) {
    case ObservationKind::Identity: return "identity";
    case ObservationKind::SpectralCutoff: return "cutoff";
    case ObservationKind::LocalAverage: return "local_average";
  }
  return "?";
}

ScalarField observe(const ObservationOp& J, const ScalarField& f) {
  switch (J.kind) {
    case ObservationKind::Identity: return f;
    case ObservationKind::SpectralCutoff: return cutoff(J, f);
    case ObservationKind::LocalAverage: return local_average(J, f);
  }
  return f;
}

HVelocity observe(const ObservationOp& J, const HVelocity& v) {
  return HVelocity(observe(J, v.c1), observe(J, v.c2));
}

ScalarField remainder(const ObservationOp& J, const ScalarField& f) {
  return observe(J, f) - f;
}

HVelocity remainder(const ObservationOp& J, const HVelocity& v) {
  return observe(J, v) - v;
}

std::vector<ScalarField> make_probes(const GridSpec& g, const ProbeSuite& suite) {
  std::vector<ScalarField> probes;
  probes.reserve(suite.total());
  std::uint64_t index = 0;

  for (int n = 0; n < suite.random_fields; ++n, ++index) {
    detail::Rng rng(detail::split_seed(suite.seed, index));
    SpectralScalar F(g);
    const auto prof_a = random_profile(g, rng);
    const auto prof_b = random_profile(g, rng);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const int mi = GridSpec::mode_index(i, g.nx), mj = GridSpec::mode_index(j, g.ny);
        if (std::abs(mi) > suite.band || std::abs(mj) > suite.band || !g.retained(i, j))
          continue;
        const Complex c(detail::normal(rng), detail::normal(rng));
        const double decay = 1.0 / (1.0 + mi * mi + mj * mj);
        for (int iz = 0; iz < g.nz; ++iz)
          F(i, j, iz) = decay * c * ((mi + mj) % 2 == 0 ? prof_a[iz] : prof_b[iz]);
      }
    ScalarField f(g);
    detail::fft_inverse_real(g, F.coeffs(), f.values());  // real part = Hermitian part
    probes.push_back(std::move(f));
  }

  for (int n = 0; n < suite.bumps; ++n, ++index) {
    detail::Rng rng(detail::split_seed(suite.seed, index));
    const double c1 = detail::uniform(rng, 0.0, g.lx), c2 = detail::uniform(rng, 0.0, g.ly);
    const double a = detail::uniform(rng, 0.5, 3.0);
    const auto prof = random_profile(g, rng);
    const double s1 = 2.0 * std::numbers::pi / g.lx, s2 = 2.0 * std::numbers::pi / g.ly;
    auto bump = sample(g, [&](double x, double y, double z) {
      const int iz = static_cast<int>(std::lround((z + g.l) / g.dz()));
      return std::exp(a * (std::cos(s1 * (x - c1)) + std::cos(s2 * (y - c2)))) * prof[iz];
    });
    probes.push_back(d_horizontal(bump, n % 2 == 0 ? 1 : 2));
  }

  for (int n = 0; n < suite.single_modes; ++n, ++index) {
    detail::Rng rng(detail::split_seed(suite.seed, index));
    const int limit = std::max(1, static_cast<int>(std::floor(g.dealias_fraction * g.nx / 2.0)));
    const int limit_y = std::max(1, static_cast<int>(std::floor(g.dealias_fraction * g.ny / 2.0)));
    const int m1 = static_cast<int>(std::lround(detail::uniform(rng, -limit, limit)));
    int m2 = static_cast<int>(std::lround(detail::uniform(rng, -limit_y, limit_y)));
    if (m1 == 0 && m2 == 0) m2 = 1;
    const double phase = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const auto prof = random_profile(g, rng);
    const double s1 = 2.0 * std::numbers::pi / g.lx, s2 = 2.0 * std::numbers::pi / g.ly;
    probes.push_back(sample(g, [&](double x, double y, double z) {
      const int iz = static_cast<int>(std::lround((z + g.l) / g.dz()));
      return std::cos(m1 * s1 * x + m2 * s2 * y + phase) * prof[iz];
    }));
  }
  return probes;
}

AxiomConstants estimate_constants(const ObservationOp& J, const GridSpec& g,
                                  const ProbeSuite& suite) {
  J.validate(g);
  if (suite.total() < 1) throw ConfigError("estimate_constants: empty probe suite");
  const auto probes = make_probes(g, suite);
  AxiomConstants c;
  const double delta = J.delta();
  for (const auto& f : probes) {
    const double nf = std::sqrt(inner(f, f));
    if (nf == 0.0) continue;
    const auto Jf = observe(J, f);
    c.c_bound = std::max(c.c_bound, std::sqrt(inner(Jf, Jf)) / nf);
    if (delta > 0.0) {
      const auto r = Jf - f;
      const double grad = std::sqrt(grad_sq(f));
      if (grad > 0.0) c.c_approx = std::max(c.c_approx, std::sqrt(inner(r, r)) / (delta * grad));
    }
    ++c.n_probes;
  }
  return c;
}

}  // namespace penudge
