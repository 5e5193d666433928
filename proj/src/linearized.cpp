#include "penudge/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "penudge/detail/fft.hpp"
#include "penudge/detail/random.hpp"
#include "penudge/diagnostics.hpp"
#include "penudge/dynamics.hpp"

namespace penudge {
namespace {

// A(v; phi) + A(phi; v)
HVelocity coupling(const ProjectedVelocity& v, const ProjectedVelocity& phi) {
  auto S = detail::advect(v.velocity(), compute_w(v), phi.velocity());
  S += detail::advect(phi.velocity(), compute_w(phi), v.velocity());
  return to_physical(S);
}

// <phi^ . grad v, phi>; the other advection term vanishes by skew symmetry.
double cross_term(const ProjectedVelocity& v, const ProjectedVelocity& phi) {
  const auto S = detail::advect(phi.velocity(), compute_w(phi), v.velocity());
  return inner(S, to_spectral(phi.velocity()));
}

double poly(double s) { return s + s * s + s * s * s * s; }

}  // namespace

HVelocity apply_A(const ProjectedVelocity& v, const ProjectedVelocity& phi, double mu,
                  const ObservationOp& J) {
  HVelocity out = coupling(v, phi);
  out -= diffusion(phi.velocity());
  if (mu != 0.0) out += mu * observe(J, phi.velocity());
  return project(out).velocity();
}

double bilinear_B(const ProjectedVelocity& v, const ProjectedVelocity& phi,
                  const ProjectedVelocity& psi, double mu, const ObservationOp& J) {
  double b = grad_inner(phi.velocity(), psi.velocity());
  if (mu != 0.0) b += mu * inner(observe(J, phi.velocity()), psi.velocity());
  b += inner(coupling(v, phi), psi.velocity());
  return b;
}

std::vector<ProjectedVelocity> compatible_probes(const GridSpec& g, int n_samples,
                                                 std::uint64_t seed, int band) {
  if (n_samples < 1) throw ConfigError("compatible_probes: n_samples must be >= 1");
  constexpr int kProfiles = 3;
  std::vector<std::vector<double>> prof(kProfiles, std::vector<double>(g.nz));
  for (int j = 0; j < kProfiles; ++j)
    for (int iz = 0; iz < g.nz; ++iz)
      prof[j][iz] = std::sin((2 * j + 1) * std::numbers::pi * (g.z(iz) + g.l) / (2.0 * g.l));

  std::vector<ProjectedVelocity> out;
  out.reserve(n_samples);
  for (int n = 0; n < n_samples; ++n) {
    detail::Rng rng(detail::split_seed(seed, static_cast<std::uint64_t>(n)));
    HVelocity phi(g);
    for (int c = 0; c < 2; ++c) {
      SpectralScalar F(g);
      for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
          const int m1 = GridSpec::mode_index(i, g.nx), m2 = GridSpec::mode_index(j, g.ny);
          if (std::abs(m1) > band || std::abs(m2) > band || !g.retained(i, j)) continue;
          const double decay = 1.0 / (1.0 + m1 * m1 + m2 * m2);
          Complex a[kProfiles];
          for (auto& x : a) x = Complex(detail::normal(rng), detail::normal(rng)) * decay;
          for (int iz = 0; iz < g.nz; ++iz)
            F(i, j, iz) = a[0] * prof[0][iz] + 0.5 * a[1] * prof[1][iz] + 0.25 * a[2] * prof[2][iz];
        }
      detail::fft_inverse_real(g, F.coeffs(), phi[c].values());
    }
    HVelocity p = project_bc_compatible(phi).velocity();
    const double nrm = std::sqrt(inner(p, p));
    if (nrm == 0.0) throw NumericalError("compatible_probes: degenerate probe");
    p *= 1.0 / nrm;
    out.push_back(ProjectedVelocity::checked(std::move(p)));
  }
  return out;
}

double coercivity_probe(const ProjectedVelocity& v, double mu, const ObservationOp& J,
                        int n_samples, std::uint64_t seed) {
  const auto probes = compatible_probes(v.grid(), n_samples, seed);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& phi : probes) {
    const HVelocity& f = phi.velocity();
    const double m = bilinear_B(v, phi, phi, mu, J) - 0.5 * mu * inner(f, f) - 0.5 * grad_sq(f);
    margin = std::min(margin, m);
  }
  return margin;
}

const char* to_string(GateSource s) {
  return s == GateSource::Configured ? "configured" : "calibrated";
}

void GateConstants::validate() const {
  for (double c : {c0, c1, c_gate1, c_gate1_delta, c_gate2})
    if (!(c > 0.0) || !std::isfinite(c))
      throw ConfigError("gates: every constant must be positive and finite");
}

GateReport check_gates(double sup_H2, double mu, double delta, const GateConstants& gc) {
  GateReport r;
  r.sup_H2 = sup_H2;
  r.mu = mu;
  r.delta = delta;
  const double s = sup_H2;
  r.margin_A = std::min({mu - gc.c0 * poly(s), 1.0 - gc.c1 * mu * delta, mu - 1.0, 1.0 - delta});
  r.margin_gate1 = std::min(0.25 * mu - gc.c_gate1 * std::pow(s, 4),
                            0.25 * mu - gc.c_gate1_delta * mu * mu * delta * delta);
  r.margin_gate2 = 0.5 * std::pow(mu, 0.75) - gc.c_gate2 * (s + delta * mu);
  r.pass_A = r.margin_A >= 0.0;
  r.pass_gate1 = r.margin_gate1 >= 0.0;
  r.pass_gate2 = r.margin_gate2 >= 0.0;
  return r;
}

GateConstants calibrate_gate_constants(const ProjectedVelocity& v, const ObservationOp& J,
                                       int n_samples, std::uint64_t seed,
                                       const ProbeSuite& axiom_probes) {
  constexpr double kFloor = 1e-12;
  const GridSpec& g = v.grid();
  const double s = norm(v.velocity(), NormOrder::H2);
  const auto probes = compatible_probes(g, n_samples, seed);

  const double delta = J.delta();
  double sup_cross = 0.0, sup_young = 0.0, sup_b = 0.0, sup_k = 0.0;
  for (const auto& phi : probes) {
    const HVelocity& f = phi.velocity();
    const double c = std::abs(cross_term(v, phi));
    const double y = std::sqrt(inner(f, f));
    const double x = std::sqrt(grad_sq(f));
    sup_cross = std::max(sup_cross, c / (y * y));
    sup_young = std::max(sup_young, c / (std::pow(x, 1.5) * std::sqrt(y)));
    const HVelocity b = coupling(v, phi);
    const double h32 = std::sqrt(norm(f, NormOrder::H1) * norm(f, NormOrder::H2));
    sup_b = std::max(sup_b, std::sqrt(inner(b, b)) / h32);
    if (delta > 0.0) {
      const HVelocity k = remainder(J, f);
      sup_k = std::max(sup_k, std::sqrt(inner(k, k)) / (delta * h32));
    }
  }

  GateConstants gc;
  gc.source = GateSource::Calibrated;
  const double c_approx = J.kind == ObservationKind::Identity
                              ? 0.0
                              : estimate_constants(J, g, axiom_probes).c_approx;
  if (s > 0.0) {
    gc.c0 = std::max(kFloor, 2.0 * sup_cross / poly(s));
    const double C = sup_young / s;
    gc.c_gate1 = std::max(kFloor, 6.75 * C * C * C * C);
    gc.c_gate2 = std::max({kFloor, sup_b / s, sup_k});
  } else {
    gc.c0 = gc.c_gate1 = kFloor;
    gc.c_gate2 = std::max(kFloor, sup_k);
  }
  gc.c1 = std::max(kFloor, c_approx);
  gc.c_gate1_delta = std::max(kFloor, c_approx * c_approx);
  return gc;
}

std::optional<double> smallest_passing_mu(double sup_H2, double delta, const GateConstants& gc) {
  auto ok = [&](double mu) { return check_gates(sup_H2, mu, delta, gc).pass(); };
  if (ok(1.0)) return 1.0;
  double lo = 1.0;
  for (double mu = 1.25; mu < 1e8; mu *= 1.25) {
    if (ok(mu)) {
      double hi = mu;
      for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
      }
      return hi;
    }
    lo = mu;
  }
  return std::nullopt;
}

}  // namespace penudge
