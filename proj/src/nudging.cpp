#include "penudge/nudging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "penudge/diagnostics.hpp"

namespace penudge {
namespace {

SpectralVelocity observed(const ObservationOp& J, const SpectralVelocity& v) {
  const GridSpec& g = v.grid();
  if (J.spectral_diagonal()) {
    SpectralVelocity out = v;
    if (J.kind == ObservationKind::Identity) return out;
    for (int c = 0; c < 2; ++c)
      for (int iz = 0; iz < g.nz; ++iz)
        for (int i = 0; i < g.nx; ++i)
          for (int j = 0; j < g.ny; ++j)
            if (!J.observes(g, i, j)) out[c](i, j, iz) = 0.0;
    return out;
  }
  auto out = to_spectral(observe(J, to_physical(v)));
  dealias(out);
  return out;
}

std::vector<double> implicit_damping(const GridSpec& g, const NudgeParams& n) {
  std::vector<double> d(g.plane(), 0.0);
  if (!n.J.spectral_diagonal() || n.mu == 0.0) return d;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      if (n.J.observes(g, i, j)) d[static_cast<std::size_t>(i) * g.ny + j] = n.mu;
  return d;
}

SpectralVelocity forcing_at(const SimParams& p, double t) {
  auto F = forcing_pattern(p.forcing, p.grid);
  F *= p.forcing.time_factor(t);
  return F;
}

// g = f or J f
SpectralVelocity assimilated_forcing(const SimParams& p, const NudgeParams& n, double t) {
  auto F = forcing_at(p, t);
  if (n.forcing_mode == ForcingMode::Observed) return observed(n.J, F);
  return F;
}

// F_delta = f - g
SpectralVelocity forcing_defect(const SimParams& p, const NudgeParams& n, double t) {
  if (n.forcing_mode == ForcingMode::Exact) return SpectralVelocity(p.grid);
  auto F = forcing_at(p, t);
  F -= observed(n.J, F);
  return F;
}

void require_aligned(double a, double b, const char* what) {
  if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
    std::ostringstream os;
    os << what << ": time mismatch (" << a << " vs " << b << ")";
    throw Error(os.str());
  }
}

}  // namespace

const char* to_string(ForcingMode m) {
  return m == ForcingMode::Exact ? "exact" : "observed";
}

const char* to_string(T0Policy p) {
  return p == T0Policy::Immediate ? "immediate" : "small_gradient_window";
}

void NudgeParams::validate(const SimParams& p) const {
  if (!(mu >= 0.0)) throw ConfigError("nudge: mu must be non-negative");
  J.validate(p.grid);
  if (!J.spectral_diagonal() && mu > 0.0 && p.dt > 0.5 / mu) {
    std::ostringstream os;
    os << "nudge: explicit local-average feedback needs dt <= 0.5 / mu = " << 0.5 / mu
       << " (dt = " << p.dt << ")";
    throw ConfigError(os.str());
  }
  if (initial_guess && !(initial_guess->grid() == p.grid))
    throw ConfigError("nudge: initial guess lives on a different grid");
}

StateSnapshot step_assimilated(const StateSnapshot& ref, const StateSnapshot& ref_next,
                               const StateSnapshot& da, const SimParams& p,
                               const NudgeParams& n) {
  require_aligned(ref.t, da.t, "step_assimilated");
  require_aligned(ref_next.t, ref.t + p.dt, "step_assimilated");
  const GridSpec& g = p.grid;
  check_cfl(da.v, p);
  const HVelocity& u = da.v.velocity();

  SpectralVelocity N = assimilated_forcing(p, n, da.t);
  N -= detail::advect(u, compute_w(da.v), u);
  const bool implicit = n.J.spectral_diagonal();
  if (!implicit && n.mu > 0.0) {
    auto fb = observed(n.J, to_spectral(ref.v.velocity() - u));
    fb *= n.mu;
    N += fb;
  }
  auto Nstar = detail::extrapolate(N, da, p.dt);
  if (implicit && n.mu > 0.0) {
    auto fb = observed(n.J, to_spectral(ref.v.velocity() + ref_next.v.velocity()));
    fb *= 0.5 * n.mu;
    Nstar += fb;
  }
  const auto op = detail::imex_operator(g, p.nu, p.dt, implicit_damping(g, n));
  return detail::finish_step(op->advance(to_spectral(u), Nstar), da.t + p.dt, std::move(N),
                             p.dt);
}

StateSnapshot step_difference(const StateSnapshot& V, const StateSnapshot& ref,
                              const SimParams& p, const NudgeParams& n) {
  require_aligned(ref.t, V.t, "step_difference");
  const GridSpec& g = p.grid;
  const HVelocity& u = ref.v.velocity();
  const HVelocity& U = V.v.velocity();
  const auto w = compute_w(ref.v);
  const auto W = compute_w(V.v);

  SpectralVelocity N = forcing_defect(p, n, V.t);
  N -= detail::advect(u, w, U);
  N -= detail::advect(U, W, u);
  N += detail::advect(U, W, U);
  if (!n.J.spectral_diagonal() && n.mu > 0.0) {
    auto fb = observed(n.J, to_spectral(U));
    fb *= n.mu;
    N -= fb;
  }
  const auto Nstar = detail::extrapolate(N, V, p.dt);
  const auto op = detail::imex_operator(g, p.nu, p.dt, implicit_damping(g, n));
  return detail::finish_step(op->advance(to_spectral(U), Nstar), V.t + p.dt, std::move(N),
                             p.dt);
}

EnergyTerms difference_energy(const ProjectedVelocity& V, const ProjectedVelocity& v, double t,
                              const SimParams& p, const NudgeParams& n) {
  const HVelocity& U = V.velocity();
  const auto Uhat = to_spectral(U);
  EnergyTerms e;
  e.t = t;
  e.half_norm_sq = 0.5 * inner(U, U);
  e.dissipation = p.nu * grad_sq(U);
  e.nudging = n.mu > 0.0 ? n.mu * inner(observed(n.J, Uhat), Uhat) : 0.0;
  // The other two advection terms vanish by skew symmetry.
  e.forcing = -inner(detail::advect(U, compute_w(V), v.velocity()), Uhat) +
              inner(forcing_defect(p, n, t), Uhat);
  return e;
}

TwinRecord run_twin(const StateSnapshot& ref_start, const SimParams& p, const NudgeParams& n,
                    const TwinOptions& opt) {
  p.validate();
  n.validate(p);
  const GridSpec& g = p.grid;
  const double duration = opt.duration < 0.0 ? p.t_end : opt.duration;
  const auto steps = static_cast<long>(std::ceil(duration / p.dt - 1e-9));
  const long every = std::max(1L, std::lround(p.sample_interval / p.dt));

  StateSnapshot ref = ref_start.restarted();
  StateSnapshot da;
  da.t = ref.t;
  da.v = ProjectedVelocity::checked(n.initial_guess ? *n.initial_guess : HVelocity(g));

  TwinRecord rec;
  EnergyTerms before;
  auto is_sample = [&](long k) { return k % every == 0 || k == steps; };

  for (long k = 0;; ++k) {
    if (is_sample(k)) {
      const auto V = ProjectedVelocity::difference(ref.v, da.v);
      const HVelocity& U = V.velocity();
      rec.times.push_back(ref.t);
      rec.err_L2.push_back(norm(U, NormOrder::L2));
      rec.err_H1.push_back(norm(U, NormOrder::H1));
      rec.err_H2.push_back(norm(U, NormOrder::H2));
      rec.grad.push_back(std::sqrt(grad_sq(U)));
      rec.nudge_mag.push_back(n.mu > 0.0 ? n.mu * norm(observe(n.J, U), NormOrder::L2) : 0.0);
      rec.ref_H2.push_back(norm(ref.v.velocity(), NormOrder::H2));
      rec.forcing_grad_sup = std::max(
          rec.forcing_grad_sup, std::sqrt(grad_sq(evaluate_forcing(p.forcing, g, ref.t))));
      if (k > 0 && opt.energy_budget) {
        const auto after = difference_energy(V, ref.v, ref.t, p, n);
        const EnergyTerms pair[2] = {before, after};
        rec.budget_residual.push_back(energy_budget(pair).front());
      } else {
        rec.budget_residual.push_back(0.0);
      }
    }
    if (k == steps) break;
    if (opt.energy_budget && is_sample(k + 1))
      before = difference_energy(ProjectedVelocity::difference(ref.v, da.v), ref.v, ref.t, p, n);
    auto ref_next = step_reference(ref, p);
    da = step_assimilated(ref, ref_next, da, p, n);
    ref = std::move(ref_next);
  }

  rec.t0 = rec.times.front();
  if (opt.t0_policy == T0Policy::SmallGradientWindow) {
    double best = rec.grad.front();
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      if (rec.times[i] > rec.times.front() + opt.t0_window + 1e-12) break;
      if (rec.grad[i] < best) {
        best = rec.grad[i];
        rec.t0 = rec.times[i];
      }
    }
  }
  rec.final_reference = std::move(ref);
  rec.final_assimilated = std::move(da);
  return rec;
}

}  // namespace penudge
