// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Every tolerance is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "penudge/detail/random.hpp"
#include "penudge/diagnostics.hpp"
#include "penudge/dynamics.hpp"
#include "penudge/linearized.hpp"
#include "penudge/nudging.hpp"
#include "penudge/observation.hpp"

using namespace penudge;

namespace tol {
constexpr double kDecayOrders = 1e-6;        // final / initial err_H2
constexpr double kFloor = 1e-13;             // floating-point floor, relative
constexpr double kMinR2 = 0.98;
constexpr double kRateSaturation = 0.02;     // relative dip allowed when mu doubles
constexpr double kSlopeLo = 0.7, kSlopeHi = 1.3;
constexpr double kControlFraction = 0.5;
constexpr double kBound = 1e-12;             // c_bound - 1
constexpr double kApprox = 1e-6;             // c_approx - 1 (cutoff)
constexpr int kProbes = 200;
constexpr double kOracle = 1e-6;
constexpr double kIdempotence = 1e-12;
constexpr double kDivergence = 1e-10;
constexpr double kNeutrality = 1e-11;
constexpr double kOrderLo = 3.0, kOrderHi = 5.0;
constexpr double kSynchrony = 1e-12;
}  // namespace tol

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

// Synchronisation regime: slow shear-driven flow in a deep layer.
SimParams sync_params() {
  SimParams p;
  p.grid.nx = p.grid.ny = 32;
  p.grid.nz = 17;
  p.grid.l = 2.0;
  p.nu = 0.03;
  p.dt = 0.02;
  p.t_end = 12.0;
  p.sample_interval = 0.5;
  p.seed_amplitude = 0.5;
  p.forcing.pattern = ForcingPattern::Shear;
  p.forcing.amplitude = 0.05;
  p.forcing.wavenumber = 1;
  p.forcing.modulation = 0.3;
  p.forcing.omega = 1.0;
  return p;
}
constexpr double kSyncSpin = 30.0;
constexpr double kSyncK = 8.0;
constexpr double kSyncMu = 1.5;

// Plateau regime: broadband time-periodic forcing on a small box so that
// delta in {0.2, 0.1, 0.05} spans resolved scales.
SimParams plateau_params() {
  SimParams p;
  p.grid.nx = p.grid.ny = 32;
  p.grid.nz = 17;
  p.grid.l = 1.0;
  p.grid.lx = p.grid.ly = kPi / 2;
  p.nu = 0.03;
  p.dt = 0.01;
  p.t_end = 8.0;
  p.sample_interval = 0.1;
  p.seed_amplitude = 0.0;
  p.forcing.pattern = ForcingPattern::Broadband;
  p.forcing.amplitude = 1.0;
  p.forcing.wavenumber = 10;
  p.forcing.modulation = 0.5;
  p.forcing.omega = 2 * kPi;
  return p;
}
constexpr double kPlateauSpin = 10.0;
constexpr double kPlateauMu = 5.0;

NudgeParams nudge(double mu, ObservationOp J, ForcingMode mode = ForcingMode::Exact) {
  NudgeParams n;
  n.mu = mu;
  n.J = J;
  n.forcing_mode = mode;
  return n;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

ProbeSuite probe_suite() {
  ProbeSuite s;
  s.random_fields = 120;
  s.bumps = 40;
  s.single_modes = 40;
  s.seed = detail::split_seed(kSeed, 1);
  return s;
}

struct SyncContext {
  SimParams p = sync_params();
  SpinUpResult spin;
  ObservationOp J = ObservationOp::spectral_cutoff(kSyncK);
  GateConstants gc;
  GateReport gates;
  std::optional<double> mu_min;
};

SyncContext& sync_context() {
  static SyncContext c = [] {
    SyncContext s;
    s.spin = spin_up(s.p, kSyncSpin);
    s.gc = calibrate_gate_constants(s.spin.state.v, s.J, tol::kProbes, detail::split_seed(kSeed, 2),
                                    probe_suite());
    return s;
  }();
  return c;
}

double fitted_rate(const TwinRecord& r, DecayFit* out = nullptr) {
  auto [a, b] = default_decay_window(r.times, r.err_H1);
  const DecayFit f = fit_decay(r.times, r.err_H1, std::max(a, r.t0), b);
  if (out) *out = f;
  return f.rate;
}

Outcome criterion_synchronization() {
  SyncContext& c = sync_context();
  const TwinRecord r = run_twin(c.spin.state, c.p, nudge(kSyncMu, c.J));
  const TwinRecord r2 = run_twin(c.spin.state, c.p, nudge(2 * kSyncMu, c.J));

  const double s = std::max(c.spin.tail_sup_h2, max_of(r.ref_H2));
  c.gates = check_gates(s, kSyncMu, c.J.delta(), c.gc);
  c.mu_min = smallest_passing_mu(s, c.J.delta(), c.gc);

  const double e0 = r.err_H2.front();
  double reached = r.err_H2.back() / e0;
  for (double e : r.err_H2) {
    // Stop at the floating-point floor.
    if (e <= tol::kFloor * e0) break;
    reached = std::min(reached, e / e0);
  }
  DecayFit f1, f2;
  const double rate1 = fitted_rate(r, &f1);
  const double rate2 = fitted_rate(r2, &f2);
  const bool monotone = rate2 >= rate1 * (1.0 - tol::kRateSaturation);
  const bool saturated = rate2 < rate1 * 1.05;

  Outcome o;
  o.pass = c.gates.pass() && reached <= tol::kDecayOrders && f1.r_squared >= tol::kMinR2 &&
           rate1 > 0.0 && monotone;
  o.detail = fmt(
      "mu=%g delta=%g s=%.4g gates %s (margins %.3g %.3g %.3g, smallest mu %.3g); "
      "err_H2 ratio %.3g; H1 rate %.4g r2 %.5f; rate at 2mu %.4g%s",
      kSyncMu, c.J.delta(), s, c.gates.pass() ? "pass" : "fail", c.gates.margin_A,
      c.gates.margin_gate1, c.gates.margin_gate2, c.mu_min ? *c.mu_min : -1.0, reached, rate1,
      f1.r_squared, rate2, saturated ? " (saturated)" : "");
  return o;
}

Outcome criterion_plateau() {
  const SimParams p = plateau_params();
  const SpinUpResult spin = spin_up(p, kPlateauSpin);
  std::vector<std::pair<double, double>> pairs;
  std::string levels;
  bool positive = true;
  for (double delta : {0.2, 0.1, 0.05}) {
    TwinOptions opt;
    opt.energy_budget = false;
    const TwinRecord r = run_twin(
        spin.state, p, nudge(kPlateauMu, ObservationOp::spectral_cutoff(1.0 / delta), ForcingMode::Observed),
        opt);
    const PlateauEstimate pl = plateau(r.times, r.err_H1);
    positive = positive && pl.level > 0.0;
    pairs.emplace_back(delta, pl.level);
    levels += fmt(" %.4g (C %.3g)", pl.level, pl.level / (delta * r.forcing_grad_sup));
  }
  const double slope = scaling_fit(pairs);
  Outcome o;
  o.pass = positive && slope >= tol::kSlopeLo && slope <= tol::kSlopeHi;
  o.detail = fmt("plateaus(err_H1) at delta 0.2/0.1/0.05:%s; slope %.4f in [%.1f, %.1f]",
                 levels.c_str(), slope, tol::kSlopeLo, tol::kSlopeHi);
  return o;
}

Outcome criterion_control() {
  SyncContext& c = sync_context();
  const TwinRecord r = run_twin(c.spin.state, c.p, nudge(0.0, c.J));
  double lowest = INFINITY;
  for (double e : r.err_L2) lowest = std::min(lowest, e / r.err_L2.front());
  Outcome o;
  o.pass = lowest >= tol::kControlFraction;
  o.detail = fmt("mu=0: min err_L2 / initial = %.4f over t in [%g, %g]", lowest, r.times.front(),
                 r.times.back());
  return o;
}

Outcome criterion_axioms() {
  GridSpec g = sync_params().grid;
  const ProbeSuite s = probe_suite();
  const AxiomConstants cut = estimate_constants(ObservationOp::spectral_cutoff(kSyncK), g, s);
  const AxiomConstants avg = estimate_constants(ObservationOp::local_average(g.lx / 8), g, s);
  Outcome o;
  o.pass = cut.n_probes >= tol::kProbes && avg.n_probes >= tol::kProbes &&
           cut.c_bound <= 1.0 + tol::kBound && cut.c_approx <= 1.0 + tol::kApprox &&
           avg.c_bound <= 1.0 + tol::kBound && std::isfinite(avg.c_approx);
  o.detail = fmt(
      "%d probes; cutoff K=8: c_bound %.15g c_approx %.6g; local average h=pi/4: c_bound %.15g "
      "c_approx %.6g",
      cut.n_probes, cut.c_bound, cut.c_approx, avg.c_bound, avg.c_approx);
  return o;
}

Outcome criterion_coercivity() {
  SyncContext& c = sync_context();
  const std::uint64_t seed = detail::split_seed(kSeed, 3);
  const double margin = coercivity_probe(c.spin.state.v, kSyncMu, c.J, tol::kProbes, seed);

  // Strong shear, no nudging: reported only.
  HVelocity shear(c.p.grid);
  shear.c1 = sample(c.p.grid, [&](double, double y, double z) {
    return 40.0 * std::sin(y) * std::sin(kPi * (z + c.p.grid.l) / (2 * c.p.grid.l));
  });
  const double strong = coercivity_probe(project(shear), 0.0, c.J, tol::kProbes, seed);

  Outcome o;
  o.pass = margin >= 0.0;
  o.detail = fmt("gate-passing run (mu=%g, K=8): min margin %.4g over %d probes; "
                 "mu=0 with shear amplitude 40: min margin %.4g (reported)",
                 kSyncMu, margin, tol::kProbes, strong);
  return o;
}

double oracle_gap(const SimParams& p, const StateSnapshot& start, const NudgeParams& n) {
  StateSnapshot ref = start.restarted();
  StateSnapshot da{ref.t, project(HVelocity(p.grid)), std::nullopt, 0.0};
  StateSnapshot V{ref.t, ref.v, std::nullopt, 0.0};
  for (int i = 0; i < 100; ++i) {
    V = step_difference(V, ref, p, n);
    const StateSnapshot next = step_reference(ref, p);
    da = step_assimilated(ref, next, da, p, n);
    ref = next;
  }
  const HVelocity twin = ref.v.velocity() - da.v.velocity();
  const HVelocity gap = V.v.velocity() - twin;
  return std::sqrt(inner(gap, gap) / inner(twin, twin));
}

Outcome criterion_oracle() {
  SyncContext& c = sync_context();
  const double exact = oracle_gap(c.p, c.spin.state, nudge(kSyncMu, c.J));
  const SimParams p = plateau_params();
  const SpinUpResult spin = spin_up(p, 1.0);
  const double observed =
      oracle_gap(p, spin.state, nudge(kPlateauMu, ObservationOp::spectral_cutoff(10.0), ForcingMode::Observed));
  const double averaged = oracle_gap(p, spin.state, nudge(kPlateauMu, ObservationOp::local_average(p.grid.lx / 8)));
  Outcome o;
  o.pass = exact <= tol::kOracle && observed <= tol::kOracle && averaged <= tol::kOracle;
  o.detail = fmt("relative L2 gap after 100 steps: exact %.3g, observed %.3g, local average %.3g",
                 exact, observed, averaged);
  return o;
}

double budget_residual(const SimParams& base, const StateSnapshot& start, double dt,
                       const NudgeParams& n) {
  SimParams p = base;
  p.dt = dt;
  p.sample_interval = 0.2;
  TwinOptions opt;
  opt.duration = 1.0;
  const TwinRecord r = run_twin(start, p, n, opt);
  double worst = 0.0;
  for (std::size_t i = 1; i < r.budget_residual.size(); ++i)
    worst = std::max(worst, std::abs(r.budget_residual[i]));
  return worst;
}

Outcome criterion_invariants() {
  SyncContext& c = sync_context();
  const GridSpec& g = c.p.grid;

  double idem = 0.0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    detail::Rng rng(detail::split_seed(kSeed, 10 + k));
    HVelocity phi(g);
    for (int comp = 0; comp < 2; ++comp)
      for (double& x : phi[comp].values()) x = detail::normal(rng);
    const ProjectedVelocity once = project(phi);
    const HVelocity twice = project(once.velocity()).velocity() - once.velocity();
    idem = std::max(idem, std::sqrt(inner(twice, twice) / inner(phi, phi)));
  }

  double div = 0.0;
  StateSnapshot ref = c.spin.state.restarted();
  StateSnapshot da{ref.t, project(HVelocity(g)), std::nullopt, 0.0};
  const NudgeParams n = nudge(kSyncMu, c.J);
  for (int i = 0; i < 200; ++i) {
    const StateSnapshot next = step_reference(ref, c.p);
    da = step_assimilated(ref, next, da, c.p, n);
    ref = next;
    div = std::max(div, check_div_constraint(ref.v) / std::sqrt(inner(ref.v, ref.v)));
    div = std::max(div, check_div_constraint(da.v) / std::sqrt(inner(da.v, da.v)));
  }

  double neutral = 0.0;
  const ProjectedVelocity& v = c.spin.state.v;
  for (const auto& V : compatible_probes(g, 10, detail::split_seed(kSeed, 4))) {
    const double tri = inner(advection(v, V), V);
    neutral = std::max(neutral, std::abs(tri) / (std::sqrt(inner(v, v)) * inner(V, V)));
  }

  const double r1 = budget_residual(c.p, c.spin.state, 0.02, n);
  const double r2 = budget_residual(c.p, c.spin.state, 0.01, n);
  const double ratio = r1 / r2;

  Outcome o;
  o.pass = idem <= tol::kIdempotence && div <= tol::kDivergence && neutral <= tol::kNeutrality &&
           ratio >= tol::kOrderLo && ratio <= tol::kOrderHi;
  o.detail = fmt(
      "idempotence %.2g; div residual %.2g over 200 steps; advection neutrality %.2g; "
      "budget residual %.3g -> %.3g under dt halving (ratio %.3f)",
      idem, div, neutral, r1, r2, ratio);
  return o;
}

Outcome criterion_fixed_point() {
  SyncContext& c = sync_context();
  NudgeParams n = nudge(kSyncMu, c.J);
  n.initial_guess = c.spin.state.v.velocity();
  const TwinRecord r = run_twin(c.spin.state, c.p, n);
  const double worst = std::max({max_of(r.err_L2), max_of(r.err_H1), max_of(r.err_H2)});
  Outcome o;
  o.pass = worst <= tol::kSynchrony;
  o.detail = fmt("v~0 = v0, g = f: max error norm %.3g over t in [%g, %g]", worst, r.times.front(),
                 r.times.back());
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 exponential synchronization", criterion_synchronization},
      {"2 stability plateau scaling", criterion_plateau},
      {"3 control experiment (mu = 0)", criterion_control},
      {"4 observation axioms", criterion_axioms},
      {"5 coercivity", criterion_coercivity},
      {"6 difference-equation oracle", criterion_oracle},
      {"7 structural invariants", criterion_invariants},
      {"8 exact-synchrony fixed point", criterion_fixed_point},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
