#pragma once

// Nudged primitive equations
//   dv~/dt - P Lap v~ + P(u~ . grad v~) = P g + mu P (J v - J v~),
// with g = f (exact forcing) or g = J f (observed forcing), the twin
// experiment that runs truth and assimilation side by side, and a direct
// integrator of the difference equation for V = v - v~.
//
// For spectrally diagonal J the feedback is split Crank-Nicolson style:
// -mu J v~ sits in the implicit diagonal and mu J v enters as the average of
// the two reference levels. V = 0 is then an exact fixed point of the
// discrete scheme. Local averaging is explicit (AB2) with dt <= 0.5 / mu.

#include <optional>
#include <vector>

#include "penudge/diagnostics.hpp"
#include "penudge/dynamics.hpp"
#include "penudge/observation.hpp"

namespace penudge {

enum class ForcingMode { Exact, Observed };
enum class T0Policy { Immediate, SmallGradientWindow };

const char* to_string(ForcingMode m);
const char* to_string(T0Policy p);

struct NudgeParams {
  double mu = 0.0;
  ObservationOp J;
  ForcingMode forcing_mode = ForcingMode::Exact;
  /// Initial assimilated state; zero when absent.
  std::optional<HVelocity> initial_guess;

  /// Throws ConfigError for mu < 0, an operator that does not fit the grid,
  /// or an explicit feedback with dt > 0.5 / mu.
  void validate(const SimParams& p) const;
};

/// Advances v~ by one step. ref and ref_next are the reference at t and
/// t + dt (the implicit feedback needs both).
StateSnapshot step_assimilated(const StateSnapshot& ref, const StateSnapshot& ref_next,
                               const StateSnapshot& da, const SimParams& p,
                               const NudgeParams& n);

/// Advances V = v - v~ by one step of the difference equation
///   dV/dt - P Lap V + P(u . grad V) + P(U . grad v) - P(U . grad V)
///     = P F_delta - mu P J V,   F_delta = f - g.
StateSnapshot step_difference(const StateSnapshot& V, const StateSnapshot& ref,
                              const SimParams& p, const NudgeParams& n);

/// Energy quantities of V at one time level (see energy_budget).
EnergyTerms difference_energy(const ProjectedVelocity& V, const ProjectedVelocity& v, double t,
                              const SimParams& p, const NudgeParams& n);

struct TwinOptions {
  /// Horizon measured from the start state; negative means p.t_end.
  double duration = -1.0;
  T0Policy t0_policy = T0Policy::Immediate;
  /// Length of the window scanned for the small-gradient start time.
  double t0_window = 1.0;
  bool energy_budget = true;
};

struct TwinRecord {
  std::vector<double> times;
  std::vector<double> err_L2;
  std::vector<double> err_H1;
  std::vector<double> err_H2;
  std::vector<double> grad;       // ||grad V||
  std::vector<double> nudge_mag;  // ||mu J V||
  /// Residual of the energy balance over [t_i, t_i + dt], per sample.
  std::vector<double> budget_residual;
  std::vector<double> ref_H2;     // ||v||_H2 per sample
  double t0 = 0.0;
  double forcing_grad_sup = 0.0;  // sup over samples of ||grad f||
  StateSnapshot final_reference;
  StateSnapshot final_assimilated;
};

/// Co-advances the reference (from ref_start, multistep memory dropped) and
/// the assimilated run. Samples every p.sample_interval.
TwinRecord run_twin(const StateSnapshot& ref_start, const SimParams& p, const NudgeParams& n,
                    const TwinOptions& opt = {});

}  // namespace penudge
