#pragma once

// Reference primitive equations  dv/dt - P Lap v + P(u . grad v) = P f.
//
// Time integration is CNAB2: Crank-Nicolson for diffusion (and for any
// linear damping that is diagonal per Fourier mode), second-order
// Adams-Bashforth for advection and forcing, with a forward-Euler first step.
// The hydrostatic pressure is never formed as a field: after the implicit
// solve, each k != 0 mode receives the z-independent gradient that makes the
// depth average divergence free. The velocity response to that gradient is
// computed through the same implicit operator, so the bottom Dirichlet and
// top Neumann conditions hold exactly.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "penudge/grid.hpp"
#include "penudge/hydrostatic.hpp"

namespace penudge {

struct SpectralVelocity {
  SpectralScalar c1;
  SpectralScalar c2;

  SpectralVelocity() = default;
  explicit SpectralVelocity(const GridSpec& g) : c1(g), c2(g) {}
  SpectralVelocity(SpectralScalar a, SpectralScalar b) : c1(std::move(a)), c2(std::move(b)) {}

  [[nodiscard]] const GridSpec& grid() const { return c1.grid(); }
  SpectralScalar& operator[](int i) { return i == 0 ? c1 : c2; }
  const SpectralScalar& operator[](int i) const { return i == 0 ? c1 : c2; }

  SpectralVelocity& operator+=(const SpectralVelocity& o);
  SpectralVelocity& operator-=(const SpectralVelocity& o);
  SpectralVelocity& operator*=(double a);
};

SpectralVelocity to_spectral(const HVelocity& v);
HVelocity to_physical(const SpectralVelocity& v);
void dealias(SpectralVelocity& v);
/// Parseval form of inner(HVelocity, HVelocity).
double inner(const SpectralVelocity& a, const SpectralVelocity& b);

enum class ForcingPattern {
  None,
  /// Kolmogorov shear (sin(k x2) s(x3), 0).
  Shear,
  /// Rotational cells from the stream function sin(k x1) sin(k x2).
  Cellular,
  /// Rotational field with random phases and |amplitude| ~ 1/|m| for
  /// 1 <= |m| <= wavenumber (mode-index units), unit RMS before scaling.
  Broadband,
};

const char* to_string(ForcingPattern p);

/// f(x, t) = amplitude * (mean + modulation * sin(omega t)) * pattern(x),
/// with vertical profile s(x3) = sin(pi (x3 + l) / (2 l)). The time factor is
/// smooth, hence Hoelder-alpha for every alpha <= 1.
struct ForcingSpec {
  ForcingPattern pattern = ForcingPattern::None;
  double amplitude = 0.0;
  int wavenumber = 1;
  double mean = 1.0;
  double modulation = 0.0;
  double omega = 1.0;
  double holder_exponent = 1.0;  // documentation only
  std::uint64_t seed = 7;

  [[nodiscard]] double time_factor(double t) const;
  friend bool operator==(const ForcingSpec&, const ForcingSpec&) = default;
};

/// Dealiased spectral pattern (time factor 1).
SpectralVelocity forcing_pattern(const ForcingSpec& spec, const GridSpec& g);
HVelocity evaluate_forcing(const ForcingSpec& spec, const GridSpec& g, double t);

struct SimParams {
  GridSpec grid;
  double nu = 1.0;
  double dt = 0.01;
  double t_end = 1.0;
  double cfl_max = 0.5;
  double sample_interval = 0.05;
  double seed_amplitude = 1.0;
  ForcingSpec forcing;

  void validate() const;
};

/// The velocity at one time level plus the stepper's Adams-Bashforth memory.
struct StateSnapshot {
  double t = 0.0;
  ProjectedVelocity v;
  /// Explicit tendency of the previous step (spectral), if any.
  std::optional<SpectralVelocity> history;
  double history_dt = 0.0;

  /// Drops the multistep memory; the next step starts with forward Euler.
  [[nodiscard]] StateSnapshot restarted() const {
    StateSnapshot s{t, v, std::nullopt, 0.0};
    return s;
  }
};

/// Skew-symmetric advection 0.5 (u . grad T) + 0.5 div(u T), dealiased.
/// The vertical derivative is a summation-by-parts operator so that
/// <advection(v, T), T> vanishes to round-off when T is band limited,
/// T = 0 at the bottom and w = 0 at both ends.
HVelocity advection(const ProjectedVelocity& v, const HVelocity& target);

/// Lap_H (spectral) + d33 (ghost-node Neumann top, zero bottom row).
HVelocity diffusion(const HVelocity& v);

/// Fixed low-wavenumber seed: a rotational part with profile s(x3) plus a
/// baroclinic gradient part whose profile has exactly zero trapezoid mean.
ProjectedVelocity seed_state(const GridSpec& g, double amplitude);

/// Throws NumericalError when dt * max|v| / min(dx, dy) or dt * max|w| / dz
/// exceeds cfl_max.
void check_cfl(const ProjectedVelocity& v, const SimParams& p);

StateSnapshot step_reference(const StateSnapshot& s, const SimParams& p);

struct SpinUpResult {
  StateSnapshot state;
  double sup_h2 = 0.0;       // sup over samples of ||v||_H2
  double tail_sup_h2 = 0.0;  // sup over the last 20% of samples
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> h2;
};

/// Integrates from seed_state for t_spin (rounded up to whole steps),
/// sampling every p.sample_interval.
SpinUpResult spin_up(const SimParams& p, double t_spin);
SpinUpResult spin_up(const SimParams& p, double t_spin, StateSnapshot start);

namespace detail {

/// Per-mode implicit operator of CNAB2: M = (1 + dt/2 (nu|k|^2 + d_k)) I -
/// dt nu/2 L_z on the unknown nodes 1..nz-1, with the pressure-gradient
/// response G_k = M^{-1} 1 precomputed.
class ImexOperator {
 public:
  /// damping[i * ny + j] is the implicit linear damping rate of mode (i, j).
  ImexOperator(const GridSpec& g, double nu, double dt, std::vector<double> damping);

  /// Returns the solution of M x = E v + dt * tendency, corrected by the
  /// hydrostatic pressure gradient so that div_H mean(x) = 0. Non-retained
  /// modes are zero.
  [[nodiscard]] SpectralVelocity advance(const SpectralVelocity& v,
                                         const SpectralVelocity& tendency) const;

  [[nodiscard]] double dt() const { return dt_; }

 private:
  void solve(std::size_t mode, std::vector<Complex>& rhs) const;

  GridSpec grid_;
  double nu_, dt_;
  int n_;  // unknowns per column
  std::vector<double> damping_;
  std::vector<double> inv_denom_;  // Thomas factors, per mode x n_
  std::vector<double> upper_;      // modified super-diagonal, per mode x n_
  std::vector<double> response_;   // G_k per mode x n_
  std::vector<double> response_mean_;
};

/// Explicit skew advection with a precomputed w; result is dealiased.
SpectralVelocity advect(const HVelocity& u, const ScalarField& w, const HVelocity& target);

/// Shared operator cache keyed by grid, nu, dt and damping vector hash.
std::shared_ptr<const ImexOperator> imex_operator(const GridSpec& g, double nu, double dt,
                                                  const std::vector<double>& damping);

/// Adams-Bashforth combination of the current tendency and the snapshot's
/// memory; forward Euler when the memory is absent or taken with another dt.
SpectralVelocity extrapolate(const SpectralVelocity& current, const StateSnapshot& s,
                             double dt);

/// Builds a checked snapshot from a spectral state; throws NumericalError on
/// non-finite values.
StateSnapshot finish_step(const SpectralVelocity& next, double t, SpectralVelocity tendency,
                          double dt);

}  // namespace detail

}  // namespace penudge
