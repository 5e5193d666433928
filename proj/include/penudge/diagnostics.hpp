#pragma once

// Discrete norms, the energy-budget monitor for the difference V = v - v~,
// exponential decay fits, plateau (limsup surrogate) and log-log scaling fits.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "penudge/grid.hpp"

namespace penudge {

enum class NormOrder { L2, H1, H2 };

/// L2 by trapezoid-in-z quadrature. H1 adds ||grad f||^2 (spectral horizontal,
/// forward differences in z at cell midpoints, i.e. the energy of the
/// diffusion stencil). H2 adds the horizontal Hessian, mixed x3 derivatives
/// and d33 f (centered interior, one-sided second order boundary rows).
double norm(const ScalarField& f, NormOrder order);
double norm(const HVelocity& v, NormOrder order);

/// <grad f, grad g> in the discretisation used by the H1 norm.
double grad_inner(const ScalarField& f, const ScalarField& g);
double grad_inner(const HVelocity& f, const HVelocity& g);
inline double grad_sq(const HVelocity& f) { return grad_inner(f, f); }
inline double grad_sq(const ScalarField& f) { return grad_inner(f, f); }

struct DecayFit {
  double rate = 0.0;       // 1/time, -slope of log(series)
  double intercept = 0.0;  // log-amplitude at t = 0
  double t_a = 0.0;
  double t_b = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Least-squares line through log(values) over samples with t in [t_a, t_b].
/// Throws NumericalError if a value in the window is not positive or fewer
/// than two samples fall inside.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   double t_a, double t_b);

/// [0.2 T, 0.8 T], with the upper end pulled back to the last sample before
/// the series drops to floor * initial.
std::pair<double, double> default_decay_window(std::span<const double> times,
                                               std::span<const double> values,
                                               double floor = 1e-13);

struct PlateauEstimate {
  double level = 0.0;
  double t_from = 0.0;
  double t_to = 0.0;
  std::string method = "max-over-tail";
};

/// Maximum over the final tail_fraction of the samples (at least 10 samples).
PlateauEstimate plateau(std::span<const double> times, std::span<const double> values,
                        double tail_fraction = 0.25);

/// Log-log least-squares slope of (delta, level) pairs. Requires >= 3 pairs,
/// all positive, with max delta / min delta >= 2.
double scaling_fit(std::span<const std::pair<double, double>> pairs);

/// Energy quantities of V at one time level.
struct EnergyTerms {
  double t = 0.0;
  double half_norm_sq = 0.0;  // 0.5 ||V||^2
  double dissipation = 0.0;   // nu ||grad V||^2
  double nudging = 0.0;       // <mu J V, V>
  double forcing = 0.0;       // <cross + forcing terms, V>
};

/// Residual of d/dt 0.5||V||^2 + nu||grad V||^2 + <mu J V, V> - <R, V> for
/// every consecutive pair, with time derivative by differencing and the other
/// terms averaged over the step.
std::vector<double> energy_budget(std::span<const EnergyTerms> steps);

}  // namespace penudge
