#pragma once

// Experiment configuration (YAML). Every section is optional and falls back
// to the defaults below; unknown keys are rejected. Errors carry
// "file:line:column: section.key: message".
//
//   version: 1                 # required
//   seed: 20240601             # probe and broadband-forcing seeds derive from it
//   output_dir: out
//   sample_interval: 0.5       # time units between recorded samples
//   grid:   {nx, ny, nz, l, lx, ly, dealias_fraction}
//   sim:    {nu, dt, t_end, t_spin, cfl_max, seed_amplitude,
//            forcing: {pattern: none|shear|cellular|broadband, amplitude,
//                      wavenumber, mean, modulation, omega, holder_exponent}}
//   observation: {kind: identity|cutoff|local_average, K, h}
//   nudge:  {mu, forcing_mode: exact|observed,
//            initial_guess: zero|reference|scaled, guess_scale,
//            t0_policy: immediate|small_gradient_window, t0_window}
//   gates:  {mode: calibrated|configured, samples, c0, c1, c_gate1,
//            c_gate1_delta, c_gate2}
//   probes: {random_fields, bumps, single_modes, band, samples}
//   sweep:  {mu: [...], delta: [...], forcing_mode: [...], threads}
//   plot: true

#include <cstdint>
#include <string>
#include <vector>

#include "penudge/dynamics.hpp"
#include "penudge/linearized.hpp"
#include "penudge/nudging.hpp"
#include "penudge/observation.hpp"

namespace penudge::cli {

enum class InitialGuess { Zero, Reference, Scaled };
enum class GateMode { Calibrated, Configured };

struct NudgeConfig {
  double mu = 10.0;
  ForcingMode forcing_mode = ForcingMode::Exact;
  InitialGuess initial_guess = InitialGuess::Zero;
  double guess_scale = 0.5;
  T0Policy t0_policy = T0Policy::Immediate;
  double t0_window = 1.0;
};

struct GateConfig {
  GateMode mode = GateMode::Calibrated;
  int samples = 200;
  GateConstants constants;
};

struct SweepConfig {
  std::vector<double> mu;
  std::vector<double> delta;
  std::vector<ForcingMode> forcing_mode;
  int threads = 0;  // 0: hardware concurrency
};

struct ExperimentConfig {
  int version = 1;
  std::uint64_t seed = 20240601;
  std::string output_dir = "out";
  SimParams sim;  // sim.grid, sim.sample_interval are filled from their sections
  double t_spin = 10.0;
  ObservationOp observation = ObservationOp::spectral_cutoff(8.0);
  NudgeConfig nudge;
  GateConfig gates;
  ProbeSuite probes;
  int coercivity_samples = 200;
  SweepConfig sweep;
  bool plot = false;

  /// Sets the master seed and every seed derived from it.
  void reseed(std::uint64_t s);
  /// Cross-field checks (positivity, operator fits the grid, dt vs mu).
  void validate() const;
  /// Canonical JSON text of every effective setting except output_dir
  /// (used for the hash).
  [[nodiscard]] std::string canonical_json() const;
  /// FNV-1a 64 of canonical_json(), as 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

inline constexpr int kConfigVersion = 1;

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Observation operator of the configured kind at density delta
/// (cutoff K = 1/delta, local average h = delta).
ObservationOp observation_at(const ExperimentConfig& c, double delta);

NudgeParams nudge_params(const ExperimentConfig& c, const ObservationOp& J, double mu,
                         ForcingMode mode, const ProjectedVelocity& reference_start);

const char* to_string(InitialGuess g);
const char* to_string(GateMode m);

}  // namespace penudge::cli
