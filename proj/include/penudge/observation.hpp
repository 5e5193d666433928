#pragma once

// Observation operators J_delta acting on the horizontal structure of each
// vertical level, the remainder K_delta = J_delta - I, and an empirical
// estimate of the constants in
//   ||J f|| <= C ||f||,   ||J f - f|| <= C delta ||grad f||.

#include <cstdint>
#include <vector>

#include "penudge/grid.hpp"

namespace penudge {

enum class ObservationKind { Identity, SpectralCutoff, LocalAverage };

struct ObservationOp {
  ObservationKind kind = ObservationKind::Identity;
  /// SpectralCutoff: largest retained Euclidean wavenumber K.
  double cutoff = 0.0;
  /// LocalAverage: side of the square averaging cell.
  double cell = 0.0;

  static ObservationOp identity() { return {}; }
  static ObservationOp spectral_cutoff(double K);
  static ObservationOp local_average(double h);

  /// Nominal observation density: 1/K, h, or 0.
  [[nodiscard]] double delta() const;

  /// Identity and SpectralCutoff are diagonal in the Fourier basis.
  [[nodiscard]] bool spectral_diagonal() const {
    return kind != ObservationKind::LocalAverage;
  }
  /// For spectrally diagonal kinds: is mode (i, j) observed?
  [[nodiscard]] bool observes(const GridSpec& g, int i, int j) const;

  /// Throws ConfigError when the operator cannot act on this grid.
  void validate(const GridSpec& g) const;
};

const char* to_string(ObservationKind k);

ScalarField observe(const ObservationOp& J, const ScalarField& f);
HVelocity observe(const ObservationOp& J, const HVelocity& v);

/// K_delta f = J_delta f - f
ScalarField remainder(const ObservationOp& J, const ScalarField& f);
HVelocity remainder(const ObservationOp& J, const HVelocity& v);

struct ProbeSuite {
  int random_fields = 120;  // random band-limited fields
  int bumps = 40;           // horizontal gradients of smooth periodic bumps
  int single_modes = 40;    // cos(k.x + phase) times a vertical profile
  int band = 8;             // largest mode index of the random fields
  std::uint64_t seed = 20240601;

  [[nodiscard]] int total() const { return random_fields + bumps + single_modes; }
};

std::vector<ScalarField> make_probes(const GridSpec& g, const ProbeSuite& suite);

struct AxiomConstants {
  double c_bound = 0.0;   // sup ||J f|| / ||f||
  double c_approx = 0.0;  // sup ||J f - f|| / (delta ||grad f||); 0 when delta = 0
  int n_probes = 0;
};

AxiomConstants estimate_constants(const ObservationOp& J, const GridSpec& g,
                                  const ProbeSuite& suite);

}  // namespace penudge
