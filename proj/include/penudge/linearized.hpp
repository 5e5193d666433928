#pragma once

// Linearisation of the nudged system around a reference snapshot v:
//   A phi = -P Lap phi + P(u . grad phi) + P(phi^ . grad v) + mu P J phi,
// the bilinear form
//   B(phi, psi) = mu <phi, psi> + <grad phi, grad psi> + <Bp phi, psi>,
//   Bp phi = (u . grad) phi + (phi^ . grad) v + mu K phi,
// coercivity probes, and the parameter gates with calibrated constants.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "penudge/hydrostatic.hpp"
#include "penudge/observation.hpp"

namespace penudge {

HVelocity apply_A(const ProjectedVelocity& v, const ProjectedVelocity& phi, double mu,
                  const ObservationOp& J);

double bilinear_B(const ProjectedVelocity& v, const ProjectedVelocity& phi,
                  const ProjectedVelocity& psi, double mu, const ObservationOp& J);

/// Random band-limited fields with the v-type vertical conditions, projected
/// and normalised to unit L2 norm. Deterministic in (seed, index).
std::vector<ProjectedVelocity> compatible_probes(const GridSpec& g, int n_samples,
                                                 std::uint64_t seed, int band = 6);

/// min over probes of B(phi, phi) - mu/2 ||phi||^2 - 1/2 ||grad phi||^2.
double coercivity_probe(const ProjectedVelocity& v, double mu, const ObservationOp& J,
                        int n_samples, std::uint64_t seed);

enum class GateSource { Configured, Calibrated };
const char* to_string(GateSource s);

struct GateConstants {
  double c0 = 1.0;             // C0 sum_{m=1,2,4} s^m <= mu
  double c1 = 1.0;             // C1 mu delta <= 1
  double c_gate1 = 1.0;        // mu/4 >= c_gate1 s^4
  double c_gate1_delta = 1.0;  // mu/4 >= c_gate1_delta mu^2 delta^2
  double c_gate2 = 1.0;        // c_gate2 (s + delta mu) <= mu^{3/4} / 2
  GateSource source = GateSource::Configured;

  /// Throws ConfigError unless every constant is positive and finite.
  void validate() const;
};

struct GateReport {
  double sup_H2 = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  bool pass_A = false;
  bool pass_gate1 = false;
  bool pass_gate2 = false;
  double margin_A = 0.0;
  double margin_gate1 = 0.0;
  double margin_gate2 = 0.0;

  [[nodiscard]] bool pass() const { return pass_A && pass_gate1 && pass_gate2; }
};

/// (A) also carries mu >= 1 and delta <= 1. Each margin is the minimum slack
/// of its inequalities; a gate passes iff its margin is >= 0.
GateReport check_gates(double sup_H2, double mu, double delta, const GateConstants& gc);

/// Constants measured on compatible probes around the snapshot v:
///  c0      2 sup |<phi^ . grad v, phi>| / ||phi||^2 / (s + s^2 + s^4)
///  c1      c_approx of J
///  c_gate1 27/4 C^4 with C = sup |<phi^ . grad v, phi>| /
///          (s ||grad phi||^{3/2} ||phi||^{1/2})  (Young's inequality)
///  c_gate1_delta  c_approx^2
///  c_gate2 max(sup ||A(v;phi) + A(phi;v)|| / (s ||phi||_{3/2}),
///              sup ||K phi|| / (delta ||phi||_{3/2}))
/// with s = ||v||_H2 and ||.||_{3/2} = sqrt(||.||_H1 ||.||_H2).
GateConstants calibrate_gate_constants(const ProjectedVelocity& v, const ObservationOp& J,
                                       int n_samples, std::uint64_t seed,
                                       const ProbeSuite& axiom_probes = {});

/// Smallest mu >= 1 that passes every gate for this delta, if any.
std::optional<double> smallest_passing_mu(double sup_H2, double delta, const GateConstants& gc);

}  // namespace penudge
