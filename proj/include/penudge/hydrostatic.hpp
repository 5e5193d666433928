#pragma once

// Hydrostatic structure: depth average, the hydrostatic Helmholtz projection
// P phi = phi + grad_H (-Lap_H)^{-1} div_H mean(phi), and the diagnostic
// vertical velocity w = -int_{-l}^{x3} div_H v dz.

#include "penudge/grid.hpp"

namespace penudge {

/// Horizontal velocity whose depth average is discretely divergence free:
/// check_div_constraint(v) <= 1e-10 * ||v||_L2.
class ProjectedVelocity {
 public:
  static constexpr double kTolerance = 1e-10;

  ProjectedVelocity() = default;

  /// Verifies the constraint; throws ConstraintError otherwise.
  static ProjectedVelocity checked(HVelocity v, double rel_tol = kTolerance);
  /// a - b, checked against kTolerance * (||a|| + ||b||) so that a vanishing
  /// difference of two constrained fields is accepted.
  static ProjectedVelocity difference(const ProjectedVelocity& a, const ProjectedVelocity& b);
  /// Checked against kTolerance * scale (scale: norm of the field v came from).
  static ProjectedVelocity checked_at_scale(HVelocity v, double scale);

  [[nodiscard]] const HVelocity& velocity() const { return v_; }
  [[nodiscard]] const GridSpec& grid() const { return v_.grid(); }
  operator const HVelocity&() const { return v_; }  // NOLINT

 private:
  explicit ProjectedVelocity(HVelocity v) : v_(std::move(v)) {}
  HVelocity v_;
};

/// Trapezoid depth mean of each component, replicated over levels.
HVelocity depth_average(const HVelocity& v);
ScalarField depth_average(const ScalarField& f);

/// Subtracts k (k . mean_k) / |k|^2 from every level of every k != 0 mode.
ProjectedVelocity project(const HVelocity& phi);

/// Like project, but the removed gradient carries the profile
/// sin(pi (x3 + l) / (2 l)) normalised to unit depth mean, so the bottom
/// Dirichlet and top Neumann conditions of phi survive. Used to build
/// boundary-compatible fields (seeds, probes).
ProjectedVelocity project_bc_compatible(const HVelocity& phi);

/// w from a projected velocity.
ScalarField compute_w(const ProjectedVelocity& v);
/// Same, for an unchecked field; throws ConstraintError if the constraint is
/// violated.
ScalarField compute_w(const HVelocity& v);

/// Horizontal divergence, computed spectrally.
ScalarField div_horizontal(const HVelocity& v);

/// Largest physical amplitude (2|c_k|) of div_H of the depth average.
double check_div_constraint(const HVelocity& v);

}  // namespace penudge
