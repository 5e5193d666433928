#pragma once

// Discrete function spaces on the periodic layer T^2 x (-l, 0).
//
// Horizontal directions are Fourier pseudo-spectral, the vertical direction
// is a uniform node grid on [-l, 0] that includes both endpoints. Node 0 is
// the bottom (x3 = -l), node nz-1 the top (x3 = 0).
//
// Storage layout is level-major: index = (iz * nx + ix) * ny + iy, so that a
// horizontal slice is contiguous and can be transformed in place.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "penudge/error.hpp"

namespace penudge {

using Complex = std::complex<double>;

struct GridSpec {
  int nx = 32;
  int ny = 32;
  int nz = 17;
  double l = 1.0;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  [[nodiscard]] std::size_t plane() const {
    return static_cast<std::size_t>(nx) * ny;
  }
  [[nodiscard]] double dx() const { return lx / nx; }
  [[nodiscard]] double dy() const { return ly / ny; }
  [[nodiscard]] double dz() const { return l / (nz - 1); }
  [[nodiscard]] double z(int iz) const { return -l + iz * dz(); }
  [[nodiscard]] double x(int ix) const { return ix * dx(); }
  [[nodiscard]] double y(int iy) const { return iy * dy(); }
  [[nodiscard]] double cell_area() const { return lx * ly / (nx * ny); }
  [[nodiscard]] double volume() const { return lx * ly * l; }

  [[nodiscard]] std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * nx + ix) * ny + iy;
  }

  /// Signed mode index of FFT slot i for an axis of n points.
  static int mode_index(int i, int n) { return i <= n / 2 ? i : i - n; }

  /// Physical wavenumber used by every derivative-type operator. The Nyquist
  /// slot carries zero wavenumber so that spectral differentiation stays
  /// skew-adjoint on real fields.
  [[nodiscard]] double kx(int i) const;
  [[nodiscard]] double ky(int j) const;
  [[nodiscard]] double k_squared(int i, int j) const {
    const double a = kx(i), b = ky(j);
    return a * a + b * b;
  }

  /// True for modes retained by the dealiasing filter (never the Nyquist slot).
  [[nodiscard]] bool retained(int i, int j) const;

  /// Trapezoid weights over the vertical nodes; they sum to l.
  [[nodiscard]] std::vector<double> trapezoid_weights() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double fill = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::vector<double>& raw() { return values_; }
  [[nodiscard]] const std::vector<double>& raw() const { return values_; }

  double& operator()(int ix, int iy, int iz) {
    return values_[grid_.index(ix, iy, iz)];
  }
  double operator()(int ix, int iy, int iz) const {
    return values_[grid_.index(ix, iy, iz)];
  }

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);

/// Horizontal velocity (v1, v2).
struct HVelocity {
  ScalarField c1;
  ScalarField c2;

  HVelocity() = default;
  explicit HVelocity(const GridSpec& grid) : c1(grid), c2(grid) {}
  HVelocity(ScalarField a, ScalarField b);

  [[nodiscard]] const GridSpec& grid() const { return c1.grid(); }
  ScalarField& operator[](int i) { return i == 0 ? c1 : c2; }
  const ScalarField& operator[](int i) const { return i == 0 ? c1 : c2; }

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;

  HVelocity& operator+=(const HVelocity& o);
  HVelocity& operator-=(const HVelocity& o);
  HVelocity& operator*=(double a);
};

HVelocity operator+(HVelocity a, const HVelocity& b);
HVelocity operator-(HVelocity a, const HVelocity& b);
HVelocity operator*(double a, HVelocity v);

/// Horizontal Fourier coefficients per level, normalised so that
/// f(x) = sum_k c_k exp(i k.x).
class SpectralScalar {
 public:
  SpectralScalar() = default;
  explicit SpectralScalar(const GridSpec& grid);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::span<const Complex> coeffs() const { return coeffs_; }
  [[nodiscard]] std::span<Complex> coeffs() { return coeffs_; }
  [[nodiscard]] std::vector<Complex>& raw() { return coeffs_; }
  [[nodiscard]] const std::vector<Complex>& raw() const { return coeffs_; }

  Complex& operator()(int i, int j, int iz) {
    return coeffs_[grid_.index(i, j, iz)];
  }
  Complex operator()(int i, int j, int iz) const {
    return coeffs_[grid_.index(i, j, iz)];
  }

  SpectralScalar& operator+=(const SpectralScalar& o);
  SpectralScalar& operator-=(const SpectralScalar& o);
  SpectralScalar& operator*=(double a);

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

enum class BcKind {
  /// dv/dz = 0 at the top, v = 0 at the bottom.
  VType,
  /// w = 0 at both ends.
  WType,
};

SpectralScalar to_spectral(const ScalarField& f);
/// Throws SymmetryError when the coefficients are not Hermitian within 1e-12.
ScalarField from_spectral(const SpectralScalar& F);

/// Zeroes every mode outside the dealiasing box.
void dealias(SpectralScalar& F);
ScalarField dealiased(const ScalarField& f);

/// Spectral derivative along axis 1 or 2.
ScalarField d_horizontal(const ScalarField& f, int axis);
SpectralScalar d_horizontal(const SpectralScalar& F, int axis);

/// Centered second-order differences in the interior, boundary rows according
/// to bc (ghost node for the Neumann top, one-sided second order otherwise).
ScalarField d_vertical(const ScalarField& f, BcKind bc);

/// Summation-by-parts first derivative: centered interior, first-order
/// one-sided ends. With trapezoid weights H, H*D + (H*D)^T = diag(-1,0,..,0,1).
void d_vertical_sbp(std::span<const double> column, std::span<double> out,
                    double dz);

/// Second derivative for v-type fields: centered interior, ghost-node Neumann
/// top row, zero bottom row (Dirichlet node carries no tendency).
ScalarField d2_vertical(const ScalarField& f);

/// Cumulative trapezoid integral from -l to each node.
ScalarField integrate_vertical(const ScalarField& f);
/// Integral from -l to `upper`, replicated over all levels.
ScalarField integrate_vertical(const ScalarField& f, double upper);

/// Discrete L2 inner product: cell area times trapezoid-in-z grid sum.
double inner(const ScalarField& f, const ScalarField& g);
double inner(const HVelocity& f, const HVelocity& g);

/// Evaluates a function of (x1, x2, x3) on the grid nodes.
template <class F>
ScalarField sample(const GridSpec& grid, F&& fn) {
  ScalarField out(grid);
  for (int iz = 0; iz < grid.nz; ++iz)
    for (int ix = 0; ix < grid.nx; ++ix)
      for (int iy = 0; iy < grid.ny; ++iy)
        out(ix, iy, iz) = fn(grid.x(ix), grid.y(iy), grid.z(iz));
  return out;
}

}  // namespace penudge
