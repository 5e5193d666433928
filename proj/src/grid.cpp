#include "penudge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "penudge/detail/fft.hpp"

namespace penudge {

void GridSpec::validate() const {
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
    throw ConfigError("grid: nx and ny must be even and >= 8 (got " +
                      std::to_string(nx) + "x" + std::to_string(ny) + ")");
  if (nz < 5) throw ConfigError("grid: nz must be >= 5");
  if (!(l > 0.0)) throw ConfigError("grid: l must be positive");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw ConfigError("grid: horizontal periods must be positive");
  if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
    throw ConfigError("grid: dealias_fraction must lie in (0, 1]");
}

double GridSpec::kx(int i) const {
  if (i == nx / 2) return 0.0;
  return 2.0 * std::numbers::pi / lx * mode_index(i, nx);
}

double GridSpec::ky(int j) const {
  if (j == ny / 2) return 0.0;
  return 2.0 * std::numbers::pi / ly * mode_index(j, ny);
}

bool GridSpec::retained(int i, int j) const {
  if (i == nx / 2 || j == ny / 2) return false;
  const int cx = static_cast<int>(std::floor(dealias_fraction * nx / 2.0 + 1e-12));
  const int cy = static_cast<int>(std::floor(dealias_fraction * ny / 2.0 + 1e-12));
  return std::abs(mode_index(i, nx)) <= cx && std::abs(mode_index(j, ny)) <= cy;
}

std::vector<double> GridSpec::trapezoid_weights() const {
  std::vector<double> w(nz, dz());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ConfigError("ScalarField: value count does not match grid");
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }

HVelocity::HVelocity(ScalarField a, ScalarField b)
    : c1(std::move(a)), c2(std::move(b)) {
  if (!(c1.grid() == c2.grid()))
    throw ConfigError("HVelocity: components must share the grid");
}

double HVelocity::max_abs() const { return std::max(c1.max_abs(), c2.max_abs()); }
bool HVelocity::all_finite() const { return c1.all_finite() && c2.all_finite(); }

HVelocity& HVelocity::operator+=(const HVelocity& o) {
  c1 += o.c1;
  c2 += o.c2;
  return *this;
}
HVelocity& HVelocity::operator-=(const HVelocity& o) {
  c1 -= o.c1;
  c2 -= o.c2;
  return *this;
}
HVelocity& HVelocity::operator*=(double a) {
  c1 *= a;
  c2 *= a;
  return *this;
}
HVelocity operator+(HVelocity a, const HVelocity& b) { return a += b; }
HVelocity operator-(HVelocity a, const HVelocity& b) { return a -= b; }
HVelocity operator*(double a, HVelocity v) { return v *= a; }

SpectralScalar::SpectralScalar(const GridSpec& grid)
    : grid_(grid), coeffs_(grid.size()) {}

SpectralScalar& SpectralScalar::operator+=(const SpectralScalar& o) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}
SpectralScalar& SpectralScalar::operator-=(const SpectralScalar& o) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}
SpectralScalar& SpectralScalar::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

// ---------------------------------------------------------------------------

SpectralScalar to_spectral(const ScalarField& f) {
  SpectralScalar out(f.grid());
  detail::fft_forward(f.grid(), f.values(), out.coeffs());
  return out;
}

ScalarField from_spectral(const SpectralScalar& F) {
  const GridSpec& g = F.grid();
  std::vector<Complex> res(g.size());
  detail::fft_inverse(g, F.coeffs(), res);
  double mag = 0.0, imag = 0.0;
  for (const auto& c : res) {
    mag = std::max(mag, std::abs(c));
    imag = std::max(imag, std::abs(c.imag()));
  }
  if (imag > 1e-12 * mag) {
    std::ostringstream os;
    os << "from_spectral: coefficients are not Hermitian (imaginary residual " << imag
       << " vs magnitude " << mag << ")";
    throw SymmetryError(os.str());
  }
  ScalarField out(g);
  auto v = out.values();
  for (std::size_t i = 0; i < res.size(); ++i) v[i] = res[i].real();
  return out;
}

void dealias(SpectralScalar& F) {
  const GridSpec& g = F.grid();
  for (int iz = 0; iz < g.nz; ++iz)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        if (!g.retained(i, j)) F(i, j, iz) = 0.0;
}

ScalarField dealiased(const ScalarField& f) {
  auto F = to_spectral(f);
  dealias(F);
  ScalarField out(f.grid());
  detail::fft_inverse_real(f.grid(), F.coeffs(), out.values());
  return out;
}

SpectralScalar d_horizontal(const SpectralScalar& F, int axis) {
  if (axis != 1 && axis != 2) throw ConfigError("d_horizontal: axis must be 1 or 2");
  const GridSpec& g = F.grid();
  SpectralScalar out(g);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const double k = axis == 1 ? g.kx(i) : g.ky(j);
        out(i, j, iz) = Complex(0.0, k) * F(i, j, iz);
      }
  return out;
}

ScalarField d_horizontal(const ScalarField& f, int axis) {
  auto D = d_horizontal(to_spectral(f), axis);
  ScalarField out(f.grid());
  detail::fft_inverse_real(f.grid(), D.coeffs(), out.values());
  return out;
}

ScalarField d_vertical(const ScalarField& f, BcKind bc) {
  const GridSpec& g = f.grid();
  const double dz = g.dz();
  const int top = g.nz - 1;
  ScalarField out(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int iz = 1; iz < top; ++iz)
        out(ix, iy, iz) = (f(ix, iy, iz + 1) - f(ix, iy, iz - 1)) / (2.0 * dz);
      out(ix, iy, 0) =
          (-3.0 * f(ix, iy, 0) + 4.0 * f(ix, iy, 1) - f(ix, iy, 2)) / (2.0 * dz);
      if (bc == BcKind::VType) {
        out(ix, iy, top) = 0.0;  // ghost f[top+1] = f[top-1]
      } else {
        out(ix, iy, top) = (3.0 * f(ix, iy, top) - 4.0 * f(ix, iy, top - 1) +
                            f(ix, iy, top - 2)) /
                           (2.0 * dz);
      }
    }
  return out;
}

void d_vertical_sbp(std::span<const double> c, std::span<double> out, double dz) {
  const std::size_t n = c.size();
  out[0] = (c[1] - c[0]) / dz;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (c[i + 1] - c[i - 1]) / (2.0 * dz);
  out[n - 1] = (c[n - 1] - c[n - 2]) / dz;
}

ScalarField d2_vertical(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const double h2 = g.dz() * g.dz();
  const int top = g.nz - 1;
  ScalarField out(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy) {
      out(ix, iy, 0) = 0.0;
      for (int iz = 1; iz < top; ++iz)
        out(ix, iy, iz) =
            (f(ix, iy, iz + 1) - 2.0 * f(ix, iy, iz) + f(ix, iy, iz - 1)) / h2;
      out(ix, iy, top) = 2.0 * (f(ix, iy, top - 1) - f(ix, iy, top)) / h2;
    }
  return out;
}

ScalarField integrate_vertical(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const double dz = g.dz();
  ScalarField out(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy) {
      double acc = 0.0;
      out(ix, iy, 0) = 0.0;
      for (int iz = 1; iz < g.nz; ++iz) {
        acc += 0.5 * dz * (f(ix, iy, iz - 1) + f(ix, iy, iz));
        out(ix, iy, iz) = acc;
      }
    }
  return out;
}

ScalarField integrate_vertical(const ScalarField& f, double upper) {
  const GridSpec& g = f.grid();
  if (upper < -g.l - 1e-12 || upper > 1e-12)
    throw ConfigError("integrate_vertical: upper limit outside [-l, 0]");
  const double dz = g.dz();
  const double s = std::clamp((upper + g.l) / dz, 0.0, static_cast<double>(g.nz - 1));
  const int below = std::min(static_cast<int>(std::floor(s)), g.nz - 2);
  const double frac = s - below;  // in [0, 1]
  const auto cum = integrate_vertical(f);
  ScalarField out(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy) {
      const double a = f(ix, iy, below), b = f(ix, iy, below + 1);
      const double at_upper = a + frac * (b - a);
      const double val = cum(ix, iy, below) + 0.5 * frac * dz * (a + at_upper);
      for (int iz = 0; iz < g.nz; ++iz) out(ix, iy, iz) = val;
    }
  return out;
}

double inner(const ScalarField& f, const ScalarField& g) {
  const GridSpec& gr = f.grid();
  const auto w = gr.trapezoid_weights();
  const auto a = f.values();
  const auto b = g.values();
  const std::size_t plane = gr.plane();
  double total = 0.0;
  for (int iz = 0; iz < gr.nz; ++iz) {
    double level = 0.0;
    const std::size_t off = iz * plane;
    for (std::size_t p = 0; p < plane; ++p) level += a[off + p] * b[off + p];
    total += w[iz] * level;
  }
  return total * gr.cell_area();
}

double inner(const HVelocity& f, const HVelocity& g) {
  return inner(f.c1, g.c1) + inner(f.c2, g.c2);
}

}  // namespace penudge
