#include "doctest.h"
#include "support.hpp"

using namespace testing;

TEST_SUITE("core-grid") {

TEST_CASE("grid spec invariants") {
  GridSpec g = small_grid();
  CHECK_NOTHROW(g.validate());
  auto bad = [](auto edit) {
    GridSpec h = small_grid();
    edit(h);
    return h;
  };
  CHECK_THROWS_AS(bad([](GridSpec& h) { h.nx = 15; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](GridSpec& h) { h.ny = 6; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](GridSpec& h) { h.nz = 4; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](GridSpec& h) { h.l = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](GridSpec& h) { h.dealias_fraction = 1.5; }).validate(), ConfigError);
  CHECK(g.z(0) == doctest::Approx(-1.0));
  CHECK(g.z(g.nz - 1) == doctest::Approx(0.0));
  double sum = 0.0;
  for (double w : g.trapezoid_weights()) sum += w;
  CHECK(sum == doctest::Approx(g.l).epsilon(1e-14));
}

TEST_CASE("to_spectral of a constant has only the mean mode") {
  const GridSpec g = small_grid();
  const SpectralScalar F = to_spectral(ScalarField(g, 1.0));
  for (int iz = 0; iz < g.nz; ++iz)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const double expect = (i == 0 && j == 0) ? 1.0 : 0.0;
        CHECK(std::abs(F(i, j, iz) - Complex(expect)) < 1e-14);
      }
}

TEST_CASE("cos(2 x1) occupies kx = +-2 only") {
  const GridSpec g = small_grid();
  const SpectralScalar F = to_spectral(sample(g, [](double x, double, double) { return std::cos(2 * x); }));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const int m = GridSpec::mode_index(i, g.nx);
      const double expect = (j == 0 && (m == 2 || m == -2)) ? 0.5 : 0.0;
      CHECK(std::abs(F(i, j, 3) - Complex(expect)) < 1e-14);
    }
}

TEST_CASE("transform round trip on random real fields") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const GridSpec g = small_grid(seed == 3 ? 32 : 16);
    const ScalarField f = random_nodal(g, seed);
    const ScalarField back = from_spectral(to_spectral(f));
    CHECK(max_diff(f, back) <= 1e-12 * f.max_abs());
  }
}

TEST_CASE("from_spectral builds cos x1 and rejects non-Hermitian input") {
  const GridSpec g = small_grid();
  SpectralScalar F(g);
  CHECK(from_spectral(F).max_abs() == 0.0);
  for (int iz = 0; iz < g.nz; ++iz) {
    F(1, 0, iz) = 0.5;
    F(g.nx - 1, 0, iz) = 0.5;
  }
  const ScalarField f = from_spectral(F);
  CHECK(max_diff(f, sample(g, [](double x, double, double) { return std::cos(x); })) < 1e-14);
  F(g.nx - 1, 0, 2) = Complex(0.5, 0.3);
  CHECK_THROWS_AS(from_spectral(F), SymmetryError);
}

TEST_CASE("spectral horizontal derivatives") {
  const GridSpec g = small_grid();
  auto s = [&](auto fn) { return sample(g, fn); };
  const ScalarField d1 = d_horizontal(s([](double x, double, double) { return std::sin(x); }), 1);
  CHECK(max_diff(d1, s([](double x, double, double) { return std::cos(x); })) < 1e-12);
  CHECK(d_horizontal(ScalarField(g, 3.0), 1).max_abs() < 1e-14);
  CHECK(d_horizontal(ScalarField(g, 3.0), 2).max_abs() < 1e-14);
  const ScalarField f = s([](double x, double y, double) { return std::sin(3 * x) * std::cos(2 * y); });
  const ScalarField want = s([](double x, double y, double) { return -2 * std::sin(3 * x) * std::sin(2 * y); });
  CHECK(max_diff(d_horizontal(f, 2), want) < 1e-12);
  // Non-square period rescales the wavenumber.
  GridSpec h = g;
  h.lx = 4 * kPi;
  const ScalarField u = sample(h, [](double x, double, double) { return std::sin(1.5 * x); });
  CHECK(max_diff(d_horizontal(u, 1),
                 sample(h, [](double x, double, double) { return 1.5 * std::cos(1.5 * x); })) < 1e-12);
}

TEST_CASE("vertical derivative: exact cases") {
  const GridSpec g = small_grid(8, 9);
  const ScalarField lin = sample(g, [](double, double, double z) { return 3.0 * z + 1.0; });
  const ScalarField d = d_vertical(lin, BcKind::WType);
  for (double v : d.values()) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d_vertical(ScalarField(g, 2.0), BcKind::VType).max_abs() < 1e-13);
}

namespace {
double vertical_error(int nz, bool integral) {
  const GridSpec g = small_grid(8, nz);
  const double l = g.l;
  if (integral) {
    const ScalarField f = sample(g, [&](double, double, double z) { return std::cos(kPi * (z + l) / (2 * l)); });
    return std::abs(integrate_vertical(f, 0.0)(0, 0, 0) - 2.0 / kPi);
  }
  const ScalarField f = sample(g, [&](double, double, double z) { return std::sin(kPi * (z + l) / (2 * l)); });
  const ScalarField d = d_vertical(f, BcKind::VType);
  double err = 0.0;
  for (int iz = 0; iz < g.nz; ++iz)
    err = std::max(err, std::abs(d(0, 0, iz) - kPi / (2 * l) * std::cos(kPi * (g.z(iz) + l) / (2 * l))));
  return err;
}
}  // namespace

TEST_CASE("vertical derivative and integral converge at second order") {
  const double rd = vertical_error(17, false) / vertical_error(33, false);
  CHECK(rd == doctest::Approx(4.0).epsilon(0.2));
  const double ri = vertical_error(17, true) / vertical_error(33, true);
  CHECK(ri == doctest::Approx(4.0).epsilon(0.2));
  CHECK(vertical_error(17, true) < 1e-3);
}

TEST_CASE("integrate_vertical") {
  const GridSpec g = small_grid(8, 11);
  const ScalarField I = integrate_vertical(ScalarField(g, 1.0));
  for (int iz = 0; iz < g.nz; ++iz) CHECK(I(2, 3, iz) == doctest::Approx(g.z(iz) + 1.0).epsilon(1e-13));
  CHECK(I(0, 0, 0) == 0.0);
  const ScalarField odd = sample(g, [](double x, double, double z) { return (z + 0.5) * (1 + std::cos(x)); });
  CHECK(integrate_vertical(odd, 0.0).max_abs() < 1e-14);
  const ScalarField half = integrate_vertical(ScalarField(g, 2.0), -0.5);
  CHECK(half(1, 1, 0) == doctest::Approx(1.0));
  CHECK_THROWS(integrate_vertical(ScalarField(g, 1.0), 0.5));
}

TEST_CASE("dealiased products have no modes above the cutoff") {
  const GridSpec g = small_grid(24, 5);
  const ScalarField a = random_smooth(g, 7, 7), b = random_smooth(g, 8, 7);
  ScalarField prod(g);
  for (std::size_t i = 0; i < prod.values().size(); ++i) prod.values()[i] = a.values()[i] * b.values()[i];
  SpectralScalar F = to_spectral(prod);
  dealias(F);
  CHECK(max_diff(from_spectral(F), dealiased(prod)) < 1e-13);
  int nonzero_retained = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        if (!g.retained(i, j)) CHECK(F(i, j, iz) == Complex(0.0));
        else if (std::abs(F(i, j, iz)) > 1e-8) ++nonzero_retained;
      }
  CHECK(nonzero_retained > 0);
  // 2/3 rule on 24 points keeps |m| <= 8.
  CHECK(g.retained(8, 0));
  CHECK_FALSE(g.retained(9, 0));
  CHECK_FALSE(g.retained(12, 0));
}

TEST_CASE("discrete inner product matches a direct trapezoid sum") {
  const GridSpec g = small_grid();
  const ScalarField f = random_nodal(g, 4);
  CHECK(std::sqrt(inner(f, f)) == doctest::Approx(l2_direct(f)).epsilon(1e-13));
}

}
