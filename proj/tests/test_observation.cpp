#include "doctest.h"
#include "penudge/diagnostics.hpp"
#include "penudge/observation.hpp"
#include "support.hpp"

using namespace testing;

namespace {

ProbeSuite suite(int n_random = 120, int n_bumps = 40, int n_modes = 40) {
  ProbeSuite s;
  s.random_fields = n_random;
  s.bumps = n_bumps;
  s.single_modes = n_modes;
  s.seed = 77;
  return s;
}

/// Direct cell mean over node values, written independently of the library.
ScalarField cell_means(const ScalarField& f, int cells) {
  const GridSpec& g = f.grid();
  const int b = g.nx / cells;
  ScalarField out(g);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iy = 0; iy < g.ny; ++iy) {
        const int x0 = ix / b * b, y0 = iy / b * b;
        double s = 0.0;
        for (int a = 0; a < b; ++a)
          for (int c = 0; c < b; ++c) s += f(x0 + a, y0 + c, iz);
        out(ix, iy, iz) = s / (b * b);
      }
  return out;
}

}  // namespace

TEST_SUITE("observation") {

TEST_CASE("identity, cutoff and local average on simple fields") {
  const GridSpec g = small_grid();
  const ScalarField f = random_nodal(g, 3);
  CHECK(max_diff(observe(ObservationOp::identity(), f), f) == 0.0);
  CHECK(remainder(ObservationOp::identity(), f).max_abs() == 0.0);

  const ObservationOp cut = ObservationOp::spectral_cutoff(4.0);
  const ScalarField high = sample(g, [](double x, double, double z) { return std::cos(6 * x) * (z + 1); });
  CHECK(observe(cut, high).max_abs() < 1e-14);
  const ScalarField c(g, 2.5);
  CHECK(max_diff(observe(cut, c), c) < 1e-14);
  // |k| = 5 > 4 removed, |k| = sqrt(8) kept (Euclidean, not max norm).
  const ScalarField mixed = sample(g, [](double x, double y, double) { return std::sin(3 * x + 4 * y) + std::cos(2 * x - 2 * y); });
  const ScalarField kept = sample(g, [](double x, double y, double) { return std::cos(2 * x - 2 * y); });
  CHECK(max_diff(observe(cut, mixed), kept) < 1e-13);
  CHECK(remainder(cut, random_smooth(g, 4, 2)).max_abs() < 1e-12);

  const ObservationOp avg = ObservationOp::local_average(2.0 * kPi / 4.0);
  const ScalarField per_cell = cell_means(f, 4);
  CHECK(max_diff(observe(avg, per_cell), per_cell) < 1e-14);
  CHECK(max_diff(observe(avg, f), per_cell) < 1e-13);
}

TEST_CASE("local average cell must tile the period") {
  const GridSpec g = small_grid();
  CHECK_THROWS_AS(ObservationOp::local_average(1.0).validate(g), ConfigError);
  CHECK_THROWS_AS(observe(ObservationOp::local_average(1.0), ScalarField(g)), ConfigError);
  CHECK_NOTHROW(ObservationOp::local_average(2.0 * kPi / 8.0 * 1.005).validate(g));
  CHECK_THROWS_AS(ObservationOp::local_average(2.0 * kPi / 3.0).validate(g), ConfigError);
  CHECK_THROWS_AS(ObservationOp::spectral_cutoff(0.0), ConfigError);
}

TEST_CASE("linearity, idempotence and self-adjointness") {
  const GridSpec g = small_grid();
  const ScalarField f = random_nodal(g, 5), h = random_nodal(g, 6);
  for (const ObservationOp& J : {ObservationOp::spectral_cutoff(3.0), ObservationOp::local_average(kPi / 2.0)}) {
    const ScalarField lhs = observe(J, 1.5 * f + (-2.0) * h);
    const ScalarField rhs = 1.5 * observe(J, f) + (-2.0) * observe(J, h);
    CHECK(max_diff(lhs, rhs) <= 1e-12 * lhs.max_abs());
    const ScalarField Jf = observe(J, f);
    CHECK(max_diff(observe(J, Jf), Jf) <= 1e-12 * Jf.max_abs());
    const double a = inner(observe(J, f), h), b = inner(f, observe(J, h));
    CHECK(std::abs(a - b) <= 1e-10 * std::sqrt(inner(f, f) * inner(h, h)));
    CHECK(inner(observe(J, f), f) >= 0.0);
  }
}

TEST_CASE("axiom constants") {
  const GridSpec g = small_grid(32, 9);
  const ProbeSuite s = suite();
  CHECK(s.total() >= 200);

  const AxiomConstants id = estimate_constants(ObservationOp::identity(), g, s);
  CHECK(id.c_bound == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(id.c_approx == 0.0);
  CHECK(id.n_probes == s.total());

  for (double K : {2.0, 4.0, 8.0}) {
    const AxiomConstants a = estimate_constants(ObservationOp::spectral_cutoff(K), g, s);
    CHECK(a.c_bound <= 1.0 + 1e-12);
    CHECK(a.c_approx <= 1.0 + 1e-6);
    CHECK(a.c_approx > 0.1);
  }
  const AxiomConstants la = estimate_constants(ObservationOp::local_average(2.0 * kPi / 8.0), g, s);
  CHECK(la.c_bound <= 1.0 + 1e-12);
  CHECK(std::isfinite(la.c_approx));
  CHECK(la.c_approx > 0.0);

  // Deterministic under the seed.
  const AxiomConstants again = estimate_constants(ObservationOp::local_average(2.0 * kPi / 8.0), g, s);
  CHECK(again.c_approx == la.c_approx);
}

TEST_CASE("remainder is bounded by c_approx delta ||grad f|| on the probes") {
  const GridSpec g = small_grid(32, 9);
  const ProbeSuite s = suite(40, 10, 10);
  const auto probes = make_probes(g, s);
  CHECK(probes.size() == 60);
  for (const ObservationOp& J : {ObservationOp::spectral_cutoff(4.0), ObservationOp::local_average(kPi / 4.0)}) {
    const AxiomConstants a = estimate_constants(J, g, s);
    for (const ScalarField& f : probes) {
      const ScalarField r = remainder(J, f);
      CHECK(std::sqrt(inner(r, r)) <= a.c_approx * J.delta() * std::sqrt(grad_sq(f)) * (1 + 1e-9) + 1e-14);
    }
  }
}

TEST_CASE("c_approx delta is non-increasing in K") {
  const GridSpec g = small_grid(32, 9);
  const ProbeSuite s = suite(60, 20, 20);
  double prev = INFINITY;
  for (double K : {1.0, 2.0, 3.0, 5.0, 8.0, 10.0}) {
    const ObservationOp J = ObservationOp::spectral_cutoff(K);
    const double v = estimate_constants(J, g, s).c_approx * J.delta();
    CHECK(v <= prev * (1 + 1e-12));
    prev = v;
  }
}

}
