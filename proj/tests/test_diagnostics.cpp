#include <random>

#include "doctest.h"
#include "penudge/diagnostics.hpp"
#include "penudge/dynamics.hpp"
#include "support.hpp"

using namespace testing;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

template <class F>
std::vector<double> map(const std::vector<double>& t, F f) {
  std::vector<double> v;
  for (double x : t) v.push_back(f(x));
  return v;
}

/// Budget residual of pure diffusion of the vertical eigenprofile over [0, T].
double diffusion_budget_residual(double dt) {
  SimParams p;
  p.grid = small_grid(8, 9);
  p.nu = 1.0;
  p.dt = dt;
  HVelocity v(p.grid);
  v.c2 = sample(p.grid, [&](double x, double, double z) {
    return std::sin(x) * std::sin(kPi * (z + 1) / 2);
  });
  StateSnapshot s{0.0, ProjectedVelocity::checked(v), std::nullopt, 0.0};
  std::vector<EnergyTerms> terms;
  auto record = [&] {
    EnergyTerms e;
    e.t = s.t;
    e.half_norm_sq = 0.5 * inner(s.v.velocity(), s.v.velocity());
    e.dissipation = p.nu * grad_sq(s.v.velocity());
    terms.push_back(e);
  };
  record();
  for (int i = 0; i < static_cast<int>(std::lround(0.5 / dt)); ++i) {
    s = step_reference(s, p);
    record();
  }
  double worst = 0.0;
  for (double r : energy_budget(terms)) worst = std::max(worst, std::abs(r));
  return worst;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("norms of closed-form fields") {
  const GridSpec g = small_grid();
  CHECK(norm(ScalarField(g), NormOrder::H2) == 0.0);
  const ScalarField c = sample(g, [](double x, double, double) { return std::cos(x); });
  const double pi2 = kPi * kPi;
  CHECK(norm(c, NormOrder::L2) == doctest::Approx(std::sqrt(2 * pi2)).epsilon(1e-13));
  CHECK(norm(c, NormOrder::H1) == doctest::Approx(std::sqrt(4 * pi2)).epsilon(1e-13));
  CHECK(norm(c, NormOrder::H2) == doctest::Approx(std::sqrt(6 * pi2)).epsilon(1e-13));
  const ScalarField c2 = sample(g, [](double x, double y, double) { return std::cos(x) + std::sin(2 * y); });
  CHECK(norm(c2, NormOrder::L2) > norm(c, NormOrder::L2));
  CHECK(norm(c2, NormOrder::L2) == doctest::Approx(std::sqrt(4 * pi2)).epsilon(1e-13));
  const HVelocity v(c, ScalarField(g));
  CHECK(norm(v, NormOrder::H1) == doctest::Approx(norm(c, NormOrder::H1)));
}

TEST_CASE("norm ordering on random fields") {
  const GridSpec g = small_grid();
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    const ScalarField f = seed % 2 ? random_nodal(g, seed) : random_smooth(g, seed);
    const double a = norm(f, NormOrder::L2), b = norm(f, NormOrder::H1), c = norm(f, NormOrder::H2);
    CHECK(a <= b);
    CHECK(b <= c);
    CHECK(a == doctest::Approx(l2_direct(f)).epsilon(1e-13));
  }
}

TEST_CASE("gradient energy of a vertical profile") {
  // Forward differences: sum over cells of ((f_{i+1} - f_i)/dz)^2 dz times area.
  const GridSpec g = small_grid(8, 9);
  const ScalarField f = sample(g, [](double, double, double z) { return z * z; });
  double want = 0.0;
  for (int iz = 0; iz + 1 < g.nz; ++iz) {
    const double d = (g.z(iz + 1) * g.z(iz + 1) - g.z(iz) * g.z(iz)) / g.dz();
    want += d * d * g.dz();
  }
  want *= g.lx * g.ly;
  CHECK(grad_sq(f) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("energy budget") {
  std::vector<EnergyTerms> zero(5);
  for (int i = 0; i < 5; ++i) zero[i].t = 0.1 * i;
  for (double r : energy_budget(zero)) CHECK(r == 0.0);

  std::vector<EnergyTerms> bad(2);
  CHECK_THROWS_AS(energy_budget(bad), NumericalError);

  const double r1 = diffusion_budget_residual(0.02);
  const double r2 = diffusion_budget_residual(0.01);
  CHECK(r1 / r2 >= 3.0);
  CHECK(r1 / r2 <= 5.0);
}

TEST_CASE("fit_decay") {
  const auto t = linspace(0.0, 4.0, 41);
  const auto v = map(t, [](double x) { return 5.0 * std::exp(-3.0 * x); });
  const DecayFit f = fit_decay(t, v, 0.0, 4.0);
  CHECK(f.rate == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.samples == 41);

  const auto scaled = map(v, [](double x) { return 1e-7 * x; });
  CHECK(fit_decay(t, scaled, 0.5, 3.5).rate == doctest::Approx(3.0).epsilon(1e-9));

  const auto flat = map(t, [](double) { return 2.0; });
  const DecayFit ff = fit_decay(t, flat, 0.0, 4.0);
  CHECK(std::abs(ff.rate) < 1e-12);

  auto zeroed = v;
  zeroed[20] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, zeroed, 0.0, 4.0), NumericalError);
  CHECK_NOTHROW(fit_decay(t, zeroed, 2.5, 4.0));
  CHECK_THROWS_AS(fit_decay(t, v, 1.01, 1.09), NumericalError);
  CHECK_THROWS_AS(fit_decay(t, v, 2.0, 1.0), ConfigError);
}

TEST_CASE("fit_decay with 1% multiplicative noise") {
  const auto t = linspace(0.0, 4.0, 81);
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.01);
    const auto v = map(t, [&](double x) { return 2.0 * std::exp(-1.5 * x) * (1.0 + n(rng)); });
    CHECK(fit_decay(t, v, 0.0, 4.0).rate == doctest::Approx(1.5).epsilon(0.05));
  }
}

TEST_CASE("default decay window") {
  const auto t = linspace(0.0, 10.0, 101);
  const auto slow = map(t, [](double x) { return std::exp(-x); });
  auto [a, b] = default_decay_window(t, slow);
  CHECK(a == doctest::Approx(2.0));
  CHECK(b == doctest::Approx(8.0));
  const auto fast = map(t, [](double x) { return std::exp(-10.0 * x); });
  std::tie(a, b) = default_decay_window(t, fast);
  // 1e-13 floor is crossed at t = 2.99; the window ends at the sample before.
  CHECK(b == doctest::Approx(2.9));
}

TEST_CASE("plateau") {
  const auto t = linspace(0.0, 20.0, 201);
  const auto decay = map(t, [](double x) { return std::exp(-x); });
  const PlateauEstimate p = plateau(t, decay);
  CHECK(p.level == doctest::Approx(decay[150]));
  CHECK(p.level < 1e-6);
  CHECK(p.t_from == doctest::Approx(15.0));
  CHECK(p.t_to == doctest::Approx(20.0));

  const auto osc = map(t, [](double x) { return 0.3 + 0.2 * std::exp(-0.1 * x) * std::sin(3 * x); });
  double tail_amp = 0.0;
  for (std::size_t i = 150; i < t.size(); ++i) tail_amp = std::max(tail_amp, 0.2 * std::exp(-0.1 * t[i]));
  CHECK(plateau(t, osc).level <= 0.3 + tail_amp);
  CHECK(plateau(t, osc).level >= 0.3 + 0.9 * tail_amp);

  const auto c = map(t, [](double) { return 0.7; });
  CHECK(plateau(t, c).level == 0.7);

  auto bigger = osc;
  for (double& x : bigger) x += 0.01;
  CHECK(plateau(t, bigger).level >= plateau(t, osc).level);

  const std::vector<double> short_t(9, 1.0);
  CHECK_THROWS(plateau(short_t, short_t));
}

TEST_CASE("scaling_fit") {
  const std::vector<std::pair<double, double>> lin = {{0.2, 1.4}, {0.1, 0.7}, {0.05, 0.35}};
  CHECK(scaling_fit(lin) == doctest::Approx(1.0).epsilon(1e-9));
  const std::vector<std::pair<double, double>> quad = {{0.2, 0.04}, {0.1, 0.01}, {0.05, 0.0025}};
  CHECK(scaling_fit(quad) == doctest::Approx(2.0).epsilon(1e-9));
  const std::vector<std::pair<double, double>> narrow = {{0.2, 1.0}, {0.15, 0.8}, {0.11, 0.6}};
  CHECK_THROWS(scaling_fit(narrow));
  const std::vector<std::pair<double, double>> two = {{0.2, 1.0}, {0.05, 0.1}};
  CHECK_THROWS(scaling_fit(two));
  const std::vector<std::pair<double, double>> neg = {{0.2, 1.0}, {0.1, 0.0}, {0.05, 0.1}};
  CHECK_THROWS(scaling_fit(neg));
}

}
