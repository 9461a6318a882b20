#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "dyadic/core.hpp"
#include "dyadic/diagnostics.hpp"
#include "dyadic/error.hpp"
#include "dyadic/integrator.hpp"

using namespace dyadic;

namespace {

// Piecewise-linear trajectory through the given samples.
Trajectory polyline(const std::vector<double>& t, const std::vector<std::vector<double>>& y) {
  Trajectory traj(VariableKind::a, y[0].size());
  traj.start(t[0], y[0]);
  std::vector<double> poly(y[0].size() * kDenseCoefficients);
  for (std::size_t i = 1; i < t.size(); ++i) {
    for (std::size_t j = 0; j < y[0].size(); ++j) {
      const auto p = linear_poly(y[i - 1][j], y[i][j]);
      std::copy(p.begin(), p.end(), poly.begin() + j * kDenseCoefficients);
    }
    traj.append(t[i], y[i], poly);
  }
  return traj;
}

std::vector<double> random_state(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(n + 1, 0.0);
  for (int j = 1; j <= n; ++j) a[j] = u(rng) * std::pow(2.0, -0.5 * j);
  return a;
}

}  // namespace

TEST_CASE("sup_theta_norm") {
  CHECK(sup_theta_norm(ShellState::zeros(5), 0.6) == 0.0);
  std::vector<double> a(21, 0.0);
  for (int j = 1; j <= 20; ++j) a[j] = std::pow(2.0, -j);
  CHECK(sup_theta_norm(ShellState(0, a), 0.6) == doctest::Approx(std::pow(2.0, -0.4)).epsilon(1e-14));
  CHECK(sup_theta_norm(ShellState(0, a), 0.6) == doctest::Approx(0.757858).epsilon(1e-6));
  CHECK(sup_theta_norm(ShellState(0, {0, 0, 0, 0, 0, 1}), 0.6) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(sup_theta_norm(ShellState(0, {0, 0, -1}), 0.6) == doctest::Approx(std::pow(4.0, 0.6)));

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ShellState x(0, random_state(rng, 9));
    CHECK(sup_theta_norm(rescale(x, {3.5}), 0.6) == doctest::Approx(3.5 * sup_theta_norm(x, 0.6)));
  }
}

TEST_CASE("sobolev_norm") {
  CHECK(sobolev_norm(ShellState(0, {0, 3, 4}), 0.0) == doctest::Approx(5.0));
  CHECK(sobolev_norm(ShellState(0, {0, 0, 1}), 0.5) == doctest::Approx(2.0));
}

TEST_CASE("flux") {
  CHECK(flux(ShellState(0, {0, 1, 1, 0, 0}), 3) == 0.0);
  CHECK(flux(ShellState(0, {0, 0, 1, 1, 0}), 2) == doctest::Approx(32.0).epsilon(1e-14));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) CHECK(flux(ShellState(0, random_state(rng, 8)), 4) >= 0.0);
  CHECK_THROWS_AS(flux(ShellState(0, {0, 1, 1, 1}), 0), RangeError);
  CHECK_THROWS_AS(flux(ShellState(0, {0, 1, 1, 1}), 3), RangeError);
}

TEST_CASE("diagnostics records") {
  DiagnosticsOptions o;
  o.sobolev_exponents = {0.0, 1.0};
  o.flux_shells = {1, 2};
  const auto r = diagnostics_record(ShellState(0.5, {0, 1, 1, 0.5}), o);
  CHECK(r.t == 0.5);
  CHECK(r.energy == doctest::Approx(2.25));
  CHECK(r.sobolev.size() == 2);
  CHECK(r.flux.size() == 2);
  CHECK(r.flux[0] == doctest::Approx(std::pow(2.0, 2.5)));
  CHECK(r.sup_theta == doctest::Approx(std::max({std::pow(2.0, 0.6), std::pow(4.0, 0.6), 0.5 * std::pow(8.0, 0.6)})));
}

TEST_CASE("integrals along a trajectory") {
  // a_1 from 0 to 2 linearly over [0, 2]: int a_1^2 = 8/3
  const auto traj = polyline({0, 1, 2}, {{0, 0}, {0, 1}, {0, 2}});
  const auto cum = cumulative_integral(traj, [](std::span<const double> y) { return y[1] * y[1]; });
  CHECK(cum[0] == 0.0);
  CHECK(cum[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(cum[2] == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
  Trajectory lonely(VariableKind::a, 2);
  lonely.start(0, std::vector<double>{0, 1});
  CHECK_THROWS_AS(cumulative_integral(lonely, [](std::span<const double>) { return 1.0; }), DiagnosticsError);
}

TEST_CASE("energy balance residual") {
  const ModelParams p;
  const auto zero = integrate(ShellSystem::galerkin_flux(p, {8, 0.6}), ShellState::zeros(8), {0, 1}, {});
  CHECK(energy_balance_residual(zero, 3) == 0.0);

  std::vector<double> a(9, 0.0);
  for (int j = 1; j <= 8; ++j) a[j] = std::pow(2.0, -0.7 * j);
  IntegratorConfig c;
  c.rel_tol = 1e-10;
  const auto traj = integrate(ShellSystem::galerkin_flux(p, {8, 0.6}), ShellState(0, a), {0, 1}, c);
  const double budget = 10 * c.rel_tol * energy(a) * 1.0;
  for (int J : {1, 3, 5, 7}) CHECK(energy_balance_residual(traj, J) <= budget);
  CHECK_THROWS_AS(energy_balance_residual(traj, 8), DiagnosticsError);
}

TEST_CASE("galerkin drain equals the energy loss") {
  const ModelParams p;
  const GalerkinSpec spec{10, 0.6};
  std::vector<double> a(11, 0.0);
  for (int j = 1; j <= 10; ++j) a[j] = std::pow(2.0, -0.7 * j);
  IntegratorConfig c;
  c.rel_tol = 1e-10;
  const auto traj = integrate(ShellSystem::galerkin_flux(p, spec), ShellState(0, a), {0, 1}, c);
  const double lost = energy(traj.values(0)) - energy(traj.values(traj.size() - 1));
  CHECK(lost > 0.0);
  CHECK(galerkin_drain(traj, spec) == doctest::Approx(lost).epsilon(1e-6));
}

TEST_CASE("onsager_integral") {
  const auto zero = polyline({0, 1}, {{0, 0, 0}, {0, 0, 0}});
  CHECK(onsager_integral(zero, 1) == 0.0);
  for (int j = 1; j <= 6; ++j) {
    std::vector<double> a(7, 0.0);
    a[j] = std::pow(2.0, -5.0 * j / 6.0);
    const auto traj = polyline({0, 0.5, 1}, {a, a, a});
    CHECK(onsager_integral(traj, j) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("onsager integral obeys the sup-norm bound") {
  const ModelParams p;
  std::vector<double> a(13, 0.0);
  for (int j = 1; j <= 12; ++j) a[j] = 0.2 * std::pow(2.0, -0.6 * j);
  IntegratorConfig c;
  c.scheme = Scheme::linearly_implicit;
  const auto traj = integrate(ShellSystem::galerkin_flux(p, {12, 0.6}), ShellState(0, a), {0, 1}, c);
  double M = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) M = std::max(M, sup_theta_norm(traj.sample(i), 0.6));
  for (int j = 1; j <= 12; ++j) CHECK(onsager_integral(traj, j) <= M * M * M * std::pow(2.0, 0.7 * j) * (1 + 1e-9));
}

TEST_CASE("distances") {
  const ShellState x(0, {0, 1, 0.5}), y(0, {0, 1, 0.5});
  CHECK(distances(x, y).strong == 0.0);
  CHECK(distances(x, y).weak == 0.0);
  const auto d = distances(ShellState(0, {0, 1}), ShellState::zeros(1));
  CHECK(d.strong == doctest::Approx(1.0));
  CHECK(d.weak == doctest::Approx(0.25));
  // zero padding
  CHECK(distances(ShellState(0, {0, 1, 0, 0}), ShellState(0, {0, 1})).weak == 0.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double bound = 0.0;
  for (int j = 1; j <= 12; ++j) bound += std::pow(2.0, -j * j);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(13, 0.0), b(13, 0.0), c(13, 0.0);
    for (int j = 1; j <= 12; ++j) {
      a[j] = u(rng);
      b[j] = u(rng);
      c[j] = u(rng);
    }
    const ShellState A(0, a), B(0, b), C(0, c);
    CHECK(distances(A, B).weak == distances(B, A).weak);
    CHECK(distances(A, B).weak < bound);
    CHECK(bound < 1.2);
    CHECK(distances(A, C).weak <= distances(A, B).weak + distances(B, C).weak + 1e-15);
    CHECK(distances(A, C).strong <= distances(A, B).strong + distances(B, C).strong + 1e-12);
    CHECK(distances(A, B).weak > 0.0);
  }
}

TEST_CASE("power law fits") {
  std::vector<double> t, v, flat;
  for (int i = 0; i < 50; ++i) {
    t.push_back(std::pow(50.0, i / 49.0));
    v.push_back(2.5 * std::pow(t.back(), -1.0 / 3.0));
    flat.push_back(0.7);
  }
  const auto fit = fit_power_law(t, v, {1, 50});
  CHECK(fit.slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
  CHECK(std::abs(fit.slope + 1.0 / 3.0) < 1e-10);
  CHECK(fit.intercept == doctest::Approx(std::log(2.5)));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.samples == 50);
  const auto level = fit_power_law(t, flat, {1, 50});
  CHECK(std::abs(level.slope) < 1e-12);
  CHECK(level.r_squared >= 0.0);
  CHECK(level.r_squared <= 1.0);

  v[10] = 0.0;
  CHECK_THROWS_AS(fit_power_law(t, v, {1, 50}), FitError);
  CHECK_THROWS_AS(fit_power_law(t, flat, {5, 5}), FitError);
}

TEST_CASE("decay_fit on a synthetic power law") {
  // a_1(t) is t^(-1/3) sampled densely; the piecewise-linear dense output is
  // exact at nodes, so the stored sampling reproduces the exponent.
  std::vector<double> t;
  std::vector<std::vector<double>> y;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.5 * std::pow(120.0, i / 400.0));
    y.push_back({0, std::pow(t.back(), -1.0 / 3.0), 0});
  }
  const auto traj = polyline(t, y);
  const auto fit = decay_fit(traj, 0.6, {1, 50}, 2.0, FitSampling::stored);
  CHECK(std::abs(fit.slope + 1.0 / 3.0) < 1e-10);
  CHECK(fit.r_squared == doctest::Approx(1.0));
  const auto geo = decay_fit(traj, 0.6, {1, 50});
  CHECK(std::abs(geo.slope + 1.0 / 3.0) < 1e-4);
  CHECK(geo.samples == 128);
  CHECK_THROWS(decay_fit(traj, 0.6, {1, 100}));
}
