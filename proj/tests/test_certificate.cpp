#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dyadic/certificate.hpp"
#include "dyadic/error.hpp"
#include "dyadic/quadrature.hpp"

using namespace dyadic;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// The un-integrated Gronwall integral behind B(delta).
double B_oracle(double delta, double k, double theta) {
  const double g = std::pow(2.0, 2.5 - 3 * theta), r = std::pow(2.0, 2.5 - theta);
  return simpson([&](double s) { return std::exp(-r * g * (-s)) * r * (k + s) * (k + s); }, -k + delta, 0.0);
}

// beta(t) by brute-force Simpson, for the defaults of EnvelopeBounds.
double beta_oracle(double t, const EnvelopeBounds& e) {
  const double g = e.gamma(), r = e.fast_rate(), k = e.k;
  const double A = (e.B - k * k / g) / r;
  auto bh = [&](double s) { return std::exp(-k * g / r * s) * (1 - 1 / (k * g)) + 1 / (k * g); };
  const double head = k * std::exp(A * (std::exp(-r * g * t) - 1) - k * k * t);
  return head + simpson(
                    [&](double s) {
                      return std::exp(A * (std::exp(-r * g * t) - std::exp(-r * g * s)) - k * k * (t - s)) * bh(s) *
                             bh(s);
                    },
                    0.0, t);
}

const double kDefaultLimit = B_limit(0.96, 0.6);

}  // namespace

TEST_CASE("quadrature") {
  const auto q = integrate_adaptive([](double x) { return std::exp(-x) * std::sin(3 * x); }, 0.0, 4.0, 1e-13);
  const double exact = (3.0 - std::exp(-4.0) * (std::sin(12.0) + 3 * std::cos(12.0))) / 10.0;
  CHECK(std::abs(q.value - exact) < 1e-12);
  CHECK(q.intervals >= 1);
  CHECK(integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0, 1e-12).value == 0.0);
  CHECK(std::abs(integrate_simpson([](double x) { return x * x * x * x; }, 0.0, 1.0, 1e-12) - 0.2) < 1e-11);
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, 1e-15, 20),
                  QuadratureError);
}

TEST_CASE("B(delta) closed form against the integral") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double k = 0.05 + 0.94 * u(rng);
    const double delta = k * u(rng) * 0.999;
    const double theta = 0.5 + 0.3 * u(rng);
    const double closed = B_of_delta(delta, k, theta);
    CHECK(std::abs(closed - B_oracle(delta, k, theta)) < 1e-8);
    CHECK(std::abs(closed - B_of_delta_quadrature(delta, k, theta)) < 1e-8);
  }
}

TEST_CASE("B near the limit") {
  const double k = 0.96, theta = 0.6;
  const double g = std::pow(2.0, 0.7), r = std::pow(2.0, 1.9);
  const double bracket = k * k / g - 2 * k / (r * g * g) + 2 / (r * r * g * g * g);
  CHECK(kDefaultLimit == doctest::Approx(bracket - 2 * std::exp(-r * g * k) / (r * r * g * g * g)).epsilon(1e-14));
  CHECK(std::abs(B_of_delta(1e-8, k, theta) - kDefaultLimit) < 1e-6);
  CHECK(std::abs(kDefaultLimit - B_oracle(0.0, k, theta)) < 1e-10);
  // the claimed 0.447 is out of reach at these parameters
  CHECK(kDefaultLimit == doctest::Approx(0.4057643324).epsilon(1e-9));
  CHECK(kDefaultLimit < 0.447);
  for (double d = 0.0; d + 0.01 < k; d += 0.01) CHECK(B_of_delta(d + 0.01, k, theta) <= B_of_delta(d, k, theta));
  CHECK_THROWS_AS(B_of_delta(k, k, theta), DomainError);
  CHECK_THROWS_AS(B_of_delta(-0.1, k, theta), DomainError);
}

TEST_CASE("find_delta") {
  const auto any = find_delta(0.96, 0.6, 0.0);
  CHECK(any.feasible);
  CHECK(any.delta_star == doctest::Approx(0.96).epsilon(1e-9));

  const auto high = find_delta(0.96, 0.6, kDefaultLimit + 0.1);
  CHECK_FALSE(high.feasible);
  CHECK(high.B_limit == kDefaultLimit);

  const auto claimed = find_delta(0.96, 0.6, 0.447);
  CHECK_FALSE(claimed.feasible);

  const double target = kDefaultLimit - 1e-3;
  const auto s = find_delta(0.96, 0.6, target);
  CHECK(s.feasible);
  CHECK(s.B_at_delta_star >= target);
  CHECK(B_of_delta(s.delta_star + 2e-10, 0.96, 0.6) < target);
  CHECK(s.delta_star > 0.3);
  CHECK(s.delta_star < 0.4);
}

TEST_CASE("envelope bounds") {
  const EnvelopeBounds env{0.96, 0.6, 2.0, 0.447, 0.0};
  const auto e0 = envelope_bounds(0.0, env);
  CHECK(e0.b_hat == 1.0);
  CHECK(e0.b_tilde == 0.447);
  const double kg = 0.96 * env.gamma();
  CHECK(kg == doctest::Approx(1.5595).epsilon(1e-4));
  const auto inf = envelope_bounds(400.0, env);
  CHECK(inf.b_hat == doctest::Approx(1 / kg).epsilon(1e-12));
  CHECK(inf.b_hat == doctest::Approx(0.6412).epsilon(1e-4));
  CHECK(inf.b_tilde == doctest::Approx(0.96 * 0.96 / env.gamma()).epsilon(1e-12));
  CHECK(inf.b_tilde == doctest::Approx(0.5673).epsilon(1e-4));
  double prev = 2.0;
  for (double t = 0.0; t < 20.0; t += 0.25) {
    const auto e = envelope_bounds(t, env);
    CHECK(e.b_hat <= prev);
    prev = e.b_hat;
  }
  // with k gamma < 1 the envelope increases instead
  const EnvelopeBounds low{0.5, 0.6, 2.0, 0.2, 0.0};
  CHECK(envelope_bounds(1.0, low).b_hat > 1.0);
  CHECK_THROWS_AS(envelope_bounds(-1e-3, env), DomainError);
  const EnvelopeBounds shifted{0.96, 0.6, 2.0, 0.447, 3.0};
  CHECK(envelope_bounds(3.0, shifted).b_hat == 1.0);
  CHECK(envelope_bounds(4.0, shifted).b_tilde == envelope_bounds(1.0, env).b_tilde);
}

TEST_CASE("beta") {
  const EnvelopeBounds env{0.96, 0.6, 2.0, kDefaultLimit - 1e-3, 0.0};
  CHECK(beta_eval(0.0, env) == 0.96);
  for (double t : {0.1, 0.4, 1.0, 3.0}) CHECK(std::abs(beta_eval(t, env, 1e-12) - beta_oracle(t, env)) < 1e-9);
  const double kg = 0.96 * env.gamma();
  CHECK(std::abs(beta_eval(50.0, env) - (1 / kg) * (1 / kg) / (0.96 * 0.96)) < 1e-6);
  for (double t : {0.05, 0.4, 2.0, 10.0}) CHECK(std::abs(beta_eval(t, env, 1e-10) - beta_eval(t, env, 1e-11)) < 1e-9);
  CHECK_THROWS_AS(beta_eval(-1.0, env), DomainError);
}

TEST_CASE("beta prime bound and tail") {
  const EnvelopeBounds env{0.96, 0.6, 2.0, kDefaultLimit - 1e-3, 0.0};
  const double g = env.gamma(), r = env.fast_rate(), k = 0.96;
  for (double rate : {2 * k * g / r, k * g / r, k * k, r * g}) CHECK(rate > 0.0);
  CHECK(k * g / r == doctest::Approx(0.418).epsilon(1e-3));

  CHECK(beta_prime_bound(0.0, env) == doctest::Approx(1.0).epsilon(1e-12));
  const double h0 = 1e-5;
  const double slope0 = (beta_eval(h0, env, 1e-14) - beta_eval(0.0, env)) / h0;
  CHECK(slope0 == doctest::Approx(1 - k * g * env.B).epsilon(1e-3));

  double prev = beta_prime_tail(0.0, env);
  for (double T = 0.5; T < 60; T += 0.5) {
    const double tail = beta_prime_tail(T, env);
    CHECK(tail < prev);
    prev = tail;
  }
  CHECK(beta_prime_tail(80.0, env) < 1e-12);

  for (double T : {0.0, 1.0, 5.0, 20.0}) {
    const double q = simpson([&](double t) { return beta_prime_positive_bound(t, env); }, T, T + 200, 200000);
    CHECK(std::abs(beta_prime_tail(T, env) - q) < 1e-8);
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double T = u(rng), h = 1e-4;
    const double slope = (beta_eval(T + h, env, 1e-13) - beta_eval(T - h, env, 1e-13)) / (2 * h);
    CHECK(slope <= beta_prime_bound(T, env) + 1e-6);
    CHECK(beta_prime_bound(T, env) <= beta_prime_positive_bound(T, env));
  }
}

TEST_CASE("verify_certificate") {
  CertificateParams p;
  p.grid_points = 512;
  const auto rep = verify_certificate(p);
  CHECK_FALSE(rep.target_feasible);
  CHECK(rep.B_limit == doctest::Approx(kDefaultLimit));
  CHECK(std::abs(rep.B_limit_quadrature - rep.B_limit) < 1e-10);
  CHECK(rep.B_target_used == doctest::Approx(kDefaultLimit - 1e-3));
  CHECK(rep.B_at_delta_star >= rep.B_target_used);
  CHECK(rep.beta_times.front() == 0.0);
  CHECK(rep.beta_times.back() == doctest::Approx(20.0));
  CHECK(rep.beta_values.front() == 0.96);
  CHECK(rep.beta_values.size() == 512);
  CHECK(rep.sup_beta > 1.0);
  CHECK_FALSE(rep.verdict);
  CHECK_FALSE(rep.failing_conditions.empty());
  CHECK(rep.beta_at_T_check + rep.tail_bound < 1.0);

  CertificateParams q = p;
  q.quad_tol = 1e-8;
  CHECK(verify_certificate(q).verdict == rep.verdict);
  q = p;
  q.grid_points = 2048;
  CHECK(verify_certificate(q).verdict == rep.verdict);

  q = p;
  q.margin = 0.05;  // exceeds 1 - k
  q.B_target = 0.1;
  const auto wide = verify_certificate(q);
  CHECK(wide.target_feasible);
  CHECK_FALSE(wide.verdict);

  q = p;
  q.delta = 0.2;
  const auto fixed = verify_certificate(q);
  CHECK(fixed.delta_star == 0.2);
  CHECK(fixed.B_at_delta_star == B_of_delta(0.2, 0.96, 0.6));

  q = p;
  q.margin = 1.0;
  CHECK_THROWS_AS(verify_certificate(q), ConfigurationError);
  q = p;
  q.delta = 0.97;
  CHECK_THROWS_AS(verify_certificate(q), ConfigurationError);
}

TEST_CASE("frozen boundary surrogate") {
  const FrozenBoundarySurrogate sys(0.6, 2.0);
  const std::vector<double> y{0, 0.7, 0.9, 0.4};
  std::vector<double> jac(16), fp(4), fm(4);
  sys.jacobian(y, jac);
  for (int k = 0; k < 4; ++k) {
    auto yp = y, ym = y;
    yp[k] += 1e-6;
    ym[k] -= 1e-6;
    sys.derivative(yp, fp);
    sys.derivative(ym, fm);
    for (int i = 0; i < 4; ++i) CHECK(jac[i * 4 + k] == doctest::Approx((fp[i] - fm[i]) / 2e-6).epsilon(1e-6));
  }
}

TEST_CASE("adversarial simulation") {
  CertificateParams p;
  IntegratorConfig tight;
  tight.rel_tol = 1e-11;
  tight.abs_tol = 1e-14;
  const double B = kDefaultLimit - 1e-3;

  const auto zero = adversarial_simulation(p, B, std::array<double, 3>{0, 0, 0}, tight);
  const auto& tz = zero.trajectory;
  CHECK(tz.values(tz.size() - 1)[1] > 0.1);
  for (std::size_t i = 0; i < tz.size(); ++i) CHECK(tz.values(i)[2] >= 0.0);

  const auto adv = adversarial_simulation(p, B, std::nullopt, tight);
  CHECK(adv.trajectory.values(0)[2] == 0.96);
  CHECK(adv.hypothesis_end > 0.5);
  CHECK(adv.hypothesis_end < 1.0);
  CHECK(adv.sup_b_n > 0.96);
  CHECK(adv.max_excess_over_beta <= 1e-6);
  CHECK(adv.max_excess_over_b_hat <= 1e-6);
  CHECK(adv.max_deficit_below_b_tilde <= 1e-6);
}
