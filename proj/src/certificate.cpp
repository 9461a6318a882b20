#include "dyadic/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/core.hpp"
#include "dyadic/error.hpp"
#include "dyadic/quadrature.hpp"

namespace dyadic {

namespace {

struct Rates {
  double gamma;  // lambda^(5/2 - 3 theta)
  double fast;   // lambda^(5/2 - theta)
};

Rates rates(double theta, double lambda) {
  return {std::pow(lambda, kCascadeExponent - 3.0 * theta), std::pow(lambda, kCascadeExponent - theta)};
}

// x^2/gamma - 2x/(r gamma^2) + 2/(r^2 gamma^3), the antiderivative bracket of
// the twice-integrated-by-parts Gronwall integral.
double bracket(double x, const Rates& r) {
  const double g = r.gamma;
  return x * x / g - 2.0 * x / (r.fast * g * g) + 2.0 / (r.fast * r.fast * g * g * g);
}

void check_k(double k) {
  if (!(k > 0.0) || !(k < 1.0)) throw DomainError("k must lie in (0, 1)");
}

}  // namespace

void CertificateParams::validate() const {
  check_k(k);
  if (!(theta > 0.0)) throw ConfigurationError("certificate theta must be > 0");
  if (!(lambda > 1.0)) throw ConfigurationError("certificate lambda must be > 1");
  if (delta && !(*delta > 0.0 && *delta < k)) throw ConfigurationError("certificate delta must satisfy 0 < delta < k");
  if (!(margin > 0.0 && margin < 1.0)) throw ConfigurationError("certificate margin must lie in (0, 1)");
  if (!(quad_tol > 0.0)) throw ConfigurationError("certificate quad_tol must be > 0");
  if (!(T_check > 0.0)) throw ConfigurationError("certificate T_check must be > 0");
  if (grid_points < 3) throw ConfigurationError("certificate grid needs at least 3 points");
  if (!(fallback_slack >= 0.0)) throw ConfigurationError("certificate fallback_slack must be >= 0");
}

double EnvelopeBounds::gamma() const { return std::pow(lambda, kCascadeExponent - 3.0 * theta); }
double EnvelopeBounds::fast_rate() const { return std::pow(lambda, kCascadeExponent - theta); }

double B_of_delta(double delta, double k, double theta, double lambda) {
  check_k(k);
  if (!(delta >= 0.0) || !(delta < k)) throw DomainError("B(delta) requires 0 <= delta < k");
  const Rates r = rates(theta, lambda);
  return bracket(k, r) - std::exp(-r.fast * r.gamma * (k - delta)) * bracket(delta, r);
}

double B_limit(double k, double theta, double lambda) { return B_of_delta(0.0, k, theta, lambda); }

double B_of_delta_quadrature(double delta, double k, double theta, double lambda, double abs_tol) {
  check_k(k);
  if (!(delta >= 0.0) || !(delta < k)) throw DomainError("B(delta) requires 0 <= delta < k");
  const Rates r = rates(theta, lambda);
  auto integrand = [&](double s) { return std::exp(-r.fast * r.gamma * (0.0 - s)) * r.fast * (k + s) * (k + s); };
  return integrate_adaptive(integrand, -k + delta, 0.0, abs_tol).value;
}

DeltaSearch find_delta(double k, double theta, double B_target, double lambda) {
  DeltaSearch out;
  out.B_target = B_target;
  out.B_limit = B_limit(k, theta, lambda);
  if (out.B_limit < B_target) {
    out.feasible = false;
    out.delta_star = 0.0;
    out.B_at_delta_star = out.B_limit;
    return out;
  }
  double lo = 0.0, hi = k;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (B_of_delta(mid, k, theta, lambda) >= B_target) lo = mid;
    else hi = mid;
  }
  out.feasible = true;
  out.delta_star = lo;
  out.B_at_delta_star = B_of_delta(lo, k, theta, lambda);
  return out;
}

Envelope envelope_bounds(double t, const EnvelopeBounds& env) {
  if (t < env.t0) throw DomainError("envelope bounds require t >= t0");
  const double tau = t - env.t0;
  const double g = env.gamma();
  const double r = env.fast_rate();
  const double kg = env.k * g;
  Envelope e;
  e.b_hat = std::exp(-kg / r * tau) * (1.0 - 1.0 / kg) + 1.0 / kg;
  e.b_tilde = std::exp(-r * g * tau) * (env.B - env.k * env.k / g) + env.k * env.k / g;
  return e;
}

namespace {

QuadratureResult beta_parts(double t, const EnvelopeBounds& env, double abs_tol, double& first) {
  if (t < env.t0) throw DomainError("beta requires t >= t0");
  const double tau = t - env.t0;
  const double g = env.gamma();
  const double r = env.fast_rate();
  const double k2 = env.k * env.k;
  const double amp = (env.B - k2 / g) / r;
  const double decay_t = std::exp(-r * g * tau);
  first = env.k * std::exp(amp * (decay_t - 1.0) - k2 * tau);
  if (tau == 0.0) return {};
  auto integrand = [&](double sigma) {
    const double bh = envelope_bounds(env.t0 + sigma, env).b_hat;
    return std::exp(amp * (decay_t - std::exp(-r * g * sigma)) - k2 * (tau - sigma)) * bh * bh;
  };
  return integrate_adaptive(integrand, 0.0, tau, abs_tol);
}

struct BoundTerm {
  double coeff;
  double rate;
};

std::array<BoundTerm, 5> beta_prime_terms(const EnvelopeBounds& env) {
  const double g = env.gamma();
  const double r = env.fast_rate();
  const double kg = env.k * g;
  const double slow = kg / r;
  const double k2 = env.k * env.k;
  const double inv = 1.0 / kg;
  const double tail = inv * inv * (1.0 - env.B * g / k2);
  return {BoundTerm{(1.0 - inv) * (1.0 - inv), 2.0 * slow}, BoundTerm{2.0 * inv * (1.0 - inv), slow},
          BoundTerm{inv * inv, k2}, BoundTerm{tail, r * g}, BoundTerm{-tail, r * g + k2}};
}

}  // namespace

double beta_eval(double t, const EnvelopeBounds& env, double abs_tol) {
  double first = 0.0;
  const QuadratureResult q = beta_parts(t, env, abs_tol, first);
  return first + q.value;
}

double beta_prime_bound(double t, const EnvelopeBounds& env) {
  const double tau = t - env.t0;
  double sum = 0.0;
  for (const BoundTerm& term : beta_prime_terms(env)) sum += term.coeff * std::exp(-term.rate * tau);
  return sum;
}

double beta_prime_positive_bound(double t, const EnvelopeBounds& env) {
  const double tau = t - env.t0;
  double sum = 0.0;
  for (const BoundTerm& term : beta_prime_terms(env))
    if (term.coeff > 0.0) sum += term.coeff * std::exp(-term.rate * tau);
  return sum;
}

double beta_prime_tail(double T, const EnvelopeBounds& env) {
  if (T < env.t0) throw DomainError("tail bound requires T >= t0");
  const double tau = T - env.t0;
  double sum = 0.0;
  for (const BoundTerm& term : beta_prime_terms(env)) {
    if (term.coeff <= 0.0) continue;
    if (!(term.rate > 0.0)) return std::numeric_limits<double>::infinity();
    sum += term.coeff * std::exp(-term.rate * tau) / term.rate;
  }
  return sum;
}

CertificateReport verify_certificate(const CertificateParams& params) {
  params.validate();
  CertificateReport rep;
  rep.params = params;
  rep.quad_tol = params.quad_tol;
  rep.B_limit = B_limit(params.k, params.theta, params.lambda);
  rep.B_limit_quadrature = B_of_delta_quadrature(0.0, params.k, params.theta, params.lambda);

  double B_used = 0.0;
  if (params.delta) {
    rep.target_feasible = B_of_delta(*params.delta, params.k, params.theta, params.lambda) >= params.B_target;
    rep.delta_star = *params.delta;
    rep.B_at_delta_star = B_of_delta(*params.delta, params.k, params.theta, params.lambda);
    B_used = rep.B_at_delta_star;
    rep.B_target_used = B_used;
  } else {
    DeltaSearch search = find_delta(params.k, params.theta, params.B_target, params.lambda);
    rep.target_feasible = search.feasible;
    rep.B_target_used = params.B_target;
    if (!search.feasible) {
      rep.B_target_used = rep.B_limit - params.fallback_slack;
      search = find_delta(params.k, params.theta, rep.B_target_used, params.lambda);
    }
    rep.delta_star = search.delta_star;
    rep.B_at_delta_star = search.B_at_delta_star;
    B_used = rep.B_target_used;
  }

  const EnvelopeBounds env{params.k, params.theta, params.lambda, B_used, params.t0};

  // t0, then log-spaced from T_check * 1e-4 to T_check
  const std::size_t m = params.grid_points;
  rep.beta_times.resize(m);
  rep.beta_times[0] = params.t0;
  const double first = params.T_check * 1e-4;
  const double ratio = std::log(params.T_check / first) / static_cast<double>(m - 2);
  for (std::size_t i = 1; i < m; ++i) {
    rep.beta_times[i] =
        params.t0 + (i + 1 == m ? params.T_check : first * std::exp(ratio * static_cast<double>(i - 1)));
  }
  rep.beta_values.resize(m);
  rep.sup_beta = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    double head = 0.0;
    const QuadratureResult q = beta_parts(rep.beta_times[i], env, params.quad_tol, head);
    rep.beta_values[i] = head + q.value;
    rep.max_quadrature_intervals = std::max(rep.max_quadrature_intervals, q.intervals);
    if (rep.beta_values[i] > rep.sup_beta) {
      rep.sup_beta = rep.beta_values[i];
      rep.sup_beta_time = rep.beta_times[i];
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double inc =
        beta_prime_positive_bound(rep.beta_times[i], env) * (rep.beta_times[i + 1] - rep.beta_times[i]);
    rep.max_grid_increment = std::max(rep.max_grid_increment, inc);
  }
  rep.beta_at_T_check = rep.beta_values.back();
  rep.tail_bound = beta_prime_tail(params.t0 + params.T_check, env);

  if (!(rep.sup_beta <= 1.0 - params.margin)) rep.failing_conditions.push_back("sup_beta > 1 - margin");
  if (!(rep.max_grid_increment < params.margin / 2.0))
    rep.failing_conditions.push_back("grid too coarse for beta' bound");
  if (!(rep.beta_at_T_check + rep.tail_bound < 1.0))
    rep.failing_conditions.push_back("beta(T_check) + tail >= 1");
  rep.verdict = rep.failing_conditions.empty();
  return rep;
}

FrozenBoundarySurrogate::FrozenBoundarySurrogate(double theta, double lambda)
    : gamma_(std::pow(lambda, kCascadeExponent - 3.0 * theta)), fast_(std::pow(lambda, kCascadeExponent - theta)) {}

void FrozenBoundarySurrogate::derivative(std::span<const double> y, std::span<double> dy) const {
  dy[0] = 0.0;
  dy[1] = (1.0 - gamma_ * y[1] * y[2]) / fast_;
  dy[2] = y[1] * y[1] - gamma_ * y[2] * y[3];
  dy[3] = fast_ * (y[2] * y[2] - gamma_ * y[3]);
}

void FrozenBoundarySurrogate::jacobian(std::span<const double> y, std::span<double> jac) const {
  std::fill(jac.begin(), jac.end(), 0.0);
  jac[1 * 4 + 1] = -gamma_ * y[2] / fast_;
  jac[1 * 4 + 2] = -gamma_ * y[1] / fast_;
  jac[2 * 4 + 1] = 2.0 * y[1];
  jac[2 * 4 + 2] = -gamma_ * y[3];
  jac[2 * 4 + 3] = -gamma_ * y[2];
  jac[3 * 4 + 2] = 2.0 * fast_ * y[2];
  jac[3 * 4 + 3] = -fast_ * gamma_;
}

AdversarialResult adversarial_simulation(const CertificateParams& params, double B,
                                         std::optional<std::array<double, 3>> initial,
                                         const IntegratorConfig& config) {
  params.validate();
  const std::array<double, 3> start = initial.value_or(std::array<double, 3>{1.0, params.k, B});
  const FrozenBoundarySurrogate sys(params.theta, params.lambda);
  const ShellState y0(params.t0, {0.0, start[0], start[1], start[2]}, VariableKind::b);
  const Watch exit_watch{2, params.k};
  AdversarialResult out;
  out.trajectory = integrate(sys, y0, {params.t0, params.t0 + params.T_check}, config, std::span(&exit_watch, 1));
  const Trajectory& traj = out.trajectory;

  out.hypothesis_end = traj.end_time();
  for (const CrossingEvent& ev : traj.events()) {
    if (ev.direction != CrossingDirection::upward) {
      out.hypothesis_end = ev.time;
      break;
    }
  }
  const EnvelopeBounds env{params.k, params.theta, params.lambda, B, params.t0};
  bool inside = true;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    const auto b = traj.values(i);
    out.sup_b_n = std::max(out.sup_b_n, b[2]);
    if (b[2] < params.k || t > out.hypothesis_end) {
      if (inside && t < out.hypothesis_end) out.hypothesis_end = t;
      inside = false;
    }
    const Envelope e = envelope_bounds(t, env);
    const double over_beta = b[2] - beta_eval(t, env, params.quad_tol);
    const double over_hat = b[1] - e.b_hat;
    const double under_tilde = e.b_tilde - b[3];
    if (i == 0) {
      out.max_excess_over_beta = out.max_excess_over_beta_all = over_beta;
      out.max_excess_over_b_hat = out.max_excess_over_b_hat_all = over_hat;
      out.max_deficit_below_b_tilde = out.max_deficit_below_b_tilde_all = under_tilde;
      continue;
    }
    out.max_excess_over_beta_all = std::max(out.max_excess_over_beta_all, over_beta);
    out.max_excess_over_b_hat_all = std::max(out.max_excess_over_b_hat_all, over_hat);
    out.max_deficit_below_b_tilde_all = std::max(out.max_deficit_below_b_tilde_all, under_tilde);
    if (inside) {
      out.max_excess_over_beta = std::max(out.max_excess_over_beta, over_beta);
      out.max_excess_over_b_hat = std::max(out.max_excess_over_b_hat, over_hat);
      out.max_deficit_below_b_tilde = std::max(out.max_deficit_below_b_tilde, under_tilde);
    }
  }
  return out;
}

}  // namespace dyadic
