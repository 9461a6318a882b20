#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/integrator.hpp"
#include "dyadic/ode_system.hpp"
#include "dyadic/trajectory.hpp"

namespace dyadic {

// Closed-form Gronwall bounds for the first shell to reach 1 in the
// pivot-rescaled variables, and a numerical check that the resulting
// envelope beta(t) stays below 1. All formulas use t0 = 0 internally; only
// t - t0 enters.

struct CertificateParams {
  double k = 0.96;
  double theta = 0.6;
  double lambda = 2.0;
  double B_target = 0.447;
  /// Initial-data bound. When unset the largest admissible delta is searched.
  std::optional<double> delta;
  double t0 = 0.0;
  double margin = 0.01;
  double T_check = 20.0;
  double quad_tol = 1e-10;
  std::size_t grid_points = 2048;
  /// If B_target exceeds B_limit the search is repeated with
  /// B_limit - fallback_slack.
  double fallback_slack = 1e-3;

  void validate() const;
};

/// Parameters of b_hat_{n-1}, b_tilde_{n+1} and beta.
struct EnvelopeBounds {
  double k = 0.96;
  double theta = 0.6;
  double lambda = 2.0;
  double B = 0.447;
  double t0 = 0.0;

  double gamma() const;
  /// lambda^(5/2 - theta)
  double fast_rate() const;
};

struct Envelope {
  double b_hat = 0.0;    // upper bound on b_{n-1}
  double b_tilde = 0.0;  // lower bound on b_{n+1}
};

/// Lower bound on b_{n+1}(t0) after integrating by parts twice. 0 <= delta < k.
double B_of_delta(double delta, double k, double theta, double lambda = 2.0);
/// delta -> 0 limit of B_of_delta.
double B_limit(double k, double theta, double lambda = 2.0);
/// The same bound as the un-integrated Gronwall integral
/// int_{-k+delta}^{0} exp(-lambda^(5/2-theta) gamma (-s)) lambda^(5/2-theta) (k+s)^2 ds.
double B_of_delta_quadrature(double delta, double k, double theta, double lambda = 2.0, double abs_tol = 1e-13);

struct DeltaSearch {
  bool feasible = false;
  double B_target = 0.0;
  double B_limit = 0.0;
  double delta_star = 0.0;
  double B_at_delta_star = 0.0;
};

/// Largest delta in [0, k) with B(delta) >= B_target, bisected to 1e-10.
/// B is nonincreasing in delta. Infeasible targets return feasible = false
/// with delta_star = 0 and the achievable B_limit.
DeltaSearch find_delta(double k, double theta, double B_target, double lambda = 2.0);

Envelope envelope_bounds(double t, const EnvelopeBounds& env);

/// beta(t), the Gronwall envelope of b_n, by adaptive quadrature to abs_tol.
double beta_eval(double t, const EnvelopeBounds& env, double abs_tol = 1e-10);

/// The five-term exponential upper bound on beta'(t).
double beta_prime_bound(double t, const EnvelopeBounds& env);
/// Sum of the terms of beta_prime_bound with positive coefficients; an upper
/// bound on beta'(t) that is nonincreasing in t.
double beta_prime_positive_bound(double t, const EnvelopeBounds& env);
/// int_T^infinity beta_prime_positive_bound, in closed form.
double beta_prime_tail(double T, const EnvelopeBounds& env);

struct CertificateReport {
  CertificateParams params;
  bool target_feasible = false;
  double B_target_used = 0.0;
  double delta_star = 0.0;
  double B_at_delta_star = 0.0;
  double B_limit = 0.0;
  double B_limit_quadrature = 0.0;
  std::vector<double> beta_times;
  std::vector<double> beta_values;
  double sup_beta = 0.0;
  double sup_beta_time = 0.0;
  double beta_at_T_check = 0.0;
  double tail_bound = 0.0;
  /// max over grid cells of beta_prime_positive_bound(t_i) (t_{i+1} - t_i)
  double max_grid_increment = 0.0;
  double quad_tol = 0.0;
  int max_quadrature_intervals = 0;
  bool verdict = false;
  std::vector<std::string> failing_conditions;
};

/// Samples beta on a grid over [t0, t0 + T_check] (t0, then log-spaced from
/// T_check * 1e-4). The verdict requires the sampled supremum <= 1 - margin,
/// every grid increment bound < margin / 2, and beta(T_check) + tail < 1.
CertificateReport verify_certificate(const CertificateParams& params);

/// Three-shell surrogate (b_{n-1}, b_n, b_{n+1}) with b_{n-2} = b_{n+2} = 1
/// frozen. State layout is [0, b_{n-1}, b_n, b_{n+1}].
class FrozenBoundarySurrogate final : public OdeSystem {
 public:
  FrozenBoundarySurrogate(double theta, double lambda);

  std::size_t dimension() const override { return 4; }
  void derivative(std::span<const double> y, std::span<double> dy) const override;
  void jacobian(std::span<const double> y, std::span<double> jac) const override;

 private:
  double gamma_;
  double fast_;
};

struct AdversarialResult {
  Trajectory trajectory;
  double sup_b_n = 0.0;
  /// First time after t0 at which b_n drops below k; the envelopes are only
  /// derived while b_n >= k. Equal to the horizon if it never does.
  double hypothesis_end = 0.0;
  // Worst violations at samples inside [t0, hypothesis_end]; <= 0 means dominated.
  double max_excess_over_beta = 0.0;
  double max_excess_over_b_hat = 0.0;
  double max_deficit_below_b_tilde = 0.0;
  // The same quantities over the whole horizon.
  double max_excess_over_beta_all = 0.0;
  double max_excess_over_b_hat_all = 0.0;
  double max_deficit_below_b_tilde_all = 0.0;
};

/// Integrates the surrogate over [0, T_check] from `initial` (defaults to
/// the worst case (1, k, B)) and compares it with the envelopes at B.
AdversarialResult adversarial_simulation(const CertificateParams& params, double B,
                                         std::optional<std::array<double, 3>> initial = std::nullopt,
                                         const IntegratorConfig& config = {});

}  // namespace dyadic
