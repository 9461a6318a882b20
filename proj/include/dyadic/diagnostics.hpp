#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dyadic/core.hpp"
#include "dyadic/trajectory.hpp"

namespace dyadic {

/// max_j lambda_j^theta |a_j| over shells 1..N.
double sup_theta_norm(const ShellState& state, double theta, double lambda = 2.0);

/// (sum_j lambda_j^(2s) a_j^2)^(1/2)
double sobolev_norm(const ShellState& state, double s, double lambda = 2.0);

/// Energy flux through shell J, lambda_J^(5/2) a_J^2 a_{J+1}. Requires 1 <= J < N.
double flux(const ShellState& state, int shell, double lambda = 2.0);

struct DiagnosticsOptions {
  double theta = 0.6;
  double lambda = 2.0;
  std::vector<double> sobolev_exponents;
  std::vector<int> flux_shells;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;
  double sup_theta = 0.0;
  std::vector<double> sobolev;
  std::vector<double> flux;
};

DiagnosticsRecord diagnostics_record(const ShellState& state, const DiagnosticsOptions& options);
/// One record per stored sample.
std::vector<DiagnosticsRecord> diagnostics_rows(const Trajectory& trajectory, const DiagnosticsOptions& options);

/// Running integral of f(state(t)) over the dense output, one value per
/// stored sample (the first is 0). Each step uses composite Simpson doubling
/// to rel_tol.
std::vector<double> cumulative_integral(const Trajectory& trajectory,
                                        const std::function<double(std::span<const double>)>& integrand,
                                        double rel_tol = 1e-8);

double integrate_along(const Trajectory& trajectory,
                       const std::function<double(std::span<const double>)>& integrand, double rel_tol = 1e-8);

/// max over samples of |1/2 sum_{j<=J} a_j^2(t) - 1/2 sum_{j<=J} a_j^2(0) + int_0^t Pi_J|.
double energy_balance_residual(const Trajectory& trajectory, int shell, double lambda = 2.0);

/// int (lambda_j^(5/6) a_j)^3 dt over the trajectory span.
double onsager_integral(const Trajectory& trajectory, int shell, double lambda = 2.0);

/// Energy removed by the Galerkin damping: int 2 D a_n^2 dt.
double galerkin_drain(const Trajectory& trajectory, const GalerkinSpec& spec, double lambda = 2.0);

struct Distances {
  double strong = 0.0;
  double weak = 0.0;
};

/// d_S = |x - y|, d_W = sum_j lambda^(-j^2) |x_j - y_j| / (1 + |x_j - y_j|).
/// The shorter state is zero-padded.
Distances distances(const ShellState& x, const ShellState& y, double lambda = 2.0);

struct FitWindow {
  double start = 1.0;
  double end = 50.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  std::size_t samples = 0;
};

/// Least squares log(v) = intercept + slope log(t) over points inside window.
FitResult fit_power_law(std::span<const double> t, std::span<const double> v, FitWindow window);

enum class FitSampling { geometric, stored };

/// Power-law fit of sup_theta_norm(t). geometric draws `samples` log-spaced
/// times from the dense output; stored uses the trajectory nodes in the window.
FitResult decay_fit(const Trajectory& trajectory, double theta, FitWindow window = {}, double lambda = 2.0,
                    FitSampling sampling = FitSampling::geometric, std::size_t samples = 128);

}  // namespace dyadic
