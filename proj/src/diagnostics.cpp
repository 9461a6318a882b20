#include "dyadic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyadic/error.hpp"
#include "dyadic/quadrature.hpp"

namespace dyadic {

double sup_theta_norm(const ShellState& state, double theta, double lambda) {
  validate(state);
  double best = 0.0;
  for (int j = 1; j <= state.truncation(); ++j)
    best = std::max(best, std::pow(lambda, theta * j) * std::abs(state.coeffs[j]));
  return best;
}

double sobolev_norm(const ShellState& state, double s, double lambda) {
  validate(state);
  double sum = 0.0;
  for (int j = 1; j <= state.truncation(); ++j) {
    const double w = std::pow(lambda, s * j) * state.coeffs[j];
    sum += w * w;
  }
  return std::sqrt(sum);
}

double flux(const ShellState& state, int shell, double lambda) {
  if (shell < 1 || shell >= state.truncation())
    throw RangeError("flux shell " + std::to_string(shell) + " outside 1.." +
                     std::to_string(state.truncation() - 1));
  const double a = state.coeffs[shell];
  return std::pow(lambda, kCascadeExponent * shell) * a * a * state.coeffs[shell + 1];
}

DiagnosticsRecord diagnostics_record(const ShellState& state, const DiagnosticsOptions& options) {
  DiagnosticsRecord rec;
  rec.t = state.time;
  rec.energy = energy(state);
  rec.sup_theta = sup_theta_norm(state, options.theta, options.lambda);
  for (double s : options.sobolev_exponents) rec.sobolev.push_back(sobolev_norm(state, s, options.lambda));
  for (int j : options.flux_shells) rec.flux.push_back(flux(state, j, options.lambda));
  return rec;
}

std::vector<DiagnosticsRecord> diagnostics_rows(const Trajectory& trajectory, const DiagnosticsOptions& options) {
  std::vector<DiagnosticsRecord> rows;
  rows.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) rows.push_back(diagnostics_record(trajectory.sample(i), options));
  return rows;
}

std::vector<double> cumulative_integral(const Trajectory& trajectory,
                                        const std::function<double(std::span<const double>)>& integrand,
                                        double rel_tol) {
  if (trajectory.size() < 2) throw DiagnosticsError("trajectory needs at least two samples");
  std::vector<double> out(trajectory.size(), 0.0);
  std::vector<double> state(trajectory.dim());
  double running = 0.0;
  for (std::size_t k = 0; k < trajectory.segment_count(); ++k) {
    const SegmentView seg = trajectory.segment(k);
    auto f = [&](double t) {
      seg.values(t, state);
      return integrand(state);
    };
    running += integrate_simpson(f, seg.t0, seg.t1, rel_tol, 1e-300);
    out[k + 1] = running;
  }
  return out;
}

double integrate_along(const Trajectory& trajectory,
                       const std::function<double(std::span<const double>)>& integrand, double rel_tol) {
  return cumulative_integral(trajectory, integrand, rel_tol).back();
}

double energy_balance_residual(const Trajectory& trajectory, int shell, double lambda) {
  if (trajectory.size() < 2) throw DiagnosticsError("energy balance needs at least two samples");
  const int truncation = static_cast<int>(trajectory.dim()) - 1;
  if (shell < 0 || shell >= truncation)
    throw DiagnosticsError("energy balance shell " + std::to_string(shell) + " must lie below truncation " +
                           std::to_string(truncation));
  const auto J = static_cast<std::size_t>(shell);
  const double coeff = std::pow(lambda, kCascadeExponent * shell);
  const auto flux_integral = cumulative_integral(trajectory, [&](std::span<const double> a) {
    return coeff * a[J] * a[J] * a[J + 1];
  });
  auto partial = [&](std::size_t i) {
    const auto a = trajectory.values(i);
    double s = 0.0;
    for (std::size_t j = 0; j <= J; ++j) s += a[j] * a[j];
    return 0.5 * s;
  };
  const double e0 = partial(0);
  double worst = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i)
    worst = std::max(worst, std::abs(partial(i) - e0 + flux_integral[i]));
  return worst;
}

double onsager_integral(const Trajectory& trajectory, int shell, double lambda) {
  const int truncation = static_cast<int>(trajectory.dim()) - 1;
  if (shell < 1 || shell > truncation)
    throw RangeError("Onsager shell " + std::to_string(shell) + " outside 1.." + std::to_string(truncation));
  if (trajectory.size() < 2) return 0.0;
  const double w = std::pow(lambda, 5.0 / 6.0 * shell);
  const auto j = static_cast<std::size_t>(shell);
  return integrate_along(trajectory, [&](std::span<const double> a) {
    const double v = w * a[j];
    return v * v * v;
  });
}

double galerkin_drain(const Trajectory& trajectory, const GalerkinSpec& spec, double lambda) {
  spec.validate();
  if (static_cast<int>(trajectory.dim()) - 1 != spec.order)
    throw DiagnosticsError("trajectory truncation does not match Galerkin order");
  if (trajectory.size() < 2) return 0.0;
  const double d = spec.damping(lambda);
  const auto n = static_cast<std::size_t>(spec.order);
  return integrate_along(trajectory, [&](std::span<const double> a) { return 2.0 * d * a[n] * a[n]; });
}

Distances distances(const ShellState& x, const ShellState& y, double lambda) {
  const std::size_t n = std::max(x.coeffs.size(), y.coeffs.size());
  double strong = 0.0, weak = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = j < x.coeffs.size() ? x.coeffs[j] : 0.0;
    const double yj = j < y.coeffs.size() ? y.coeffs[j] : 0.0;
    const double d = std::abs(xj - yj);
    strong += d * d;
    const double jj = static_cast<double>(j);
    weak += std::pow(lambda, -jj * jj) * d / (1.0 + d);
  }
  return {std::sqrt(strong), weak};
}

FitResult fit_power_law(std::span<const double> t, std::span<const double> v, FitWindow window) {
  if (!(window.start < window.end)) throw FitError("fit window must satisfy start < end");
  if (!(window.start > 0.0)) throw FitError("fit window must start at t > 0");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.start || t[i] > window.end) continue;
    if (!(v[i] > 0.0)) throw FitError("nonpositive norm sample at t = " + std::to_string(t[i]));
    xs.push_back(std::log(t[i]));
    ys.push_back(std::log(v[i]));
  }
  if (xs.size() < 2) throw FitError("fewer than two samples inside the fit window");
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw FitError("fit abscissae are degenerate");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.window = window;
  fit.samples = xs.size();
  return fit;
}

FitResult decay_fit(const Trajectory& trajectory, double theta, FitWindow window, double lambda,
                    FitSampling sampling, std::size_t samples) {
  if (trajectory.empty()) throw FitError("empty trajectory");
  if (!(window.start < window.end)) throw FitError("fit window must satisfy start < end");
  if (window.start < trajectory.start_time() || window.end > trajectory.end_time())
    throw FitError("fit window lies outside the trajectory span");
  std::vector<double> ts, vs;
  if (sampling == FitSampling::stored) {
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      const double t = trajectory.time(i);
      if (t < window.start || t > window.end) continue;
      ts.push_back(t);
      vs.push_back(sup_theta_norm(trajectory.sample(i), theta, lambda));
    }
  } else {
    if (samples < 2) throw FitError("need at least two fit samples");
    const double ratio = std::log(window.end / window.start) / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = i + 1 == samples ? window.end : window.start * std::exp(ratio * static_cast<double>(i));
      ts.push_back(t);
      vs.push_back(sup_theta_norm(dense_sample(trajectory, t), theta, lambda));
    }
  }
  return fit_power_law(ts, vs, window);
}

}  // namespace dyadic
