#include "dyadic/harness/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>

#include "dyadic/certificate.hpp"
#include "dyadic/diagnostics.hpp"
#include "dyadic/error.hpp"
#include "dyadic/harness/initial_conditions.hpp"
#include "dyadic/harness/output.hpp"
#include "dyadic/integrator.hpp"

namespace dyadic::harness {

namespace fs = std::filesystem;

ShellSystem build_system(const RunConfig& config, int order) {
  if (config.closure == Closure::plain) return ShellSystem::dyadic(config.model, order);
  GalerkinSpec spec = config.galerkin;
  spec.order = order;
  return ShellSystem::galerkin_flux(config.model, spec);
}

std::size_t thread_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DYADIC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) cap = static_cast<std::size_t>(v);
  }
  return cap;
}

namespace {

ShellState truncated(const ShellState& state, int order) {
  ShellState out = state;
  out.coeffs.resize(static_cast<std::size_t>(order) + 1, 0.0);
  return out;
}

struct Ladder {
  std::vector<Trajectory> runs;
  std::vector<double> probes;
};

Ladder ladder_runs(const RunConfig& config, const std::vector<int>& orders) {
  if (orders.size() < 2) throw ConfigurationError("convergence study needs at least two orders");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 2) throw ConfigurationError("convergence orders must be >= 2");
    if (i > 0 && orders[i] <= orders[i - 1]) throw ConfigurationError("convergence orders must be increasing");
  }
  Ladder ladder;
  ladder.probes = config.convergence.probe_times;
  if (ladder.probes.empty()) throw ConfigurationError("convergence study needs probe times");
  for (double t : ladder.probes)
    if (!(t > config.t_span.start)) throw ConfigurationError("probe times must exceed t_start");
  const double horizon = *std::max_element(ladder.probes.begin(), ladder.probes.end());

  RunConfig largest = config;
  largest.galerkin.order = orders.back();
  ShellState y0 = initial_state(largest);
  y0.time = config.t_span.start;

  ladder.runs.resize(orders.size());
  std::vector<std::exception_ptr> errors(orders.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < orders.size(); i = next++) {
      try {
        const ShellSystem sys = build_system(config, orders[i]);
        ladder.runs[i] = integrate(sys, truncated(y0, orders[i]), {config.t_span.start, horizon}, config.integrator);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(thread_cap(), orders.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return ladder;
}

std::vector<ConvergenceRow> ladder_rows(const Ladder& ladder, const std::vector<int>& orders, double lambda) {
  std::vector<ConvergenceRow> rows;
  for (double t : ladder.probes) {
    for (std::size_t i = 0; i + 1 < orders.size(); ++i) {
      const Trajectory& lo = ladder.runs[i];
      const Trajectory& hi = ladder.runs[i + 1];
      if (t > lo.end_time() || t > hi.end_time()) continue;
      const Distances d = distances(dense_sample(lo, t), dense_sample(hi, t), lambda);
      rows.push_back({orders[i], orders[i + 1], t, d.weak, d.strong});
    }
  }
  return rows;
}

// Runs one trajectory and notes budget exhaustion in the record.
Trajectory run(const RunConfig& config, const OdeSystem& system, ShellState y0, TimeSpan span, RunRecord& record,
               std::span<const Watch> watch = {}) {
  y0.time = span.start;
  Trajectory traj = integrate(system, y0, span, config.integrator, watch);
  const StepStats& st = traj.stats();
  record.scalars["steps_accepted"] += static_cast<double>(st.accepted);
  record.scalars["steps_rejected"] += static_cast<double>(st.rejected);
  record.scalars["positivity_rejections"] += static_cast<double>(st.positivity_rejections);
  record.scalars["rhs_evaluations"] += static_cast<double>(st.rhs_evaluations);
  if (!traj.completed()) {
    record.status = RunStatus::budget_exhausted;
    record.message = "step budget exhausted at t = " + format_number(traj.end_time());
  }
  return traj;
}

double min_entry(const Trajectory& traj) {
  double m = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < traj.size(); ++i)
    for (double v : traj.values(i).subspan(1)) {
      m = first ? v : std::min(m, v);
      first = false;
    }
  return m;
}

void common_outputs(const RunConfig& config, const fs::path& dir, const Trajectory& traj, RunRecord& record) {
  const DiagnosticsOptions opts = config.diagnostics_options();
  const auto rows = diagnostics_rows(traj, opts);
  write_outputs(dir, record, traj, rows, opts);
  record.scalars["initial_energy"] = rows.empty() ? 0.0 : rows.front().energy;
  record.scalars["final_energy"] = rows.empty() ? 0.0 : rows.back().energy;
  record.scalars["final_time"] = traj.empty() ? config.t_span.start : traj.end_time();
  double sup = 0.0;
  for (const auto& r : rows) sup = std::max(sup, r.sup_theta);
  record.scalars["max_sup_theta"] = sup;
  record.scalars["min_entry"] = min_entry(traj);
}

void simulate(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const ShellSystem sys = build_system(config, config.galerkin.order);
  const Trajectory traj = run(config, sys, initial_state(config), config.t_span, record);
  common_outputs(config, dir, traj, record);
}

void regularity(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const ShellSystem sys = build_system(config, config.galerkin.order);
  const ShellState y0 = initial_state(config);
  const Trajectory traj = run(config, sys, y0, config.t_span, record);
  common_outputs(config, dir, traj, record);

  const double theta = config.model.theta();
  const double lambda = config.model.lambda_base();
  double sup_c = 0.0, sup_theta = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ShellState a = traj.sample(i);
    const ShellState c = a_to_c(a, config.model);
    for (std::size_t j = 1; j < c.coeffs.size(); ++j) sup_c = std::max(sup_c, c.coeffs[j]);
    sup_theta = std::max(sup_theta, sup_theta_norm(a, theta, lambda));
  }
  const double M = sup_theta_norm(y0, theta, lambda);
  const double delta = resolved_delta(config);
  record.scalars["sup_c"] = sup_c;
  record.scalars["sup_theta_over_time"] = sup_theta;
  record.scalars["M"] = M;
  record.scalars["delta"] = delta;
  record.scalars["bound_M_over_delta"] = M / delta;
  record.scalars["bound_ratio"] = M > 0.0 ? sup_theta / (M / delta) : 0.0;
  record.flags["sup_c_below_one"] = sup_c < 1.0;
  record.flags["bound_holds"] = sup_theta <= M / delta;
}

void decay(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const ShellSystem sys = build_system(config, config.galerkin.order);
  const Trajectory traj = run(config, sys, initial_state(config), config.t_span, record);
  common_outputs(config, dir, traj, record);
  const auto& d = config.diagnostics;
  const FitResult fit =
      decay_fit(traj, d.theta, d.fit_window, config.model.lambda_base(), d.fit_sampling, d.fit_samples);
  record.scalars["fit_slope"] = fit.slope;
  record.scalars["fit_intercept"] = fit.intercept;
  record.scalars["fit_r_squared"] = fit.r_squared;
  record.scalars["fit_samples"] = static_cast<double>(fit.samples);
  record.scalars["fit_window_start"] = fit.window.start;
  record.scalars["fit_window_end"] = fit.window.end;
  record.flags["slope_near_minus_third"] = std::abs(fit.slope + 1.0 / 3.0) <= 0.1 && fit.r_squared >= 0.9;
}

void scaling(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  // The damping term is linear and breaks the scaling symmetry, so this
  // scenario always uses the plain truncation.
  const ShellSystem sys = ShellSystem::dyadic(config.model, config.galerkin.order);
  const double eta = config.scaling.eta;
  const double T = config.t_span.end;
  const ShellState y0 = initial_state(config);
  const Trajectory base = run(config, sys, y0, {0.0, eta * T}, record);
  const Trajectory scaled = run(config, sys, rescale(y0, ScalingMap{eta}), {0.0, T}, record);
  write_state_csv(dir / "states.csv", base);
  write_state_csv(dir / "states_scaled.csv", scaled);
  record.files.insert(record.files.end(), {"states.csv", "states_scaled.csv"});

  std::vector<std::vector<double>> table;
  double worst = 0.0;
  const std::size_t m = config.scaling.grid_points;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(m - 1);
    if (t > scaled.end_time() || eta * t > base.end_time()) break;
    const ShellState s = dense_sample(scaled, t);
    const ShellState b = dense_sample(base, eta * t);
    double dev = 0.0;
    for (std::size_t j = 0; j < s.coeffs.size(); ++j) dev = std::max(dev, std::abs(s.coeffs[j] - eta * b.coeffs[j]));
    worst = std::max(worst, dev);
    table.push_back({t, dev});
  }
  write_table_csv(dir / "scaling.csv", {"t", "max_deviation"}, table);
  record.files.push_back("scaling.csv");
  record.scalars["eta"] = eta;
  record.scalars["max_deviation"] = worst;
}

void energy_balance(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const ShellSystem sys = build_system(config, config.galerkin.order);
  const Trajectory traj = run(config, sys, initial_state(config), config.t_span, record);
  common_outputs(config, dir, traj, record);
  const double lambda = config.model.lambda_base();
  const double e0 = energy(traj.values(0));
  const double e1 = energy(traj.values(traj.size() - 1));
  double worst = 0.0;
  for (int J : config.diagnostics_options().flux_shells) {
    const double r = energy_balance_residual(traj, J, lambda);
    record.scalars["residual_J" + std::to_string(J)] = r;
    worst = std::max(worst, r);
  }
  record.scalars["residual_max"] = worst;
  record.scalars["residual_max_over_E0"] = e0 > 0.0 ? worst / e0 : 0.0;
  record.scalars["dissipated"] = e0 - e1;
  if (config.closure == Closure::flux) {
    GalerkinSpec spec = config.galerkin;
    const double drain = galerkin_drain(traj, spec, lambda);
    const double err = std::abs((e0 - e1) - drain);
    const double scale = std::max(std::abs(e0 - e1), std::abs(drain));
    record.scalars["galerkin_drain"] = drain;
    record.scalars["identity_error"] = err;
    record.scalars["identity_rel_error"] = scale > 0.0 ? err / scale : 0.0;
  }
}

void onsager(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const ShellSystem sys = build_system(config, config.galerkin.order);
  const Trajectory traj = run(config, sys, initial_state(config), config.t_span, record);
  common_outputs(config, dir, traj, record);
  const double lambda = config.model.lambda_base();
  std::vector<std::vector<double>> table;
  double total = 0.0;
  for (int j = 1; j <= config.galerkin.order; ++j) {
    const double v = onsager_integral(traj, j, lambda);
    total += v;
    table.push_back({static_cast<double>(j), v});
  }
  write_table_csv(dir / "onsager.csv", {"shell", "integral"}, table);
  record.files.push_back("onsager.csv");
  record.scalars["onsager_sum"] = total;
  record.scalars["dissipated"] = energy(traj.values(0)) - energy(traj.values(traj.size() - 1));
  if (config.closure == Closure::flux) record.scalars["galerkin_drain"] = galerkin_drain(traj, config.galerkin, lambda);
}

void galerkin_convergence(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const auto& orders = config.convergence.orders;
  const Ladder ladder = ladder_runs(config, orders);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const std::string name = "order_" + std::to_string(orders[i]) + "/states.csv";
    write_state_csv(dir / name, ladder.runs[i]);
    record.files.push_back(name);
    const StepStats& st = ladder.runs[i].stats();
    record.scalars["steps_accepted"] += static_cast<double>(st.accepted);
    record.scalars["steps_rejected"] += static_cast<double>(st.rejected);
    if (!ladder.runs[i].completed()) {
      record.status = RunStatus::budget_exhausted;
      record.message = "step budget exhausted for order " + std::to_string(orders[i]);
    }
  }
  const auto rows = ladder_rows(ladder, orders, config.model.lambda_base());
  std::vector<std::vector<double>> table;
  bool decreasing = true;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    table.push_back({static_cast<double>(row.n), static_cast<double>(row.n_next), row.t, row.weak, row.strong});
    const std::string tag = std::to_string(row.n) + "_" + std::to_string(row.n_next) + "_t" + format_number(row.t);
    record.scalars["d_W_" + tag] = row.weak;
    record.scalars["d_S_" + tag] = row.strong;
    if (r > 0 && rows[r - 1].t == row.t && row.weak > rows[r - 1].weak) decreasing = false;
  }
  write_table_csv(dir / "convergence.csv", {"n", "n_next", "t", "d_W", "d_S"}, table);
  record.files.push_back("convergence.csv");
  record.flags["weak_distance_nonincreasing"] = decreasing;
}

void certificate(const RunConfig& config, const fs::path& dir, RunRecord& record) {
  const CertificateParams params = config.certificate_params();
  const CertificateReport rep = verify_certificate(params);
  const EnvelopeBounds env{params.k, params.theta, params.lambda, rep.B_target_used, params.t0};
  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < rep.beta_times.size(); ++i) {
    const double t = rep.beta_times[i];
    const Envelope e = envelope_bounds(t, env);
    table.push_back({t, rep.beta_values[i], e.b_hat, e.b_tilde, beta_prime_bound(t, env)});
  }
  write_table_csv(dir / "beta.csv", {"t", "beta", "b_hat", "b_tilde", "beta_prime_bound"}, table);
  record.files.push_back("beta.csv");

  write_text(dir / "certificate.json", to_json(rep));
  record.files.push_back("certificate.json");

  const AdversarialResult adv = adversarial_simulation(params, rep.B_target_used, std::nullopt, config.integrator);
  write_state_csv(dir / "adversarial.csv", adv.trajectory);
  record.files.push_back("adversarial.csv");

  auto& s = record.scalars;
  s["k"] = params.k;
  s["B_target"] = params.B_target;
  s["B_target_used"] = rep.B_target_used;
  s["B_limit"] = rep.B_limit;
  s["B_limit_quadrature"] = rep.B_limit_quadrature;
  s["delta_star"] = rep.delta_star;
  s["B_at_delta_star"] = rep.B_at_delta_star;
  s["sup_beta"] = rep.sup_beta;
  s["sup_beta_time"] = rep.sup_beta_time;
  s["beta_at_T_check"] = rep.beta_at_T_check;
  s["tail_bound"] = rep.tail_bound;
  s["max_grid_increment"] = rep.max_grid_increment;
  s["max_quadrature_intervals"] = rep.max_quadrature_intervals;
  s["adversarial_sup_b_n"] = adv.sup_b_n;
  s["adversarial_hypothesis_end"] = adv.hypothesis_end;
  s["adversarial_excess_over_beta"] = adv.max_excess_over_beta;
  s["adversarial_excess_over_b_hat"] = adv.max_excess_over_b_hat;
  s["adversarial_deficit_below_b_tilde"] = adv.max_deficit_below_b_tilde;
  s["adversarial_excess_over_beta_all"] = adv.max_excess_over_beta_all;
  s["adversarial_excess_over_b_hat_all"] = adv.max_excess_over_b_hat_all;
  s["adversarial_deficit_below_b_tilde_all"] = adv.max_deficit_below_b_tilde_all;
  record.flags["target_feasible"] = rep.target_feasible;
  record.flags["verdict"] = rep.verdict;
  const double tol = 1e-6;
  record.flags["dominated_while_hypothesis_holds"] = adv.max_excess_over_beta <= tol &&
                                                     adv.max_excess_over_b_hat <= tol &&
                                                     adv.max_deficit_below_b_tilde <= tol;
  record.flags["dominated_full_horizon"] = adv.max_excess_over_beta_all <= tol &&
                                           adv.max_excess_over_b_hat_all <= tol &&
                                           adv.max_deficit_below_b_tilde_all <= tol;
  for (const auto& f : rep.failing_conditions) record.message += (record.message.empty() ? "" : "; ") + f;
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const RunConfig& config, const std::vector<int>& orders) {
  return ladder_rows(ladder_runs(config, orders), orders, config.model.lambda_base());
}

RunRecord run_scenario(const RunConfig& config) {
  validate(config);
  const fs::path dir = config.outputs;
  RunRecord record;
  record.scenario = std::string(to_string(config.scenario));
  record.config_digest = config.digest();
  record.started = utc_timestamp();
  write_text(dir / "config.txt", config.to_text());
  record.files.push_back("config.txt");
  try {
    switch (config.scenario) {
      case Scenario::simulate: simulate(config, dir, record); break;
      case Scenario::regularity: regularity(config, dir, record); break;
      case Scenario::decay: decay(config, dir, record); break;
      case Scenario::scaling: scaling(config, dir, record); break;
      case Scenario::energy_balance: energy_balance(config, dir, record); break;
      case Scenario::onsager: onsager(config, dir, record); break;
      case Scenario::galerkin_convergence: galerkin_convergence(config, dir, record); break;
      case Scenario::certificate: certificate(config, dir, record); break;
    }
  } catch (const NumericalError& e) {
    record.status = RunStatus::numerical_failure;
    record.message = e.what();
  }
  record.finished = utc_timestamp();
  write_summary(dir, record);
  return record;
}

}  // namespace dyadic::harness
