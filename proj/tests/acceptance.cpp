// Acceptance gate. Prints one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   only criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dyadic/certificate.hpp"
#include "dyadic/core.hpp"
#include "dyadic/diagnostics.hpp"
#include "dyadic/harness/config.hpp"
#include "dyadic/harness/initial_conditions.hpp"
#include "dyadic/harness/scenarios.hpp"
#include "dyadic/integrator.hpp"

using namespace dyadic;
using namespace dyadic::harness;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRhsRelTol = 1e-13;
constexpr double kEnergyIdentityRelTol = 1e-6;
constexpr double kTelescopeRelTol = 1e-6;
constexpr double kScalingTol = 1e-6;
constexpr double kSlopeTarget = -1.0 / 3.0;
constexpr double kSlopeTol = 0.1;
constexpr double kMinRSquared = 0.9;
constexpr double kDissipationSpread = 0.10;
constexpr double kBClosedVsQuadTol = 1e-8;
constexpr double kDominationTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "dyadic_acceptance" / name;
  fs::remove_all(p);
  return p;
}

IntegratorConfig long_run(double rel_tol = 1e-9) {
  IntegratorConfig c;
  c.rel_tol = rel_tol;
  c.abs_tol = 1e-13;
  c.scheme = Scheme::linearly_implicit;
  return c;
}

ShellState random_data(int n, std::uint64_t seed) {
  InitialConditionSpec spec;
  spec.family = IcFamily::random;
  spec.decay = 1.0;
  return make_initial_state(spec, ModelParams{}, n, seed);
}

ShellState geometric_data(int n, double amplitude, double decay) {
  InitialConditionSpec spec;
  spec.amplitude = amplitude;
  spec.decay = decay;
  return make_initial_state(spec, ModelParams{}, n, 1);
}

// 1. rhs_dyadic against a direct transcription of the shell equations.
Outcome rhs_oracle() {
  SplitMix64 rng(2024);
  const ModelParams p;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(9, 0.0);
    for (int j = 1; j <= 8; ++j) a[j] = 2.0 * rng.uniform();
    const auto d = rhs_dyadic(ShellState(0, a), p);
    for (int j = 1; j <= 8; ++j) {
      const double gain = std::pow(std::pow(2.0, j - 1.0), 2.5) * a[j - 1] * a[j - 1];
      const double loss = std::pow(std::pow(2.0, double(j)), 2.5) * a[j] * (j < 8 ? a[j + 1] : 0.0);
      const double scale = std::abs(gain) + std::abs(loss);
      if (scale > 0.0) worst = std::max(worst, std::abs(d[j] - (gain - loss)) / scale);
    }
    if (d[0] != 0.0) worst = 1.0;
  }
  return {worst <= kRhsRelTol, "max relative deviation " + fmt(worst) + " (tol " + fmt(kRhsRelTol) + ")"};
}

// 2. Positivity of 50 random nonnegative data to t = 5.
Outcome positivity() {
  const auto sys = ShellSystem::galerkin_flux(ModelParams{}, {10, 0.6});
  IntegratorConfig c = long_run();
  c.positivity_mode = PositivityMode::reject_step;
  double worst = 0.0;
  std::size_t rejections = 0;
  bool complete = true;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto traj = integrate(sys, random_data(10, seed), {0, 5}, c);
    complete = complete && traj.completed();
    rejections += traj.stats().positivity_rejections;
    for (std::size_t i = 0; i < traj.size(); ++i)
      for (double v : traj.values(i)) worst = std::min(worst, v);
  }
  return {complete && worst >= 0.0, "min stored entry " + fmt(worst) + ", positivity rejections " +
                                        std::to_string(rejections) + (complete ? "" : ", budget exhausted")};
}

struct GalerkinRun {
  Trajectory traj;
  GalerkinSpec spec;
};

std::vector<GalerkinRun> energy_runs() {
  const GalerkinSpec spec{10, 0.6};
  const auto sys = ShellSystem::galerkin_flux(ModelParams{}, spec);
  std::vector<ShellState> data{geometric_data(10, 1.0, 1.0), geometric_data(10, 1.0, 0.7)};
  for (std::uint64_t seed : {3, 4, 5}) data.push_back(random_data(10, seed));
  std::vector<GalerkinRun> runs;
  for (const auto& y0 : data) runs.push_back({integrate(sys, y0, {0, 1}, long_run(1e-10)), spec});
  return runs;
}

// 3. E(0) - E(t) against the integrated damping drain.
Outcome energy_identity() {
  double worst = 0.0;
  for (const auto& run : energy_runs()) {
    const auto& t = run.traj;
    const double lost = energy(t.values(0)) - energy(t.values(t.size() - 1));
    const double drain = galerkin_drain(t, run.spec);
    worst = std::max(worst, std::abs(lost - drain) / std::abs(drain));
  }
  return {worst <= kEnergyIdentityRelTol,
          "max relative mismatch " + fmt(worst) + " over 5 runs (tol " + fmt(kEnergyIdentityRelTol) + ")"};
}

// 4. Flux telescoping residual.
Outcome telescoping() {
  double worst = 0.0;
  for (const auto& run : energy_runs()) {
    const double e0 = energy(run.traj.values(0));
    for (int J : {3, 5, 8}) worst = std::max(worst, energy_balance_residual(run.traj, J) / e0);
  }
  return {worst <= kTelescopeRelTol, "max residual / E(0) " + fmt(worst) + " (tol " + fmt(kTelescopeRelTol) + ")"};
}

// 5. Scaling invariance through the harness scenario.
Outcome scaling_invariance() {
  double worst = 0.0;
  bool ok = true;
  for (double eta : {0.5, 2.0}) {
    RunConfig c;
    c.scenario = Scenario::scaling;
    c.galerkin.order = 10;
    c.closure = Closure::plain;
    c.t_span = {0.0, 2.0};
    c.scaling = {eta, 81};
    c.integrator = long_run(1e-11);
    c.integrator.abs_tol = 1e-14;
    c.outputs = work_dir("scaling_" + fmt(eta)).string();
    const RunRecord r = run_scenario(c);
    ok = ok && r.status == RunStatus::ok;
    worst = std::max(worst, r.scalars.at("max_deviation"));
  }
  return {ok && worst <= kScalingTol, "max |a~_j(t) - eta a_j(eta t)| " + fmt(worst) + " (tol " + fmt(kScalingTol) + ")"};
}

// 6. c_1 never increases.
Outcome monotone_first_shell() {
  const ModelParams p;
  const auto sys = ShellSystem::c_form(p, 10);
  std::vector<ShellState> data{geometric_data(10, 1.0, 1.0), geometric_data(10, 0.5, 0.6)};
  for (std::uint64_t seed = 1; seed <= 8; ++seed) data.push_back(random_data(10, seed));
  std::vector<Watch> watches;
  for (double th : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0}) watches.push_back({1, th});
  std::size_t increases = 0, upward = 0, samples = 0;
  for (const auto& a0 : data) {
    const auto traj = integrate(sys, a_to_c(a0, p), {0, 5}, long_run(), watches);
    samples += traj.size();
    for (std::size_t i = 1; i < traj.size(); ++i)
      if (traj.values(i)[1] > traj.values(i - 1)[1]) ++increases;
    for (const auto& ev : traj.events())
      if (ev.direction == CrossingDirection::upward) ++upward;
  }
  return {increases == 0 && upward == 0, std::to_string(increases) + " increases over " + std::to_string(samples) +
                                             " samples, " + std::to_string(upward) + " upward crossings"};
}

// 7. Regularity from delta-ball data, and the M / delta* bound.
Outcome regularity() {
  CertificateParams cp;
  const CertificateReport rep = verify_certificate(cp);
  const double delta = rep.delta_star;
  double sup_c = 0.0;
  bool ok = true;
  for (int variant = 0; variant < 4; ++variant) {
    RunConfig c;
    c.scenario = Scenario::regularity;
    c.galerkin.order = 12;
    c.t_span = {0.0, 50.0};
    c.integrator = long_run();
    c.ic.family = IcFamily::delta_ball;
    c.ic.delta = delta;
    c.ic.profile = variant == 0 ? BallProfile::unit : BallProfile::random;
    c.seed = static_cast<std::uint64_t>(variant);
    c.outputs = work_dir("regularity_" + std::to_string(variant)).string();
    const RunRecord r = run_scenario(c);
    ok = ok && r.status == RunStatus::ok;
    sup_c = std::max(sup_c, r.scalars.at("sup_c"));
  }
  RunConfig g;
  g.scenario = Scenario::regularity;
  g.t_span = {0.0, 50.0};
  g.integrator = long_run();
  g.ic.delta = delta;
  g.outputs = work_dir("regularity_geometric").string();
  const RunRecord r = run_scenario(g);
  ok = ok && r.status == RunStatus::ok;
  const double ratio = r.scalars.at("bound_ratio");
  return {ok && sup_c < 1.0 && ratio <= 1.0, "delta* " + fmt(delta) + ", sup c_j " + fmt(sup_c) +
                                                 "; geometric: sup / (M/delta*) = " + fmt(ratio)};
}

// 8. Decay exponent.
Outcome decay_law() {
  RunConfig c;
  c.scenario = Scenario::decay;
  c.galerkin.order = 12;
  c.t_span = {0.0, 50.0};
  c.integrator = long_run();
  c.outputs = work_dir("decay").string();
  const RunRecord r = run_scenario(c);
  const double slope = r.scalars.at("fit_slope"), r2 = r.scalars.at("fit_r_squared");
  const bool pass = r.status == RunStatus::ok && std::abs(slope - kSlopeTarget) <= kSlopeTol && r2 >= kMinRSquared;
  return {pass, "slope " + fmt(slope) + " (target " + fmt(kSlopeTarget) + " +- " + fmt(kSlopeTol) + "), R^2 " +
                    fmt(r2)};
}

// 9. Dissipated energy across a truncation ladder.
Outcome anomalous_dissipation() {
  std::vector<double> lost;
  std::string detail;
  for (int n : {8, 10, 12}) {
    const auto sys = ShellSystem::galerkin_flux(ModelParams{}, {n, 0.6});
    const auto traj = integrate(sys, geometric_data(n, 1.0, 0.7), {0, 1}, long_run(1e-10));
    lost.push_back(energy(traj.values(0)) - energy(traj.values(traj.size() - 1)));
    detail += "N=" + std::to_string(n) + ": " + fmt(lost.back()) + "  ";
  }
  const auto [lo, hi] = std::minmax_element(lost.begin(), lost.end());
  const double spread = (*hi - *lo) / *hi;
  return {*lo > 0.0 && spread <= kDissipationSpread, detail + "spread " + fmt(spread)};
}

// 10. Certificate internal consistency.
Outcome certificate_consistency() {
  SplitMix64 rng(10);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double k = 0.05 + 0.94 * rng.uniform();
    const double delta = k * 0.999 * rng.uniform();
    const double theta = 0.5 + 0.3 * rng.uniform();
    worst = std::max(worst, std::abs(B_of_delta(delta, k, theta) - B_of_delta_quadrature(delta, k, theta)));
  }
  CertificateParams p;
  const EnvelopeBounds env{p.k, p.theta, p.lambda, B_limit(p.k, p.theta) - p.fallback_slack, p.t0};
  const bool exact_start = beta_eval(p.t0, env, p.quad_tol) == p.k;
  double res_gap = 0.0;
  for (double t : {0.01, 0.1, 0.4, 1.0, 5.0, 20.0})
    res_gap = std::max(res_gap, std::abs(beta_eval(t, env, p.quad_tol) - beta_eval(t, env, p.quad_tol / 10)));
  CertificateParams coarse = p;
  coarse.quad_tol = 1e-8;
  const CertificateReport fine_rep = verify_certificate(p);
  const CertificateReport coarse_rep = verify_certificate(coarse);
  const bool same_verdict = fine_rep.verdict == coarse_rep.verdict;
  const bool pass = worst <= kBClosedVsQuadTol && exact_start && res_gap <= 10 * p.quad_tol && same_verdict;
  std::ostringstream d;
  d << "max |B - quadrature| " << fmt(worst) << ", beta(t0) == k " << (exact_start ? "yes" : "no")
    << ", resolution gap " << fmt(res_gap) << ", verdict(1e-8) == verdict(1e-10) " << (same_verdict ? "yes" : "no")
    << "; B_limit " << fmt(fine_rep.B_limit) << " vs claimed 0.447: "
    << (fine_rep.target_feasible ? "feasible" : "infeasible") << ", verdict " << (fine_rep.verdict ? "true" : "false")
    << " (sup beta " << fmt(fine_rep.sup_beta) << ")";
  return {pass, d.str()};
}

// 11. The surrogate stays inside its envelopes at every sample.
Outcome adversarial_domination() {
  CertificateParams p;
  const double B = B_limit(p.k, p.theta) - p.fallback_slack;
  IntegratorConfig c;
  c.rel_tol = 1e-11;
  c.abs_tol = 1e-14;
  const AdversarialResult r = adversarial_simulation(p, B, std::nullopt, c);
  const double worst_all =
      std::max({r.max_excess_over_beta_all, r.max_excess_over_b_hat_all, r.max_deficit_below_b_tilde_all});
  const double worst_window = std::max({r.max_excess_over_beta, r.max_excess_over_b_hat, r.max_deficit_below_b_tilde});
  return {worst_all <= kDominationTol,
          "worst violation " + fmt(worst_all) + " over [0, " + fmt(p.T_check) + "] (tol " + fmt(kDominationTol) +
              "), beta " + fmt(r.max_excess_over_beta_all) + ", b_hat " + fmt(r.max_excess_over_b_hat_all) +
              ", b_tilde " + fmt(r.max_deficit_below_b_tilde_all) + "; on [0, " + fmt(r.hypothesis_end) +
              "] where b_n >= k: " + fmt(worst_window) + ", sup b_n " + fmt(r.sup_b_n)};
}

// 12. Weak-distance convergence of the Galerkin ladder.
Outcome galerkin_convergence() {
  RunConfig c;
  c.integrator = long_run(1e-10);
  c.convergence.probe_times = {0.1};
  const auto rows = convergence_study(c, {8, 16, 32});
  const bool pass = rows.size() == 2 && rows[0].weak >= rows[1].weak;
  return {pass, "d_W(8,16) = " + fmt(rows.at(0).weak) + ", d_W(16,32) = " + fmt(rows.at(1).weak) + " at t = 0.1"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"RHS oracle equivalence", rhs_oracle},
      {"Positivity", positivity},
      {"Galerkin energy identity", energy_identity},
      {"Flux telescoping", telescoping},
      {"Scaling invariance", scaling_invariance},
      {"Monotone first shell", monotone_first_shell},
      {"Regularity", regularity},
      {"Decay law", decay_law},
      {"Anomalous dissipation trend", anomalous_dissipation},
      {"Certificate internal consistency", certificate_consistency},
      {"Adversarial domination", adversarial_domination},
      {"Galerkin convergence", galerkin_convergence},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  const auto& list = criteria();
  if (only < 0 || only > static_cast<int>(list.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", list.size());
    return 2;
  }
  int failures = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = list[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s C%-2zu %-34s %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", i + 1, list[i].name, out.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
