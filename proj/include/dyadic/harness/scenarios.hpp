#pragma once

#include <cstddef>
#include <vector>

#include "dyadic/core.hpp"
#include "dyadic/harness/config.hpp"
#include "dyadic/harness/record.hpp"
#include "dyadic/trajectory.hpp"

namespace dyadic::harness {

/// Galerkin-with-flux or plain truncation at galerkin.order, per config.
ShellSystem build_system(const RunConfig& config, int order);

struct ConvergenceRow {
  int n = 0;
  int n_next = 0;
  double t = 0.0;
  double weak = 0.0;
  double strong = 0.0;
};

/// Integrates the Galerkin system for every order from the same initial data
/// (generated at the largest order, truncated for the smaller ones) and
/// tabulates distances between consecutive orders at the probe times. Runs
/// concurrently, at most DYADIC_THREADS at a time.
std::vector<ConvergenceRow> convergence_study(const RunConfig& config, const std::vector<int>& orders);

std::size_t thread_cap();

/// Runs the configured scenario, writes its outputs under config.outputs and
/// returns the record (also written there as summary.json). Numerical
/// failures are recorded with status numerical_failure.
RunRecord run_scenario(const RunConfig& config);

}  // namespace dyadic::harness
