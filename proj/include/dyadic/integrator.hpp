#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "dyadic/core.hpp"
#include "dyadic/ode_system.hpp"
#include "dyadic/trajectory.hpp"

namespace dyadic {

enum class PositivityMode { off, reject_step, clamp };

/// dopri5: explicit Dormand-Prince 5(4) with its native continuous extension.
/// linearly_implicit: extrapolated linearly implicit Euler (step sequence
/// 2, 4, ..., 12, order 6) with a quintic Hermite dense output built from an
/// extrapolated midpoint. Use it when the shell rates make dopri5 step-bound.
enum class Scheme { dopri5, linearly_implicit };

std::string_view to_string(PositivityMode mode);
std::string_view to_string(Scheme scheme);
PositivityMode parse_positivity_mode(std::string_view text);
Scheme parse_scheme(std::string_view text);

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double dt_init = 1e-6;
  double dt_min = 1e-14;
  double dt_max = 1.0;
  std::size_t max_steps = 2'000'000;
  PositivityMode positivity_mode = PositivityMode::reject_step;
  Scheme scheme = Scheme::dopri5;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

struct TimeSpan {
  double start = 0.0;
  double end = 1.0;
};

/// Threshold crossing watch on one component.
struct Watch {
  int shell = 1;
  double threshold = 1.0;
};

/// Integrates `system` from `initial` over `span`. Each accepted step keeps
///
///   |e|_2 <= rel_tol * max(|y|_2, |y_new|_2) + abs_tol
///
/// for the embedded estimate e. With positivity enabled and nonnegative
/// initial data, steps producing an entry below -abs_tol are rejected and
/// retried at half the size (reject_step) and entries in [-abs_tol, 0) are
/// set to zero; clamp zeroes every negative entry instead of rejecting.
///
/// Exhausting max_steps (accepted plus rejected attempts) returns a partial
/// trajectory with status budget_exhausted. A step below dt_min throws
/// StiffnessError naming the component with the largest error.
Trajectory integrate(const OdeSystem& system, const ShellState& initial, TimeSpan span,
                     const IntegratorConfig& config, std::span<const Watch> watch = {});

}  // namespace dyadic
