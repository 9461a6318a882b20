#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/core.hpp"

namespace dyadic {

/// Dense output is stored per step as a degree-5 polynomial in the local
/// coordinate s = (t - t0) / (t1 - t0), six monomial coefficients per component.
inline constexpr std::size_t kDenseCoefficients = 6;

enum class CrossingDirection { upward, downward, touch };

std::string_view to_string(CrossingDirection direction);

struct CrossingEvent {
  int shell = 0;
  double threshold = 0.0;
  double time = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  CrossingDirection direction = CrossingDirection::upward;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t positivity_rejections = 0;
  std::size_t rhs_evaluations = 0;
};

enum class IntegrationStatus { completed, budget_exhausted };

/// One step of dense output.
struct SegmentView {
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t dim = 0;
  std::span<const double> coeffs;  // coeffs[component * kDenseCoefficients + power]

  double value(double t, std::size_t component) const;
  void values(double t, std::span<double> out) const;
};

// Helpers producing the six monomial coefficients for one component.
std::array<double, kDenseCoefficients> linear_poly(double y0, double y1);
/// Quintic Hermite through values at s = 0, 1/2, 1 with slopes dy/ds there.
std::array<double, kDenseCoefficients> hermite_quintic(double y0, double ymid, double y1, double d0, double dmid,
                                                       double d1);
/// Dormand-Prince continuous extension y0 + s(r2 + (1-s)(r3 + s(r4 + (1-s) r5))).
std::array<double, kDenseCoefficients> dopri_poly(double r1, double r2, double r3, double r4, double r5);

/// Time-ordered record of states with the dense output between them.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(VariableKind kind, std::size_t dim);

  void start(double t, std::span<const double> y);
  /// Appends a sample at t (> last time) with the segment polynomial from the
  /// previous sample. poly holds dim * kDenseCoefficients values.
  void append(double t, std::span<const double> y, std::span<const double> poly);

  VariableKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  std::size_t segment_count() const { return times_.empty() ? 0 : times_.size() - 1; }
  bool empty() const { return times_.empty(); }

  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  std::span<const double> values(std::size_t i) const;
  ShellState sample(std::size_t i) const;
  SegmentView segment(std::size_t k) const;

  double start_time() const;
  double end_time() const;

  /// Index of the segment containing t; throws RangeError outside the span.
  std::size_t locate(double t) const;
  void evaluate(double t, std::span<double> out) const;
  double component(double t, std::size_t j) const;

  const std::vector<CrossingEvent>& events() const { return events_; }
  void add_event(const CrossingEvent& event) { events_.push_back(event); }

  StepStats& stats() { return stats_; }
  const StepStats& stats() const { return stats_; }

  IntegrationStatus status() const { return status_; }
  void set_status(IntegrationStatus status) { status_ = status; }
  bool completed() const { return status_ == IntegrationStatus::completed; }

 private:
  VariableKind kind_ = VariableKind::a;
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> dense_;
  std::vector<CrossingEvent> events_;
  StepStats stats_;
  IntegrationStatus status_ = IntegrationStatus::completed;
};

/// State at time t from the dense output; exact at stored nodes.
ShellState dense_sample(const Trajectory& trajectory, double t);

/// First crossing of `threshold` by component `shell` inside (t0, t1] of
/// the segment, refined by bisection to 1e-10 in time.
std::optional<CrossingEvent> detect_crossing(const SegmentView& segment, int shell, double threshold);

}  // namespace dyadic
