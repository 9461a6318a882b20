#include "dyadic/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyadic/error.hpp"

namespace dyadic {

std::string_view to_string(CrossingDirection direction) {
  switch (direction) {
    case CrossingDirection::upward: return "upward";
    case CrossingDirection::downward: return "downward";
    case CrossingDirection::touch: return "touch";
  }
  return "upward";
}

double SegmentView::value(double t, std::size_t component) const {
  const double s = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
  const double* p = coeffs.data() + component * kDenseCoefficients;
  double v = p[kDenseCoefficients - 1];
  for (std::size_t k = kDenseCoefficients - 1; k-- > 0;) v = v * s + p[k];
  return v;
}

void SegmentView::values(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < dim; ++i) out[i] = value(t, i);
}

std::array<double, kDenseCoefficients> linear_poly(double y0, double y1) { return {y0, y1 - y0, 0, 0, 0, 0}; }

std::array<double, kDenseCoefficients> hermite_quintic(double y0, double ym, double y1, double d0, double dm,
                                                       double d1) {
  return {y0,
          d0,
          -6 * d0 - d1 - 8 * dm - 23 * y0 + 7 * y1 + 16 * ym,
          13 * d0 + 5 * d1 + 32 * dm + 66 * y0 - 34 * y1 - 32 * ym,
          -12 * d0 - 8 * d1 - 40 * dm - 68 * y0 + 52 * y1 + 16 * ym,
          4 * d0 + 4 * d1 + 16 * dm + 24 * y0 - 24 * y1};
}

std::array<double, kDenseCoefficients> dopri_poly(double r1, double r2, double r3, double r4, double r5) {
  return {r1, r2 + r3, -r3 + r4 + r5, -r4 - 2 * r5, r5, 0.0};
}

Trajectory::Trajectory(VariableKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

void Trajectory::start(double t, std::span<const double> y) {
  if (y.size() != dim_) throw ValidationError("trajectory start state has wrong dimension");
  times_.assign(1, t);
  values_.assign(y.begin(), y.end());
  dense_.clear();
}

void Trajectory::append(double t, std::span<const double> y, std::span<const double> poly) {
  if (times_.empty()) throw ValidationError("trajectory has no start sample");
  if (!(t > times_.back())) throw ValidationError("trajectory sample times must be strictly increasing");
  if (y.size() != dim_ || poly.size() != dim_ * kDenseCoefficients)
    throw ValidationError("trajectory sample has wrong dimension");
  times_.push_back(t);
  values_.insert(values_.end(), y.begin(), y.end());
  dense_.insert(dense_.end(), poly.begin(), poly.end());
}

std::span<const double> Trajectory::values(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * dim_, dim_);
}

ShellState Trajectory::sample(std::size_t i) const {
  auto v = values(i);
  return ShellState(times_[i], std::vector<double>(v.begin(), v.end()), kind_);
}

SegmentView Trajectory::segment(std::size_t k) const {
  return SegmentView{times_[k], times_[k + 1], dim_,
                     std::span<const double>(dense_).subspan(k * dim_ * kDenseCoefficients,
                                                             dim_ * kDenseCoefficients)};
}

double Trajectory::start_time() const {
  if (times_.empty()) throw RangeError("empty trajectory");
  return times_.front();
}

double Trajectory::end_time() const {
  if (times_.empty()) throw RangeError("empty trajectory");
  return times_.back();
}

std::size_t Trajectory::locate(double t) const {
  if (times_.empty() || !(t >= times_.front() && t <= times_.back()))
    throw RangeError("time " + std::to_string(t) + " outside trajectory span");
  if (times_.size() == 1) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - times_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, times_.size() - 2);
}

void Trajectory::evaluate(double t, std::span<double> out) const {
  const std::size_t k = locate(t);
  if (times_.size() == 1 || t == times_[k]) {
    auto v = values(k);
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  if (t == times_[k + 1]) {
    auto v = values(k + 1);
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  segment(k).values(t, out);
}

double Trajectory::component(double t, std::size_t j) const {
  const std::size_t k = locate(t);
  if (times_.size() == 1 || t == times_[k]) return values(k)[j];
  if (t == times_[k + 1]) return values(k + 1)[j];
  return segment(k).value(t, j);
}

ShellState dense_sample(const Trajectory& trajectory, double t) {
  ShellState state;
  state.time = t;
  state.kind = trajectory.kind();
  state.coeffs.resize(trajectory.dim());
  trajectory.evaluate(t, state.coeffs);
  return state;
}

std::optional<CrossingEvent> detect_crossing(const SegmentView& segment, int shell, double threshold) {
  if (shell < 0 || static_cast<std::size_t>(shell) >= segment.dim) return std::nullopt;
  constexpr int kProbes = 8;
  constexpr double kTimeTol = 1e-10;
  const auto j = static_cast<std::size_t>(shell);
  const double span = segment.t1 - segment.t0;
  auto g = [&](double t) { return segment.value(t, j) - threshold; };

  double t_prev = segment.t0;
  double g_prev = g(t_prev);
  for (int i = 1; i <= kProbes; ++i) {
    const double t_next = i == kProbes ? segment.t1 : segment.t0 + span * i / kProbes;
    const double g_next = g(t_next);
    if (g_next == 0.0 && g_prev != 0.0) {
      // exact hit on a probe: a crossing if the far side has the opposite sign
      auto direction = CrossingDirection::touch;
      if (i < kProbes) {
        const double g_after = g(segment.t0 + span * (i + 1) / kProbes);
        if (g_prev < 0.0 && g_after > 0.0) direction = CrossingDirection::upward;
        if (g_prev > 0.0 && g_after < 0.0) direction = CrossingDirection::downward;
      }
      return CrossingEvent{shell, threshold, t_next, t_next, t_next, direction};
    }
    if ((g_prev < 0.0 && g_next > 0.0) || (g_prev > 0.0 && g_next < 0.0)) {
      const bool upward = g_next > 0.0;
      double lo = t_prev, hi = t_next;
      while (hi - lo > kTimeTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm > 0.0) == upward) hi = mid;
        else lo = mid;
      }
      return CrossingEvent{shell, threshold, 0.5 * (lo + hi), lo, hi,
                           upward ? CrossingDirection::upward : CrossingDirection::downward};
    }
    t_prev = t_next;
    g_prev = g_next;
  }
  return std::nullopt;
}

}  // namespace dyadic
