#include "dyadic/integrator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dyadic/error.hpp"

namespace dyadic {

std::string_view to_string(PositivityMode mode) {
  switch (mode) {
    case PositivityMode::off: return "off";
    case PositivityMode::reject_step: return "reject_step";
    case PositivityMode::clamp: return "clamp";
  }
  return "off";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::dopri5: return "dopri5";
    case Scheme::linearly_implicit: return "linearly_implicit";
  }
  return "dopri5";
}

PositivityMode parse_positivity_mode(std::string_view text) {
  if (text == "off") return PositivityMode::off;
  if (text == "reject_step") return PositivityMode::reject_step;
  if (text == "clamp") return PositivityMode::clamp;
  throw ConfigurationError("unknown positivity mode '" + std::string(text) + "'");
}

Scheme parse_scheme(std::string_view text) {
  if (text == "dopri5") return Scheme::dopri5;
  if (text == "linearly_implicit") return Scheme::linearly_implicit;
  throw ConfigurationError("unknown integration scheme '" + std::string(text) + "'");
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigurationError("tolerances must be > 0");
  if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max))
    throw ConfigurationError("step sizes must satisfy 0 < dt_min <= dt_init <= dt_max");
  if (max_steps < 1) throw ConfigurationError("max_steps must be >= 1");
}

namespace {

// Scaled to avoid overflow for large entries.
double norm2(std::span<const double> v) {
  double big = 0.0;
  for (double x : v) big = std::max(big, std::abs(x));
  if (big == 0.0 || !std::isfinite(big)) return big;
  double s = 0.0;
  for (double x : v) s += (x / big) * (x / big);
  return big * std::sqrt(s);
}

struct Attempt {
  bool finite = true;
  double error = 0.0;  // normalised, accept if <= 1
  std::size_t worst = 0;
  std::vector<double> y_new;
  std::vector<double> f_new;  // f(y_new)
  std::vector<double> poly;
};

void score(Attempt& out, std::span<const double> y, std::span<const double> err, const IntegratorConfig& cfg) {
  double worst = -1.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    if (!std::isfinite(out.y_new[i]) || !std::isfinite(err[i])) {
      out.finite = false;
      out.worst = i;
      out.error = std::numeric_limits<double>::infinity();
      return;
    }
    if (std::abs(err[i]) > worst) {
      worst = std::abs(err[i]);
      out.worst = i;
    }
  }
  const double scale = cfg.rel_tol * std::max(norm2(y), norm2(out.y_new)) + cfg.abs_tol;
  out.error = norm2(err) / scale;
  if (!std::isfinite(out.error)) {
    out.finite = false;
    out.error = std::numeric_limits<double>::infinity();
  }
}

class Stepper {
 public:
  virtual ~Stepper() = default;
  /// Called whenever the step origin changes; f0 = f(y) is supplied.
  virtual void reset(std::span<const double> y, std::span<const double> f0) = 0;
  virtual Attempt attempt(double h) = 0;
  virtual double order() const = 0;
};

// Dormand-Prince 5(4) coefficients and continuous extension.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

class DormandPrince final : public Stepper {
 public:
  DormandPrince(const OdeSystem& sys, const IntegratorConfig& cfg, StepStats& stats)
      : sys_(sys), cfg_(cfg), stats_(stats), n_(sys.dimension()) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &tmp_, &err_}) v->assign(n_, 0.0);
  }

  void reset(std::span<const double> y, std::span<const double> f0) override {
    y_.assign(y.begin(), y.end());
    k1_.assign(f0.begin(), f0.end());
  }

  double order() const override { return 5.0; }

  Attempt attempt(double h) override {
    using namespace dp;
    Attempt out;
    out.y_new.assign(n_, 0.0);
    out.f_new.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y_[i] + h * a21 * k1_[i];
    sys_.derivative(tmp_, k2_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    sys_.derivative(tmp_, k3_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    sys_.derivative(tmp_, k4_);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    sys_.derivative(tmp_, k5_);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    sys_.derivative(tmp_, k6_);
    for (std::size_t i = 0; i < n_; ++i)
      out.y_new[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    sys_.derivative(out.y_new, out.f_new);
    stats_.rhs_evaluations += 6;
    const std::vector<double>& k7 = out.f_new;
    for (std::size_t i = 0; i < n_; ++i)
      err_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7[i]);
    score(out, y_, err_, cfg_);
    if (!out.finite) return out;

    out.poly.resize(n_ * kDenseCoefficients);
    for (std::size_t i = 0; i < n_; ++i) {
      const double ydiff = out.y_new[i] - y_[i];
      const double bspl = h * k1_[i] - ydiff;
      const double r5 =
          h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7[i]);
      const auto p = dopri_poly(y_[i], ydiff, bspl, ydiff - h * k7[i] - bspl, r5);
      std::copy(p.begin(), p.end(), out.poly.begin() + i * kDenseCoefficients);
    }
    return out;
  }

 private:
  const OdeSystem& sys_;
  const IntegratorConfig& cfg_;
  StepStats& stats_;
  std::size_t n_;
  std::vector<double> y_, k1_, k2_, k3_, k4_, k5_, k6_, tmp_, err_;
};

// Extrapolated linearly implicit Euler. Sub-step counts are even so that the
// midpoint of every sub-integration is available and can be extrapolated
// with the same tableau.
class LinearlyImplicitExtrapolation final : public Stepper {
 public:
  static constexpr std::array<int, 6> kSequence = {2, 4, 6, 8, 10, 12};

  LinearlyImplicitExtrapolation(const OdeSystem& sys, const IntegratorConfig& cfg, StepStats& stats)
      : sys_(sys), cfg_(cfg), stats_(stats), n_(sys.dimension()), jac_(n_ * n_, 0.0) {}

  void reset(std::span<const double> y, std::span<const double> f0) override {
    y_.assign(y.begin(), y.end());
    f0_.assign(f0.begin(), f0.end());
    sys_.jacobian(y_, jac_);
  }

  double order() const override { return 6.0; }

  Attempt attempt(double h) override {
    constexpr std::size_t K = kSequence.size();
    const Eigen::Index n = static_cast<Eigen::Index>(n_);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> jac(jac_.data(), n, n);
    const Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(y_.data(), n);
    const Eigen::VectorXd f0 = Eigen::Map<const Eigen::VectorXd>(f0_.data(), n);

    std::array<std::vector<Eigen::VectorXd>, K> end_tab, mid_tab;
    std::vector<double> z(n_), fz(n_);
    Attempt out;
    for (std::size_t row = 0; row < K; ++row) {
      const int steps = kSequence[row];
      const double hs = h / steps;
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - hs * jac;
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
      Eigen::VectorXd state = y0;
      Eigen::VectorXd mid;
      for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd rhs;
        if (s == 0) {
          rhs = hs * f0;
        } else {
          Eigen::Map<Eigen::VectorXd>(z.data(), n) = state;
          sys_.derivative(z, fz);
          ++stats_.rhs_evaluations;
          rhs = hs * Eigen::Map<const Eigen::VectorXd>(fz.data(), n);
        }
        state += lu.solve(rhs);
        if (!state.allFinite()) {
          out.finite = false;
          out.error = std::numeric_limits<double>::infinity();
          out.y_new.assign(n_, 0.0);
          out.worst = worst_component(state);
          return out;
        }
        if (s + 1 == steps / 2) mid = state;
      }
      end_tab[row].push_back(state);
      mid_tab[row].push_back(mid);
      for (std::size_t k = 1; k <= row; ++k) {
        const double ratio = static_cast<double>(kSequence[row]) / kSequence[row - k] - 1.0;
        end_tab[row].push_back(end_tab[row][k - 1] + (end_tab[row][k - 1] - end_tab[row - 1][k - 1]) / ratio);
        mid_tab[row].push_back(mid_tab[row][k - 1] + (mid_tab[row][k - 1] - mid_tab[row - 1][k - 1]) / ratio);
      }
    }
    const Eigen::VectorXd& y1 = end_tab[K - 1][K - 1];
    const Eigen::VectorXd& ym = mid_tab[K - 1][K - 1];
    const Eigen::VectorXd err = y1 - end_tab[K - 1][K - 2];

    out.y_new.assign(y1.data(), y1.data() + n);
    std::vector<double> e(err.data(), err.data() + n);
    score(out, y_, e, cfg_);
    if (!out.finite) return out;

    std::vector<double> ymid(ym.data(), ym.data() + n), fmid(n_);
    out.f_new.assign(n_, 0.0);
    sys_.derivative(ymid, fmid);
    sys_.derivative(out.y_new, out.f_new);
    stats_.rhs_evaluations += 2;
    out.poly.resize(n_ * kDenseCoefficients);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto p = hermite_quintic(y_[i], ymid[i], out.y_new[i], h * f0_[i], h * fmid[i], h * out.f_new[i]);
      std::copy(p.begin(), p.end(), out.poly.begin() + i * kDenseCoefficients);
    }
    return out;
  }

 private:
  static std::size_t worst_component(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!std::isfinite(v[i])) return static_cast<std::size_t>(i);
    return 0;
  }

  const OdeSystem& sys_;
  const IntegratorConfig& cfg_;
  StepStats& stats_;
  std::size_t n_;
  std::vector<double> y_, f0_, jac_;
};

std::unique_ptr<Stepper> make_stepper(const OdeSystem& sys, const IntegratorConfig& cfg, StepStats& stats) {
  if (cfg.scheme == Scheme::linearly_implicit)
    return std::make_unique<LinearlyImplicitExtrapolation>(sys, cfg, stats);
  return std::make_unique<DormandPrince>(sys, cfg, stats);
}

}  // namespace

Trajectory integrate(const OdeSystem& system, const ShellState& initial, TimeSpan span,
                     const IntegratorConfig& config, std::span<const Watch> watch) {
  config.validate();
  validate(initial);
  if (initial.coeffs.size() != system.dimension())
    throw ConfigurationError("initial state has " + std::to_string(initial.coeffs.size()) +
                             " entries, system expects " + std::to_string(system.dimension()));
  if (!(span.end > span.start) || !std::isfinite(span.start) || !std::isfinite(span.end))
    throw ConfigurationError("time span must be a nonempty finite interval");

  const std::size_t n = system.dimension();
  Trajectory traj(initial.kind, n);
  traj.start(span.start, initial.coeffs);
  StepStats& stats = traj.stats();

  const bool nonnegative =
      std::all_of(initial.coeffs.begin(), initial.coeffs.end(), [](double v) { return v >= 0.0; });
  const PositivityMode positivity = nonnegative ? config.positivity_mode : PositivityMode::off;

  std::vector<double> y = initial.coeffs;
  std::vector<double> f(n);
  system.derivative(y, f);
  ++stats.rhs_evaluations;

  auto stepper = make_stepper(system, config, stats);
  stepper->reset(y, f);

  double t = span.start;
  double h = std::min({config.dt_init, config.dt_max, span.end - span.start});
  bool last_rejected = false;
  std::size_t attempts = 0;

  while (t < span.end) {
    if (attempts >= config.max_steps) {
      traj.set_status(IntegrationStatus::budget_exhausted);
      break;
    }
    ++attempts;
    const double remaining = span.end - t;
    const bool final_step = h >= remaining;
    if (final_step) h = remaining;

    Attempt step = stepper->attempt(h);

    if (!std::isfinite(step.error)) step.finite = false;
    bool accept = step.finite && step.error <= 1.0;
    std::size_t limiting = step.worst;
    double shrink = 0.25;
    if (step.finite) {
      shrink = std::clamp(0.9 * std::pow(std::max(step.error, 1e-16), -1.0 / stepper->order()), 0.2, 5.0);
    }

    bool clamped = false;
    if (accept && positivity != PositivityMode::off) {
      double most_negative = 0.0;
      std::size_t where = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (step.y_new[i] < most_negative) {
          most_negative = step.y_new[i];
          where = i;
        }
      }
      if (positivity == PositivityMode::reject_step && most_negative < -config.abs_tol) {
        accept = false;
        limiting = where;
        shrink = 0.5;
        ++stats.positivity_rejections;
      } else if (most_negative < 0.0) {
        for (double& v : step.y_new) {
          if (v < 0.0) v = 0.0;
        }
        clamped = true;
      }
    }

    if (!accept) {
      ++stats.rejected;
      h *= std::min(shrink, 1.0);
      last_rejected = true;
      if (h < config.dt_min && h < span.end - t) throw StiffnessError(t, h, static_cast<int>(limiting));
      continue;
    }

    const double t_new = final_step ? span.end : t + h;
    traj.append(t_new, step.y_new, step.poly);
    ++stats.accepted;
    const SegmentView seg = traj.segment(traj.segment_count() - 1);
    for (const Watch& w : watch) {
      if (auto ev = detect_crossing(seg, w.shell, w.threshold)) traj.add_event(*ev);
    }

    y = std::move(step.y_new);
    if (clamped) {
      system.derivative(y, f);
      ++stats.rhs_evaluations;
    } else {
      f = std::move(step.f_new);
    }
    stepper->reset(y, f);
    t = t_new;
    const double grow = last_rejected ? std::min(shrink, 1.0) : shrink;
    h = std::min(h * grow, config.dt_max);
    last_rejected = false;
  }
  return traj;
}

}  // namespace dyadic
