#include "dyadic/core.hpp"

#include <cmath>
#include <string>

#include "dyadic/error.hpp"

namespace dyadic {

void OdeSystem::jacobian(std::span<const double> y, std::span<double> jac) const {
  const std::size_t n = dimension();
  std::vector<double> base(n), shifted(n), probe(y.begin(), y.end());
  derivative(y, base);
  for (std::size_t k = 0; k < n; ++k) {
    const double h = 1e-7 * std::max(1.0, std::abs(y[k]));
    probe[k] = y[k] + h;
    derivative(probe, shifted);
    probe[k] = y[k];
    for (std::size_t i = 0; i < n; ++i) jac[i * n + k] = (shifted[i] - base[i]) / h;
  }
}

ModelParams::ModelParams(double lambda_base, double theta) : lambda_(lambda_base), theta_(theta) {
  if (!(lambda_base > 1.0) || !std::isfinite(lambda_base))
    throw ConfigurationError("lambda_base must be a finite number > 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigurationError("theta must be a finite number > 0");
  gamma_ = std::pow(lambda_, kCascadeExponent - 3.0 * theta_);
}

double ModelParams::wavenumber(int j) const { return std::pow(lambda_, static_cast<double>(j)); }

std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::a: return "a";
    case VariableKind::c: return "c";
    case VariableKind::b: return "b";
  }
  return "a";
}

VariableKind parse_variable_kind(std::string_view text) {
  if (text == "a") return VariableKind::a;
  if (text == "c") return VariableKind::c;
  if (text == "b") return VariableKind::b;
  throw ValidationError("unknown variable kind '" + std::string(text) + "'");
}

ShellState ShellState::zeros(int truncation, VariableKind kind, double t) {
  if (truncation < 0) throw ConfigurationError("truncation must be >= 0");
  return ShellState(t, std::vector<double>(static_cast<std::size_t>(truncation) + 1, 0.0), kind);
}

void validate(const ShellState& state) {
  if (state.coeffs.empty()) throw ValidationError("shell state has no coefficients");
  if (!std::isfinite(state.time)) throw ValidationError("shell state time is not finite");
  for (std::size_t j = 0; j < state.coeffs.size(); ++j) {
    if (!std::isfinite(state.coeffs[j]))
      throw ValidationError("shell " + std::to_string(j) + " amplitude is not finite");
  }
  if (state.coeffs[0] != 0.0) throw ValidationError("shell 0 amplitude must be exactly zero");
}

void GalerkinSpec::validate() const {
  if (order < 1) throw ConfigurationError("Galerkin order must be >= 1");
  if (!(damping_theta > 0.0) || !std::isfinite(damping_theta))
    throw ConfigurationError("Galerkin damping_theta must be > 0");
}

double GalerkinSpec::damping(double lambda_base) const {
  return std::pow(lambda_base, kCascadeExponent - 2.0 * damping_theta) *
         std::pow(lambda_base, (kCascadeExponent - damping_theta) * order);
}

namespace {

void require_kind(const ShellState& state, VariableKind expected) {
  if (state.kind != expected)
    throw ValidationError("expected " + std::string(to_string(expected)) + "-variables, got " +
                          std::string(to_string(state.kind)) + "-variables");
}

}  // namespace

ShellSystem::ShellSystem(std::vector<double> gain, std::vector<double> drain, VariableKind kind)
    : gain_(std::move(gain)), drain_(std::move(drain)), kind_(kind) {}

ShellSystem ShellSystem::dyadic(const ModelParams& params, int truncation) {
  if (truncation < 1) throw ConfigurationError("truncation must be >= 1");
  const auto n = static_cast<std::size_t>(truncation) + 1;
  std::vector<double> gain(n, 0.0), drain(n, 0.0);
  const double lambda = params.lambda_base();
  for (int j = 1; j <= truncation; ++j) {
    gain[j] = std::pow(lambda, kCascadeExponent * (j - 1));
    drain[j] = std::pow(lambda, kCascadeExponent * j);
  }
  return ShellSystem(std::move(gain), std::move(drain), VariableKind::a);
}

ShellSystem ShellSystem::galerkin_flux(const ModelParams& params, const GalerkinSpec& spec) {
  spec.validate();
  ShellSystem sys = dyadic(params, spec.order);
  sys.damped_ = true;
  sys.damping_ = spec.damping(params.lambda_base());
  return sys;
}

ShellSystem ShellSystem::c_form(const ModelParams& params, int truncation) {
  if (truncation < 1) throw ConfigurationError("truncation must be >= 1");
  const auto n = static_cast<std::size_t>(truncation) + 1;
  std::vector<double> gain(n, 0.0), drain(n, 0.0);
  const double rate_exp = kCascadeExponent - params.theta();
  for (int j = 1; j <= truncation; ++j) {
    gain[j] = std::pow(params.lambda_base(), rate_exp * j);
    drain[j] = gain[j] * params.gamma();
  }
  return ShellSystem(std::move(gain), std::move(drain), VariableKind::c);
}

ShellSystem ShellSystem::b_form(const ModelParams& params, int truncation, int pivot,
                                BRateConvention convention) {
  if (truncation < 1) throw ConfigurationError("truncation must be >= 1");
  if (pivot < 1 || pivot > truncation)
    throw ConfigurationError("pivot shell " + std::to_string(pivot) + " outside 1.." + std::to_string(truncation));
  const auto n = static_cast<std::size_t>(truncation) + 1;
  std::vector<double> gain(n, 0.0), drain(n, 0.0);
  const double sign = convention == BRateConvention::unit_pivot ? 1.0 : -1.0;
  const double rate_exp = sign * (kCascadeExponent - params.theta());
  for (int j = 1; j <= truncation; ++j) {
    gain[j] = std::pow(params.lambda_base(), rate_exp * (j - pivot));
    drain[j] = gain[j] * params.gamma();
  }
  return ShellSystem(std::move(gain), std::move(drain), VariableKind::b);
}

void ShellSystem::derivative(std::span<const double> y, std::span<double> dy) const {
  const std::size_t n = gain_.size();
  dy[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double next = j + 1 < n ? y[j + 1] : 0.0;
    dy[j] = gain_[j] * y[j - 1] * y[j - 1] - drain_[j] * y[j] * next;
  }
  if (damped_) {
    const std::size_t last = n - 1;
    dy[last] = gain_[last] * y[last - 1] * y[last - 1] - damping_ * y[last];
  }
}

void ShellSystem::jacobian(std::span<const double> y, std::span<double> jac) const {
  const std::size_t n = gain_.size();
  std::fill(jac.begin(), jac.end(), 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double* row = jac.data() + j * n;
    row[j - 1] = 2.0 * gain_[j] * y[j - 1];
    if (damped_ && j == n - 1) {
      row[j] = -damping_;
    } else if (j + 1 < n) {
      row[j] = -drain_[j] * y[j + 1];
      row[j + 1] = -drain_[j] * y[j];
    }
  }
}

std::vector<double> ShellSystem::evaluate(const ShellState& state) const {
  validate(state);
  if (state.kind != kind_) require_kind(state, kind_);
  if (state.truncation() != truncation())
    throw ConfigurationError("state truncation " + std::to_string(state.truncation()) +
                             " does not match system truncation " + std::to_string(truncation()));
  std::vector<double> dy(dimension());
  derivative(state.coeffs, dy);
  return dy;
}

namespace {

std::vector<double> truncated_rhs(const ShellState& state, const ShellSystem& sys) {
  // N = 0 leaves nothing to evolve
  if (state.truncation() == 0) return {0.0};
  return sys.evaluate(state);
}

}  // namespace

std::vector<double> rhs_dyadic(const ShellState& state, const ModelParams& params) {
  validate(state);
  require_kind(state, VariableKind::a);
  if (state.truncation() == 0) return {0.0};
  return truncated_rhs(state, ShellSystem::dyadic(params, state.truncation()));
}

std::vector<double> rhs_galerkin_flux(const ShellState& state, const ModelParams& params,
                                      const GalerkinSpec& spec) {
  spec.validate();
  validate(state);
  require_kind(state, VariableKind::a);
  if (state.truncation() != spec.order)
    throw ConfigurationError("state truncation " + std::to_string(state.truncation()) +
                             " differs from Galerkin order " + std::to_string(spec.order));
  return ShellSystem::galerkin_flux(params, spec).evaluate(state);
}

std::vector<double> rhs_c(const ShellState& state, const ModelParams& params) {
  validate(state);
  require_kind(state, VariableKind::c);
  if (state.truncation() == 0) return {0.0};
  return ShellSystem::c_form(params, state.truncation()).evaluate(state);
}

std::vector<double> rhs_b(const ShellState& state, const ModelParams& params, int pivot,
                          BRateConvention convention) {
  validate(state);
  require_kind(state, VariableKind::b);
  return ShellSystem::b_form(params, state.truncation(), pivot, convention).evaluate(state);
}

namespace {

ShellState convert(const ShellState& state, const ModelParams& params, double direction, VariableKind to) {
  ShellState out = state;
  out.kind = to;
  const double lambda = params.lambda_base();
  const double theta = params.theta();
  for (std::size_t j = 1; j < out.coeffs.size(); ++j) {
    const double factor = std::pow(lambda, 2.0 * theta - kCascadeExponent + theta * static_cast<double>(j));
    out.coeffs[j] = direction > 0 ? state.coeffs[j] * factor : state.coeffs[j] / factor;
  }
  return out;
}

}  // namespace

ShellState a_to_c(const ShellState& state, const ModelParams& params) {
  validate(state);
  require_kind(state, VariableKind::a);
  return convert(state, params, 1.0, VariableKind::c);
}

ShellState c_to_a(const ShellState& state, const ModelParams& params) {
  validate(state);
  require_kind(state, VariableKind::c);
  return convert(state, params, -1.0, VariableKind::a);
}

ShellState rescale(const ShellState& state, const ScalingMap& map) {
  if (!(map.eta > 0.0) || !std::isfinite(map.eta)) throw ConfigurationError("scaling factor eta must be > 0");
  validate(state);
  ShellState out = state;
  out.time = state.time / map.eta;
  for (double& v : out.coeffs) v *= map.eta;
  return out;
}

double energy(std::span<const double> coeffs) {
  double sum = 0.0;
  for (double v : coeffs) sum += v * v;
  return sum;
}

double energy(const ShellState& state) { return energy(state.coeffs); }

}  // namespace dyadic
