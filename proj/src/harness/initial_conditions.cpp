#include "dyadic/harness/initial_conditions.hpp"

#include <cmath>

#include "dyadic/certificate.hpp"
#include "dyadic/error.hpp"

namespace dyadic::harness {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

ShellState make_initial_state(const InitialConditionSpec& spec, const ModelParams& model, int truncation,
                              std::uint64_t seed) {
  if (truncation < 1) throw ConfigurationError("initial data need at least one shell");
  ShellState s = ShellState::zeros(truncation);
  const double lambda = model.lambda_base();
  SplitMix64 rng(seed);
  switch (spec.family) {
    case IcFamily::geometric:
      for (int j = 1; j <= truncation; ++j) s.coeffs[j] = spec.amplitude * std::pow(lambda, -spec.decay * j);
      break;
    case IcFamily::single:
      if (spec.shell < 1 || spec.shell > truncation) throw ConfigurationError("single: shell outside 1..N");
      s.coeffs[spec.shell] = spec.amplitude;
      break;
    case IcFamily::random:
      for (int j = 1; j <= truncation; ++j) s.coeffs[j] = rng.uniform() * std::pow(lambda, -spec.decay * j);
      break;
    case IcFamily::delta_ball: {
      if (!spec.delta) throw ConfigurationError("delta-ball: delta not resolved");
      const double theta = model.theta();
      const double front = *spec.delta * std::pow(lambda, kCascadeExponent - 2.0 * theta);
      for (int j = 1; j <= truncation; ++j) {
        const double v = spec.profile == BallProfile::unit ? 1.0 : rng.uniform();
        s.coeffs[j] = front * std::pow(model.wavenumber(j), -theta) * v;
      }
      break;
    }
  }
  return s;
}

double resolved_delta(const RunConfig& config) {
  if (config.ic.delta) return *config.ic.delta;
  const CertificateParams p = config.certificate_params();
  if (p.delta) return *p.delta;
  DeltaSearch search = find_delta(p.k, p.theta, p.B_target, p.lambda);
  if (!search.feasible) search = find_delta(p.k, p.theta, search.B_limit - p.fallback_slack, p.lambda);
  return search.delta_star;
}

ShellState initial_state(const RunConfig& config) {
  InitialConditionSpec spec = config.ic;
  if (spec.family == IcFamily::delta_ball) spec.delta = resolved_delta(config);
  return make_initial_state(spec, config.model, config.galerkin.order, config.seed);
}

}  // namespace dyadic::harness
