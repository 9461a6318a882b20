#pragma once

#include <cstdint>

#include "dyadic/core.hpp"
#include "dyadic/harness/config.hpp"

namespace dyadic::harness {

/// splitmix64. next() advances the state by 0x9E3779B97F4A7C15 and mixes;
/// uniform() returns (next() >> 11) * 2^-53 in [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();

 private:
  std::uint64_t state_;
};

/// a-variables on shells 0..truncation with a_0 = 0.
///   geometric   a_j = A lambda^(-s j)
///   single      a_{j0} = A
///   random      a_j = u_j lambda^(-s j)
///   delta-ball  a_j = delta lambda^(5/2 - 2 theta) lambda_j^(-theta) v_j
/// delta_ball needs spec.delta (resolve it first).
ShellState make_initial_state(const InitialConditionSpec& spec, const ModelParams& model, int truncation,
                              std::uint64_t seed);

/// make_initial_state with an unset delta replaced by delta* of the
/// certificate search for the config.
ShellState initial_state(const RunConfig& config);
double resolved_delta(const RunConfig& config);

}  // namespace dyadic::harness
