#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/certificate.hpp"
#include "dyadic/core.hpp"
#include "dyadic/diagnostics.hpp"
#include "dyadic/integrator.hpp"

namespace dyadic::harness {

enum class Scenario { simulate, regularity, decay, scaling, energy_balance, onsager, galerkin_convergence, certificate };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

/// flux: last shell drains through the linear damping term; plain: a_{N+1} = 0.
enum class Closure { flux, plain };

std::string_view to_string(Closure closure);

enum class IcFamily { geometric, single, random, delta_ball };

std::string_view to_string(IcFamily family);
IcFamily parse_ic_family(std::string_view text);

/// v_j profile of the delta-ball family.
enum class BallProfile { random, unit };

struct InitialConditionSpec {
  IcFamily family = IcFamily::geometric;
  double amplitude = 1.0;  // A
  double decay = 1.0;      // s
  int shell = 1;           // j0 of single
  /// delta-ball radius; unset means delta* from the certificate search.
  std::optional<double> delta;
  BallProfile profile = BallProfile::random;
};

struct DiagnosticsSettings {
  double theta = 0.6;
  std::vector<double> sobolev;
  std::vector<int> flux_shells{3, 5, 8};
  FitWindow fit_window;
  FitSampling fit_sampling = FitSampling::geometric;
  std::size_t fit_samples = 128;
};

struct ScalingSettings {
  double eta = 2.0;
  std::size_t grid_points = 41;
};

struct ConvergenceSettings {
  std::vector<int> orders{8, 16, 32};
  std::vector<double> probe_times{0.1};
};

struct RunConfig {
  Scenario scenario = Scenario::simulate;
  std::uint64_t seed = 1;
  std::string outputs = "runs";
  TimeSpan t_span{0.0, 1.0};
  ModelParams model;
  GalerkinSpec galerkin;
  Closure closure = Closure::flux;
  InitialConditionSpec ic;
  IntegratorConfig integrator;
  DiagnosticsSettings diagnostics;
  ScalingSettings scaling;
  ConvergenceSettings convergence;
  /// theta and lambda are taken from the model section.
  CertificateParams certificate;

  CertificateParams certificate_params() const;
  DiagnosticsOptions diagnostics_options() const;
  /// Canonical key = value form listing every setting.
  std::string to_text() const;
  /// FNV-1a 64 of to_text(), as 16 hex digits.
  std::string digest() const;
  bool operator==(const RunConfig& other) const { return to_text() == other.to_text(); }
};

/// Parses the sectioned key = value format ([section] headers, # comments).
/// Missing keys keep their defaults. Throws ParseError naming line and key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Applies "section.key=value" (or "key=value" for top-level keys).
void apply_override(RunConfig& config, std::string_view assignment);

/// Whole-config checks (t_span, cross-section constraints).
void validate(const RunConfig& config);

}  // namespace dyadic::harness
