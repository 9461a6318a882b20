#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dyadic/ode_system.hpp"

namespace dyadic {

inline constexpr double kCascadeExponent = 2.5;

/// Wavenumber ladder lambda_j = lambda^j and regularity exponent theta.
class ModelParams {
 public:
  ModelParams() : ModelParams(2.0, 0.6) {}
  ModelParams(double lambda_base, double theta);

  double lambda_base() const { return lambda_; }
  double cascade_exponent() const { return kCascadeExponent; }
  double theta() const { return theta_; }
  /// gamma = lambda^(5/2 - 3 theta)
  double gamma() const { return gamma_; }
  /// lambda_j = lambda^j; j may be negative.
  double wavenumber(int j) const;

  bool operator==(const ModelParams&) const = default;

 private:
  double lambda_;
  double theta_;
  double gamma_;
};

enum class VariableKind { a, c, b };

std::string_view to_string(VariableKind kind);
VariableKind parse_variable_kind(std::string_view text);

/// Shell amplitudes at one instant. coeffs[0] is the identically-zero
/// shell; coeffs.size() - 1 is the truncation N.
struct ShellState {
  double time = 0.0;
  std::vector<double> coeffs{0.0};
  VariableKind kind = VariableKind::a;

  ShellState() = default;
  ShellState(double t, std::vector<double> values, VariableKind k = VariableKind::a)
      : time(t), coeffs(std::move(values)), kind(k) {}

  int truncation() const { return static_cast<int>(coeffs.size()) - 1; }

  static ShellState zeros(int truncation, VariableKind kind = VariableKind::a, double t = 0.0);

  bool operator==(const ShellState&) const = default;
};

/// Throws ValidationError unless every entry is finite and coeffs[0] == 0.
void validate(const ShellState& state);

struct GalerkinSpec {
  int order = 12;
  double damping_theta = 0.6;

  void validate() const;
  /// lambda^(5/2 - 2 theta) lambda_n^(5/2 - theta)
  double damping(double lambda_base) const;
};

struct ScalingMap {
  double eta = 1.0;
};

/// Rate factor convention for the pivot-rescaled b-variables. unit_pivot gives
/// shell j the factor lambda_{j-n}^(5/2-theta): shell n has unit rate and
/// n+1 is fast. inverted uses lambda_{j-n}^(theta-5/2).
enum class BRateConvention { unit_pivot, inverted };

// Right-hand sides. Shells above the truncation are zero.
std::vector<double> rhs_dyadic(const ShellState& state, const ModelParams& params);
std::vector<double> rhs_galerkin_flux(const ShellState& state, const ModelParams& params,
                                      const GalerkinSpec& spec);
std::vector<double> rhs_c(const ShellState& state, const ModelParams& params);
std::vector<double> rhs_b(const ShellState& state, const ModelParams& params, int pivot,
                          BRateConvention convention = BRateConvention::unit_pivot);

/// c_j = lambda^(2 theta - 5/2) lambda_j^theta a_j
ShellState a_to_c(const ShellState& state, const ModelParams& params);
ShellState c_to_a(const ShellState& state, const ModelParams& params);

/// Amplitudes times eta; time becomes t / eta so that the rescaled solution
/// at t equals eta * a(eta t).
ShellState rescale(const ShellState& state, const ScalingMap& map);

/// Sum of squared amplitudes, |a|^2.
double energy(const ShellState& state);
double energy(std::span<const double> coeffs);

/// Nearest-neighbour quadratic shell system
///
///   y_j' = p_j y_{j-1}^2 - q_j y_j y_{j+1},   j = 1..N,  y_0 = y_{N+1} = 0,
///
/// optionally with the last drain replaced by a linear damping -D y_N. Every
/// form of the model (a, Galerkin-with-flux, c, b) is an instance; the
/// coefficient tables are computed once at construction.
class ShellSystem final : public OdeSystem {
 public:
  static ShellSystem dyadic(const ModelParams& params, int truncation);
  static ShellSystem galerkin_flux(const ModelParams& params, const GalerkinSpec& spec);
  static ShellSystem c_form(const ModelParams& params, int truncation);
  static ShellSystem b_form(const ModelParams& params, int truncation, int pivot,
                            BRateConvention convention = BRateConvention::unit_pivot);

  std::size_t dimension() const override { return gain_.size(); }
  int truncation() const { return static_cast<int>(gain_.size()) - 1; }
  VariableKind kind() const { return kind_; }
  bool has_damping() const { return damped_; }
  double damping() const { return damping_; }
  std::span<const double> gain() const { return gain_; }
  std::span<const double> drain() const { return drain_; }

  void derivative(std::span<const double> y, std::span<double> dy) const override;
  void jacobian(std::span<const double> y, std::span<double> jac) const override;

  std::vector<double> evaluate(const ShellState& state) const;

 private:
  ShellSystem(std::vector<double> gain, std::vector<double> drain, VariableKind kind);

  std::vector<double> gain_;   // p_j
  std::vector<double> drain_;  // q_j
  VariableKind kind_;
  bool damped_ = false;
  double damping_ = 0.0;
};

}  // namespace dyadic
