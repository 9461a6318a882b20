#pragma once

#include <cstddef>
#include <span>

namespace dyadic {

/// Autonomous ODE system y' = f(y) as seen by the integrators.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;

  virtual std::size_t dimension() const = 0;
  virtual void derivative(std::span<const double> y, std::span<double> dy) const = 0;

  /// Row-major dense Jacobian df/dy. The default uses forward differences;
  /// shell systems override it with the exact tridiagonal form.
  virtual void jacobian(std::span<const double> y, std::span<double> jac) const;
};

}  // namespace dyadic
