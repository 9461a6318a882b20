#pragma once

#include <functional>

namespace dyadic {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature. The interval with
/// the largest |K15 - G7| is bisected until the summed estimate is below
/// abs_tol. Throws QuadratureError when max_intervals is reached first.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    int max_intervals = 5000);

/// Composite Simpson rule, doubling the panel count until successive
/// estimates agree to rel_tol (or abs_floor). Returns the finest estimate.
double integrate_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                         double abs_floor = 0.0, int max_doublings = 12);

}  // namespace dyadic
