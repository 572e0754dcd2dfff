#pragma once

#include <functional>

namespace raqr {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Throws ConvergenceError
// when the summed error estimate stays above max(abs_tol, rel_tol |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, double abs_tol = 0.0);

// Double-exponential quadrature on [a, b]; tolerates integrable endpoint
// singularities.
QuadratureResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol = 1e-12);

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a minimum of a unimodal function on [lo, hi].
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tol);

}  // namespace raqr
