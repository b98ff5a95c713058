#pragma once

#include <functional>

namespace oprelay {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;  ///< sum of per-interval |K15 - G7| estimates
  int evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-9;
  double rel_tol = 0.0;
  int max_intervals = 2000;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b]
/// (finite bounds). The interval with the largest error estimate is bisected
/// until the total estimate meets max(abs_tol, rel_tol * |value|) or the
/// interval budget runs out; `converged` reports which. f is never evaluated
/// at the endpoints.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& options = {});

}  // namespace oprelay
