#pragma once

#include <functional>

namespace msnet {

struct QuadratureResult {
  double value;
  double error;  // estimated absolute error
};

/// Adaptive Simpson on [lo, hi] with Richardson correction.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  double abs_tol, int max_depth = 48);

/// Integral of a nonincreasing tail function over [x, inf).
///
/// Integrates over pieces of doubling width starting at x and stops once a
/// piece changes the running total by less than rel_tol (relative) and the tail
/// has fallen below 1e-16 * tail(x).
QuadratureResult integrate_tail_numeric(const std::function<double(double)>& tail, double x,
                                        double rel_tol = 1e-8);

}  // namespace msnet
