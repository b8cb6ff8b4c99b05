#pragma once

#include <functional>
#include <vector>

namespace czx {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Integrals of g(u) with a possible integrable singularity at u = 0. The
// integrand always receives u itself, so arguments near the singular end keep
// full relative precision.
QuadratureResult integrate_from_zero(const std::function<double(double)>& g, double length,
                                     double tol = 1e-10);
QuadratureResult integrate_half_line(const std::function<double(double)>& g, double tol = 1e-10);

// Integral of f over [lo, hi] (either end may be infinite) split at the given
// breakpoints; every piece is integrated in the offset from its nearer
// breakpoint, with f called as f(base, offset) where y = base + offset.
// Convergence is judged relative to the sum of |pieces|; an error estimate
// below abs_tol is always accepted (for inner integrals of a nested rule).
QuadratureResult integrate_piecewise(const std::function<double(double, double)>& f, double lo, double hi,
                                     std::vector<double> breakpoints, double tol = 1e-10, double abs_tol = 0.0);

}  // namespace czx
