#include "czx/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "czx/errors.hpp"

namespace czx {
namespace {

// The integrators precompute abscissa tables; one per thread is enough.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
  thread_local boost::math::quadrature::exp_sinh<double> rule;
  return rule;
}

// The error is judged against the given magnitude (the sum of |pieces| for a
// split integral), so negligible pieces do not need full relative accuracy.
void check(const QuadratureResult& r, double tol, double magnitude, double abs_tol = 0.0) {
  if (!std::isfinite(r.value))
    throw NumericError("quadrature produced a non-finite value");
  if (r.error <= abs_tol) return;
  const double scale = std::max(magnitude, 1e-300);
  if (r.error > 1e3 * tol * scale + 1e-300 && r.error > 1e-5 * scale)
    throw NumericError("quadrature did not converge");
}

QuadratureResult from_zero_raw(const std::function<double(double)>& g, double length, double tol) {
  // Two-argument form: xc = a - x (negative) near the left end and b - x
  // (positive) near the right end, including the midpoint.
  auto f = [&](double x, double xc) {
    const double u = xc < 0 ? -xc : x;
    return g(u > 0 ? u : std::numeric_limits<double>::denorm_min());
  };
  QuadratureResult r;
  double l1 = 0;
  r.value = tanh_sinh_rule().integrate(f, 0.0, length, tol, &r.error, &l1);
  return r;
}

QuadratureResult half_line_raw(const std::function<double(double)>& g, double tol) {
  QuadratureResult r;
  double l1 = 0;
  r.value = exp_sinh_rule().integrate(
      [&](double u) { return g(u > 0 ? u : std::numeric_limits<double>::denorm_min()); }, 0.0,
      std::numeric_limits<double>::infinity(), tol, &r.error, &l1);
  return r;
}

}  // namespace

QuadratureResult integrate_from_zero(const std::function<double(double)>& g, double length, double tol) {
  require(length > 0 && std::isfinite(length), "integration length must be positive and finite");
  const QuadratureResult r = from_zero_raw(g, length, tol);
  check(r, tol, std::abs(r.value));
  return r;
}

QuadratureResult integrate_half_line(const std::function<double(double)>& g, double tol) {
  const QuadratureResult r = half_line_raw(g, tol);
  check(r, tol, std::abs(r.value));
  return r;
}

QuadratureResult integrate_piecewise(const std::function<double(double, double)>& f, double lo, double hi,
                                     std::vector<double> breakpoints, double tol, double abs_tol) {
  require(lo < hi, "empty integration range");
  std::vector<double> pts;
  for (double b : breakpoints)
    if (b > lo && b < hi) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> nodes;
  nodes.push_back(lo);
  nodes.insert(nodes.end(), pts.begin(), pts.end());
  nodes.push_back(hi);

  QuadratureResult total;
  double magnitude = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i], b = nodes[i + 1];
    QuadratureResult piece;
    if (std::isinf(a) && std::isinf(b)) {
      throw ParameterError("integrate_piecewise: add a finite breakpoint for a doubly infinite range");
    } else if (std::isinf(b)) {
      piece = half_line_raw([&](double u) { return f(a, u); }, tol);
    } else if (std::isinf(a)) {
      piece = half_line_raw([&](double u) { return f(b, -u); }, tol);
    } else {
      const double h = 0.5 * (b - a);
      QuadratureResult left = from_zero_raw([&](double u) { return f(a, u); }, h, tol);
      QuadratureResult right = from_zero_raw([&](double u) { return f(b, -u); }, h, tol);
      piece.value = left.value + right.value;
      piece.error = left.error + right.error;
      magnitude += std::abs(left.value) + std::abs(right.value);
    }
    if (std::isinf(a) || std::isinf(b)) magnitude += std::abs(piece.value);
    total.value += piece.value;
    total.error += piece.error;
  }
  check(total, tol, magnitude, abs_tol);
  return total;
}

}  // namespace czx
