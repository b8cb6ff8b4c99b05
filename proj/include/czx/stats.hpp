#pragma once

#include <span>
#include <vector>

namespace czx {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y ~ slope * x + intercept.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Slope of log(y) against log(x) with the given number of points dropped from
// each end of the (already ordered) sweep.
double loglog_slope(std::span<const double> x, std::span<const double> y, std::size_t trim = 0);

double max_of(std::span<const double> v);

}  // namespace czx
