#include "czx/stats.hpp"

#include <algorithm>
#include <cmath>

#include "czx/errors.hpp"

namespace czx {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "least_squares needs at least two paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require<NumericError>(sxx > 0, "least_squares: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double loglog_slope(std::span<const double> x, std::span<const double> y, std::size_t trim) {
  require(x.size() == y.size(), "loglog_slope: size mismatch");
  require(x.size() >= 2 * trim + 2, "loglog_slope: not enough points after trimming");
  std::vector<double> lx, ly;
  for (std::size_t i = trim; i + trim < x.size(); ++i) {
    require<NumericError>(x[i] > 0 && y[i] > 0, "loglog_slope: non-positive value");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly).slope;
}

double max_of(std::span<const double> v) {
  require(!v.empty(), "max_of: empty input");
  return *std::max_element(v.begin(), v.end());
}

}  // namespace czx
