#include "czx/signal.hpp"

#include <algorithm>
#include <cmath>

#include "czx/errors.hpp"

namespace czx {

Signal2D::Signal2D(GridGeometry g) : geometry_(g), values_(g.cells(), 0.0) {}

Signal2D::Signal2D(GridGeometry g, std::vector<double> values)
    : geometry_(g), values_(std::move(values)) {
  require(values_.size() == g.cells(), "signal value count does not match the grid");
}

Signal2D Signal2D::constant(GridGeometry g, double c) {
  return Signal2D(g, std::vector<double>(g.cells(), c));
}

Signal2D Signal2D::sample(GridGeometry g, const std::function<double(double, double)>& fn) {
  std::vector<double> v(g.cells());
  for (std::int64_t i1 = 0; i1 < g.side(); ++i1)
    for (std::int64_t i2 = 0; i2 < g.side(); ++i2) v[g.flat(i1, i2)] = fn(g.center(i1), g.center(i2));
  return Signal2D(g, std::move(v));
}

Signal2D Signal2D::generate(GridGeometry g,
                            const std::function<double(std::int64_t, std::int64_t)>& fn) {
  std::vector<double> v(g.cells());
  for (std::int64_t i1 = 0; i1 < g.side(); ++i1)
    for (std::int64_t i2 = 0; i2 < g.side(); ++i2) v[g.flat(i1, i2)] = fn(i1, i2);
  return Signal2D(g, std::move(v));
}

Signal2D Signal2D::indicator(GridGeometry g, const Lattice2D& lattice, const DyadicRect& R) {
  require(lattice.n() == g.n, "lattice and grid resolutions differ");
  return generate(g, [&](std::int64_t i1, std::int64_t i2) {
    return lattice.contains_cell(R, i1, i2) ? 1.0 : 0.0;
  });
}

double Signal2D::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * geometry_.cell_area();
}

double Signal2D::norm(double p) const {
  require(p >= 1.0, "norm exponent must be >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (double v : values_) s += v * v;
    return std::sqrt(s * geometry_.cell_area());
  }
  for (double v : values_) s += std::pow(std::abs(v), p);
  return std::pow(s * geometry_.cell_area(), 1.0 / p);
}

double Signal2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Signal2D Signal2D::map(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), fn);
  return Signal2D(geometry_, std::move(v));
}

Signal2D Signal2D::abs() const {
  return map([](double v) { return std::abs(v); });
}

Signal2D Signal2D::operator-() const { return map([](double v) { return -v; }); }

Signal2D& Signal2D::operator+=(const Signal2D& o) {
  require(geometry_ == o.geometry_, "signal geometries differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Signal2D& Signal2D::operator-=(const Signal2D& o) {
  require(geometry_ == o.geometry_, "signal geometries differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

Signal2D& Signal2D::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Signal2D operator+(Signal2D a, const Signal2D& b) { return a += b; }
Signal2D operator-(Signal2D a, const Signal2D& b) { return a -= b; }
Signal2D operator*(Signal2D a, double s) { return a *= s; }
Signal2D operator*(double s, Signal2D a) { return a *= s; }

Signal2D operator*(const Signal2D& a, const Signal2D& b) {
  require(a.geometry() == b.geometry(), "signal geometries differ");
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] * b[k];
  return Signal2D(a.geometry(), std::move(v));
}

double inner(const Signal2D& a, const Signal2D& b) {
  require(a.geometry() == b.geometry(), "signal geometries differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.geometry().cell_area();
}

double max_abs_difference(const Signal2D& a, const Signal2D& b) {
  require(a.geometry() == b.geometry(), "signal geometries differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

namespace {

Signal2D refine_coarse(GridGeometry g, Rng& rng, int coarse_n,
                       const std::function<double(Rng&)>& draw) {
  const int c = std::min(coarse_n, g.n);
  const std::int64_t cs = std::int64_t{1} << c;
  std::vector<double> coarse(static_cast<std::size_t>(cs * cs));
  for (double& v : coarse) v = draw(rng);
  const int shift = g.n - c;
  return Signal2D::generate(g, [&](std::int64_t i1, std::int64_t i2) {
    return coarse[static_cast<std::size_t>((i1 >> shift) * cs + (i2 >> shift))];
  });
}

}  // namespace

Signal2D random_signal(GridGeometry g, Rng& rng, int coarse_n) {
  return refine_coarse(g, rng, coarse_n, [](Rng& r) { return r.normal(); });
}

Signal2D random_positive_signal(GridGeometry g, Rng& rng, int coarse_n) {
  return refine_coarse(g, rng, coarse_n, [](Rng& r) { return r.uniform(0.05, 1.0); });
}

Signal2D random_mean_zero_signal(GridGeometry g, Rng& rng, int coarse_n) {
  Signal2D f = random_signal(g, rng, coarse_n);
  const double m = f.mean();
  return f.map([m](double v) { return v - m; });
}

Signal2D log_signal(GridGeometry g, double x0, double y0) {
  return Signal2D::sample(g, [&](double x, double y) {
    return 0.5 * std::log((x - x0) * (x - x0) + (y - y0) * (y - y0));
  });
}

}  // namespace czx
