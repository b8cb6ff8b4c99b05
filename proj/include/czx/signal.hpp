#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "czx/lattice.hpp"

namespace czx {

// Piecewise-constant function on the cell grid. Values are cell averages,
// stored first-coordinate major: value(i1, i2) at i1 * side + i2.
class Signal2D {
 public:
  Signal2D() = default;
  explicit Signal2D(GridGeometry g);  // zero signal
  Signal2D(GridGeometry g, std::vector<double> values);

  static Signal2D constant(GridGeometry g, double c);
  // Samples fn at cell centres.
  static Signal2D sample(GridGeometry g, const std::function<double(double, double)>& fn);
  static Signal2D generate(GridGeometry g,
                           const std::function<double(std::int64_t, std::int64_t)>& fn);
  static Signal2D indicator(GridGeometry g, const Lattice2D& lattice, const DyadicRect& R);

  const GridGeometry& geometry() const { return geometry_; }
  int n() const { return geometry_.n; }
  std::int64_t side() const { return geometry_.side(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator()(std::int64_t i1, std::int64_t i2) const { return values_[geometry_.flat(i1, i2)]; }
  double operator[](std::size_t k) const { return values_[k]; }

  double integral() const;
  double mean() const { return integral(); }  // |domain| = 1
  double norm(double p = 2.0) const;
  double max_abs() const;

  Signal2D map(const std::function<double(double)>& fn) const;
  Signal2D abs() const;
  Signal2D operator-() const;
  Signal2D& operator+=(const Signal2D& o);
  Signal2D& operator-=(const Signal2D& o);
  Signal2D& operator*=(double s);

  std::vector<double> release() && { return std::move(values_); }

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

Signal2D operator+(Signal2D a, const Signal2D& b);
Signal2D operator-(Signal2D a, const Signal2D& b);
Signal2D operator*(Signal2D a, double s);
Signal2D operator*(double s, Signal2D a);
// Pointwise product.
Signal2D operator*(const Signal2D& a, const Signal2D& b);

// L^2 pairing: sum over cells times the cell area.
double inner(const Signal2D& a, const Signal2D& b);
double max_abs_difference(const Signal2D& a, const Signal2D& b);

// Random test functions built at a coarse resolution and refined to the grid,
// so the same seed gives the same function at every n >= coarse_n.
Signal2D random_signal(GridGeometry g, Rng& rng, int coarse_n = 4);
Signal2D random_positive_signal(GridGeometry g, Rng& rng, int coarse_n = 4);
Signal2D random_mean_zero_signal(GridGeometry g, Rng& rng, int coarse_n = 4);
// log|x - x0| sampled at cell centres: an unbounded BMO function.
Signal2D log_signal(GridGeometry g, double x0, double y0);

}  // namespace czx
