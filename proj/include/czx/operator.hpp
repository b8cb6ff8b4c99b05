#pragma once

#include <cstdint>
#include <vector>

#include "czx/kernel.hpp"
#include "czx/signal.hpp"

namespace czx {

// Half-open cell box [r0, r1) x [c0, c1).
struct CellBox {
  std::int64_t r0 = 0, r1 = 0, c0 = 0, c1 = 0;
  bool empty() const { return r0 >= r1 || c0 >= c1; }
  std::int64_t rows() const { return r1 - r0; }
  std::int64_t cols() const { return c1 - c0; }
  bool contains(std::int64_t i1, std::int64_t i2) const { return i1 >= r0 && i1 < r1 && i2 >= c0 && i2 < c1; }
  CellBox clipped(std::int64_t side) const;
};

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual const GridGeometry& geometry() const = 0;
  virtual Signal2D apply(const Signal2D& f) const = 0;
  virtual Signal2D apply_adjoint(const Signal2D& g) const = 0;
  // Values of T(f 1_src) on the cells of dst (row-major over dst). The default
  // applies the full operator; local operators override it.
  virtual std::vector<double> apply_local(const Signal2D& f, const CellBox& src, const CellBox& dst) const;
};

class ZeroOperator final : public LinearOperator {
 public:
  explicit ZeroOperator(GridGeometry g) : geometry_(g) {}
  const GridGeometry& geometry() const override { return geometry_; }
  Signal2D apply(const Signal2D&) const override { return Signal2D(geometry_); }
  Signal2D apply_adjoint(const Signal2D&) const override { return Signal2D(geometry_); }

 private:
  GridGeometry geometry_;
};

// Convolution with the bump kernel, discretised as the cell-average (Galerkin)
// operator: (Tf)_i = sum_j w1[i1-j1] w2[i2-j2] f_j with
// w[d] = integral of k(u) tri(u/h - d) du, exact for piecewise-constant f up to
// quadrature error. Box mode extends f by zero; torus mode is circular.
class BumpConvolution final : public LinearOperator {
 public:
  BumpConvolution(KernelSpec spec, GridGeometry g);

  const GridGeometry& geometry() const override { return geometry_; }
  const KernelSpec& spec() const { return spec_; }
  Signal2D apply(const Signal2D& f) const override;
  Signal2D apply_adjoint(const Signal2D& g) const override { return apply(g); }  // even kernel
  std::vector<double> apply_local(const Signal2D& f, const CellBox& src, const CellBox& dst) const override;

  // Weight for cell offset d (zero outside the support), including the prefactor on axis 0.
  double weight(int axis, std::int64_t d) const;
  std::int64_t half_width(int axis) const { return half_width_[static_cast<std::size_t>(axis)]; }
  // Sum of all weights: the discrete integral of K.
  double mass() const;

 private:
  static std::vector<double> galerkin_weights(double t, double h, std::int64_t W);

  KernelSpec spec_;
  GridGeometry geometry_;
  std::int64_t half_width_[2];
  std::vector<double> w_[2];         // index d + W
  std::vector<double> circular_[2];  // torus: weights folded modulo N
};

// Cell-average weights of the 1D bump (1/t) phi(u/t) on cells of width h,
// offsets -W..W with W = ceil(t/h).
std::vector<double> bump_galerkin_weights(double t, double h);

// [b, T]f = b T f - T(b f).
Signal2D commutator_apply(const Signal2D& b, const LinearOperator& T, const Signal2D& f);

}  // namespace czx
