#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "czx/haar.hpp"
#include "czx/kernel.hpp"
#include "czx/operator.hpp"
#include "czx/signal.hpp"

namespace czx {

enum class DiagonalConvention {
  zero,            // cell pairs sharing a coordinate line get kernel value 0
  kernel_defined,  // evaluate the kernel everywhere
};

using KernelFunction = std::function<double(Point2 x, Point2 y)>;

// Discretised bilinear form B(f,g) = sum_x sum_y K(x_c, y_c) f(y_c) g(x_c) area^2,
// with f on the source (y) side. As an operator, (Tf)(x) = sum_y K(x_c,y_c) f(y) area.
class FormMatrix final : public LinearOperator {
 public:
  enum class Storage { difference_table, dense, lazy };

  // Convolution kernels from a spec are stored as a table over cell offsets.
  // Pure kernels require the zero convention.
  FormMatrix(const KernelSpec& spec, GridGeometry g);
  FormMatrix(const KernelSpec& spec, GridGeometry g, DiagonalConvention conv);
  // Arbitrary kernels: dense up to dense_limit, evaluated lazily above it.
  FormMatrix(KernelFunction kernel, GridGeometry g, DiagonalConvention conv, int dense_limit = 5);

  const GridGeometry& geometry() const override { return geometry_; }
  DiagonalConvention convention() const { return convention_; }
  Storage storage() const { return storage_; }

  // K(x_c, y_c) with the convention applied; x, y are flat cell indices.
  double entry(std::size_t x, std::size_t y) const;
  double form(const Signal2D& f, const Signal2D& g) const;
  Signal2D apply(const Signal2D& f) const override;
  Signal2D apply_adjoint(const Signal2D& g) const override;

  // C[X * 4^s + Y] = B(1_Y, 1_X) for all lattice squares X (x side) and Y
  // (y side) at the given scale.
  std::vector<double> block_sums(const HaarSystem& hs, int scale) const;

 private:
  void fill_row(std::size_t x, double* row) const;
  std::int64_t table_index(std::int64_t d1, std::int64_t d2) const;
  double continuum_offset(std::int64_t d) const;

  GridGeometry geometry_;
  DiagonalConvention convention_;
  Storage storage_;
  KernelFunction kernel_;
  std::vector<double> table_;  // difference table or dense matrix
  std::int64_t table_side_ = 0;
};

// B(h_I^beta, h_J^gamma): f = h_I^beta, g = h_J^gamma; squares of equal side.
double haar_coefficient(const FormMatrix& B, const HaarSystem& hs, const HaarIndex& I, const HaarIndex& J);

// |B(1_I, 1_I)| / |I| for a lattice square.
double wbp_check(const FormMatrix& B, const HaarSystem& hs, const DyadicRect& I);

struct T1Data {
  Signal2D b1;  // T*1
  Signal2D b2;  // T1
  double bmo_b1 = 0.0;
  double bmo_b2 = 0.0;
};
T1Data t1_functions(const FormMatrix& B);

enum class PairCase { equal, adjacent, separated_one, separated_both };
std::string to_string(PairCase c);
PairCase classify_pair(std::int64_t m1, std::int64_t m2);

struct CaseResult {
  PairCase kind = PairCase::equal;
  double max_ratio = 0.0;
  double max_coefficient = 0.0;
  DyadicRect argmax_I{};
  DyadicRect argmax_J{};
  std::int64_t pairs = 0;
};

struct DecayReport {
  int scale = 0;
  double theta1 = 1.0;
  double theta2 = 1.0;
  std::array<CaseResult, 4> cases;
  // Max |B(h_I^beta, h_J^gamma)| at diagonal offsets m = (m, m), m >= 2.
  std::vector<std::int64_t> diagonal_offsets;
  std::vector<double> diagonal_max;
  // Decay exponent per parameter: minus half the log-log slope of the
  // diagonal maxima against m.
  double decay_slope_per_parameter = 0.0;
  const CaseResult& get(PairCase c) const { return cases[static_cast<std::size_t>(c)]; }
};

// Coefficients at the given scale against the Haar-pair bound, per position case.
// Offsets are wrapped on the torus; box mode needs the standard lattice.
DecayReport decay_report(const FormMatrix& B, const HaarSystem& hs, double theta1, double theta2, int scale);

// Offset of J relative to I in units of the side, per axis (wrapped on the torus).
std::array<std::int64_t, 2> square_offset(const GridGeometry& g, const DyadicRect& I, const DyadicRect& J);

}  // namespace czx
