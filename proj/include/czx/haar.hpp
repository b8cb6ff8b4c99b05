#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "czx/lattice.hpp"
#include "czx/signal.hpp"

namespace czx {

struct HaarIndex {
  DyadicRect rect;               // a square of D_box(sigma)
  std::array<int, 2> eta{0, 0};  // (0,0) is the non-cancellative one
  bool cancellative() const { return eta[0] != 0 || eta[1] != 0; }
};

// The three cancellative signatures in storage order.
inline constexpr std::array<std::array<int, 2>, 3> kCancellative{{{1, 0}, {0, 1}, {1, 1}}};

// Per-scale square averages: level j holds 4^j values, flat index m1 * 2^j + m2.
using ScaleAverages = std::vector<std::vector<double>>;

// Full Haar expansion: mean plus, per scale j < n, three coefficients per square
// at flat * 3 + e with e indexing kCancellative.
struct HaarCoefficients {
  double mean = 0.0;
  std::vector<std::vector<double>> detail;
};

// Haar calculus of one lattice pair sigma on one grid. Immutable after
// construction; every method is a pure function of its arguments.
class HaarSystem {
 public:
  HaarSystem(GridGeometry g, Lattice2D lattice);

  const GridGeometry& geometry() const { return geometry_; }
  const Lattice2D& lattice() const { return lattice_; }
  int n() const { return geometry_.n; }

  std::int64_t interval_of_cell(int axis, int scale, std::int64_t cell) const {
    return cell_index_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(scale)]
                      [static_cast<std::size_t>(cell)];
  }
  std::int64_t square_of_cell(int scale, std::int64_t i1, std::int64_t i2) const {
    return (interval_of_cell(0, scale, i1) << scale) + interval_of_cell(1, scale, i2);
  }
  std::int64_t flat(const DyadicRect& sq) const { return (sq.first.index << sq.first.scale) + sq.second.index; }
  DyadicRect square(int scale, std::int64_t flat) const {
    return {{scale, flat >> scale}, {scale, flat & ((std::int64_t{1} << scale) - 1)}};
  }
  // Flat index at scale+1 of child (c1, c2), c = 0 left / 1 right in lattice order.
  std::int64_t child(int scale, std::int64_t flat, int c1, int c2) const;
  std::int64_t parent(int scale, std::int64_t flat) const;

  Signal2D haar_function(const HaarIndex& idx) const;
  Signal2D balanced_haar(const DyadicRect& I, const DyadicRect& J) const;

  ScaleAverages averages(const Signal2D& f) const;
  // <f, h_I^eta> from child averages (scale of I below n).
  double coefficient(const ScaleAverages& avg, int scale, std::int64_t flat, std::array<int, 2> eta) const;
  double coefficient(const Signal2D& f, const HaarIndex& idx) const;

  HaarCoefficients analyze(const Signal2D& f) const;
  Signal2D synthesize(const HaarCoefficients& c) const;

  Signal2D expectation(const Signal2D& f, const DyadicRect& I) const;
  Signal2D difference(const Signal2D& f, const DyadicRect& I) const;
  // E_{2^-j} f: cellwise average over the scale-j square containing the cell.
  Signal2D expectation_at_scale(const Signal2D& f, int scale) const;
  Signal2D expectation_at_scale(const ScaleAverages& avg, int scale) const;
  // E_{2^-(j+1)} f - E_{2^-j} f.
  Signal2D difference_at_scale(const ScaleAverages& avg, int scale) const;

  // gamma_{K,k1} f = 1_K sum of Delta_L f over squares L with
  // 2^-k1 l(K^1) <= l(L) <= l(K^1).
  Signal2D block_projection(const Signal2D& f, const DyadicRect& K, int k1) const;
  // Delta_{K,k} g = sum of Delta_J g over squares J with J^(k) = K.
  Signal2D block_difference(const Signal2D& g, const DyadicRect& K, int k1, int k2) const;

  void validate_square(const DyadicRect& sq) const;

 private:
  Signal2D restrict_to(const Signal2D& f, const DyadicRect& R) const;

  GridGeometry geometry_;
  Lattice2D lattice_;
  // [axis][scale][cell] -> interval index
  std::array<std::vector<std::vector<std::int64_t>>, 2> cell_index_;
  // [axis][scale][m] -> {left child, right child} indices at scale+1
  std::array<std::vector<std::vector<std::array<std::int64_t, 2>>>, 2> children_;
  // [axis][scale][m] -> parent index at scale-1
  std::array<std::vector<std::vector<std::int64_t>>, 2> parents_;
};

// Sign of h^eta on child c: +1 on the left half, -1 on the right half.
inline double haar_sign(int eta, int c) { return (eta != 0 && c == 1) ? -1.0 : 1.0; }

}  // namespace czx
