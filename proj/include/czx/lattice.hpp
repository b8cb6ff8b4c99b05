#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "czx/rng.hpp"

namespace czx {

enum class Domain { torus, box };

// 2^n x 2^n cell grid on [0,1)^2. Quadrature nodes are cell centres.
struct GridGeometry {
  int n = 1;
  Domain domain = Domain::torus;

  GridGeometry() = default;
  GridGeometry(int n_, Domain d = Domain::torus);

  std::int64_t side() const { return std::int64_t{1} << n; }
  std::size_t cells() const { return static_cast<std::size_t>(side() * side()); }
  double cell_size() const { return 1.0 / static_cast<double>(side()); }
  double cell_area() const { return cell_size() * cell_size(); }
  double center(std::int64_t i) const { return (static_cast<double>(i) + 0.5) * cell_size(); }
  std::size_t flat(std::int64_t i1, std::int64_t i2) const {
    return static_cast<std::size_t>(i1 * side() + i2);
  }
  bool operator==(const GridGeometry&) const = default;
};

// Shift digits omega_1..omega_n (omega_i acts at scale 2^-i).
class ShiftBits {
 public:
  explicit ShiftBits(int n);  // all zeros
  explicit ShiftBits(std::vector<std::uint8_t> bits);
  static ShiftBits random(int n, Rng& rng);

  int n() const { return static_cast<int>(bits_.size()); }
  // 1-based, matching omega_i.
  int bit(int i) const { return bits_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool is_zero() const;
  bool operator==(const ShiftBits&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct DyadicInterval {
  int scale = 0;
  std::int64_t index = 0;
  bool operator==(const DyadicInterval&) const = default;
};

struct DyadicRect {
  DyadicInterval first;
  DyadicInterval second;
  bool is_square() const { return first.scale == second.scale; }
  bool operator==(const DyadicRect&) const = default;
};

// One-dimensional shifted lattice D(omega) on the circle of N = 2^n cells.
// Everything is integral: interval (j, m) covers the cells
// [(m 2^{n-j} + off_j) mod N, ... + 2^{n-j}).
class Lattice1D {
 public:
  explicit Lattice1D(ShiftBits shift);

  int n() const { return shift_.n(); }
  const ShiftBits& shift() const { return shift_; }
  std::int64_t cells() const { return std::int64_t{1} << n(); }
  std::int64_t count(int scale) const { return std::int64_t{1} << scale; }
  std::int64_t span(int scale) const { return std::int64_t{1} << (n() - scale); }
  // Cell offset of the scale-j origin: sum_{i=j+1}^{n} omega_i 2^{n-i}.
  std::int64_t offset(int scale) const { return offsets_.at(static_cast<std::size_t>(scale)); }

  std::int64_t first_cell(const DyadicInterval& I) const;
  double left_endpoint(const DyadicInterval& I) const;
  double length(const DyadicInterval& I) const;
  // Index of the scale-j interval containing the cell.
  std::int64_t index_of_cell(int scale, std::int64_t cell) const;
  bool contains_cell(const DyadicInterval& I, std::int64_t cell) const;
  bool contains(const DyadicInterval& outer, const DyadicInterval& inner) const;

  DyadicInterval ancestor(const DyadicInterval& I, int k) const;
  DyadicInterval parent(const DyadicInterval& I) const { return ancestor(I, 1); }
  // Left and right halves in lattice order (left starts at first_cell(I)).
  std::array<DyadicInterval, 2> children(const DyadicInterval& I) const;
  std::vector<DyadicInterval> intervals(int scale) const;

  // Cell distance from I to the endpoints of its k-th ancestor, measured
  // inside the ancestor (equal to the wrapped metric on the circle).
  std::int64_t boundary_distance_cells(const DyadicInterval& I, int k) const;
  bool is_k_good(const DyadicInterval& I, int k) const;

  void validate(const DyadicInterval& I) const;

 private:
  ShiftBits shift_;
  std::vector<std::int64_t> offsets_;
};

// D(sigma) = D(sigma^1) x D(sigma^2).
class Lattice2D {
 public:
  Lattice2D(ShiftBits s1, ShiftBits s2);
  static Lattice2D standard(int n);
  static Lattice2D random(int n, Rng& rng);

  int n() const { return first_.n(); }
  const Lattice1D& first() const { return first_; }
  const Lattice1D& second() const { return second_; }
  const Lattice1D& axis(int i) const { return i == 0 ? first_ : second_; }
  bool is_standard() const { return first_.shift().is_zero() && second_.shift().is_zero(); }

  DyadicRect ancestor(const DyadicRect& R, int k1, int k2) const;
  DyadicRect ancestor(const DyadicRect& R, int k) const { return ancestor(R, k, k); }
  bool contains_cell(const DyadicRect& R, std::int64_t i1, std::int64_t i2) const;
  bool contains(const DyadicRect& outer, const DyadicRect& inner) const;
  double area(const DyadicRect& R) const;

  // All rectangles with l(I^1) = 2^{log2_lambda} l(I^2) and l(I^2) = 2^{-j2}.
  std::vector<DyadicRect> enumerate_family(int log2_lambda, int j2) const;
  std::vector<DyadicRect> squares(int scale) const { return enumerate_family(0, scale); }
  // Smallest lattice square containing R: the ancestor of its shorter side,
  // paired with the longer side. Its area is D(lambda) |R|.
  DyadicRect enclosing_square(const DyadicRect& R) const;

 private:
  Lattice1D first_;
  Lattice1D second_;
};

// D(lambda) = max(lambda, 1/lambda).
double eccentricity_factor(int log2_lambda);

// Monte Carlo frequency of L + omega being k-good over random shifts, for the
// base interval L = (j, base_index) of the standard lattice.
double kgood_probability(int j, int k, int trials, std::uint64_t seed, std::int64_t base_index = 0,
                         int n = -1);

}  // namespace czx
