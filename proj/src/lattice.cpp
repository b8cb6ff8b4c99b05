#include "czx/lattice.hpp"

#include <algorithm>
#include <string>

#include "czx/errors.hpp"

namespace czx {
namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GridGeometry::GridGeometry(int n_, Domain d) : n(n_), domain(d) {
  require(n_ >= 1 && n_ <= 14, "grid resolution n must lie in [1, 14]");
}

ShiftBits::ShiftBits(int n) : bits_(static_cast<std::size_t>(n), 0) {
  require(n >= 1, "ShiftBits needs n >= 1");
}

ShiftBits::ShiftBits(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  require(!bits_.empty(), "ShiftBits needs n >= 1");
  for (auto b : bits_) require(b <= 1, "shift digits must be 0 or 1");
}

ShiftBits ShiftBits::random(int n, Rng& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return ShiftBits(std::move(bits));
}

bool ShiftBits::is_zero() const {
  return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b == 0; });
}

Lattice1D::Lattice1D(ShiftBits shift) : shift_(std::move(shift)) {
  const int nn = shift_.n();
  offsets_.assign(static_cast<std::size_t>(nn) + 1, 0);
  for (int j = nn - 1; j >= 0; --j) {
    offsets_[static_cast<std::size_t>(j)] =
        offsets_[static_cast<std::size_t>(j) + 1] + shift_.bit(j + 1) * (std::int64_t{1} << (nn - j - 1));
  }
}

void Lattice1D::validate(const DyadicInterval& I) const {
  require<RangeError>(I.scale >= 0 && I.scale <= n(), "interval scale outside 0..n");
  require<RangeError>(I.index >= 0 && I.index < count(I.scale), "interval index out of range");
}

std::int64_t Lattice1D::first_cell(const DyadicInterval& I) const {
  return mod(I.index * span(I.scale) + offset(I.scale), cells());
}

double Lattice1D::left_endpoint(const DyadicInterval& I) const {
  return static_cast<double>(first_cell(I)) / static_cast<double>(cells());
}

double Lattice1D::length(const DyadicInterval& I) const {
  return static_cast<double>(span(I.scale)) / static_cast<double>(cells());
}

std::int64_t Lattice1D::index_of_cell(int scale, std::int64_t cell) const {
  return mod(cell - offset(scale), cells()) / span(scale);
}

bool Lattice1D::contains_cell(const DyadicInterval& I, std::int64_t cell) const {
  return mod(cell - first_cell(I), cells()) < span(I.scale);
}

bool Lattice1D::contains(const DyadicInterval& outer, const DyadicInterval& inner) const {
  if (inner.scale < outer.scale) return false;
  return index_of_cell(outer.scale, first_cell(inner)) == outer.index;
}

DyadicInterval Lattice1D::ancestor(const DyadicInterval& I, int k) const {
  validate(I);
  require<RangeError>(k >= 0, "ancestor order must be nonnegative");
  require<RangeError>(I.scale - k >= 0, "ancestor would exceed the coarsest scale");
  return {I.scale - k, index_of_cell(I.scale - k, first_cell(I))};
}

std::array<DyadicInterval, 2> Lattice1D::children(const DyadicInterval& I) const {
  validate(I);
  require<ResolutionError>(I.scale < n(), "interval at the finest scale has no children");
  const std::int64_t c0 = first_cell(I);
  const std::int64_t c1 = mod(c0 + span(I.scale + 1), cells());
  return {DyadicInterval{I.scale + 1, index_of_cell(I.scale + 1, c0)},
          DyadicInterval{I.scale + 1, index_of_cell(I.scale + 1, c1)}};
}

std::vector<DyadicInterval> Lattice1D::intervals(int scale) const {
  require<RangeError>(scale >= 0 && scale <= n(), "scale outside 0..n");
  std::vector<DyadicInterval> out;
  out.reserve(static_cast<std::size_t>(count(scale)));
  for (std::int64_t m = 0; m < count(scale); ++m) out.push_back({scale, m});
  return out;
}

std::int64_t Lattice1D::boundary_distance_cells(const DyadicInterval& I, int k) const {
  const DyadicInterval G = ancestor(I, k);
  const std::int64_t rel = mod(first_cell(I) - first_cell(G), cells());
  return std::min(rel, span(G.scale) - rel - span(I.scale));
}

bool Lattice1D::is_k_good(const DyadicInterval& I, int k) const {
  require(k >= 2, "k-goodness needs k >= 2");
  require<RangeError>(I.scale >= k, "k-goodness needs scale(I) >= k");
  return boundary_distance_cells(I, k) >= (std::int64_t{1} << (k - 2)) * span(I.scale);
}

Lattice2D::Lattice2D(ShiftBits s1, ShiftBits s2) : first_(std::move(s1)), second_(std::move(s2)) {
  require(first_.n() == second_.n(), "both shift vectors need the same length");
}

Lattice2D Lattice2D::standard(int n) { return Lattice2D(ShiftBits(n), ShiftBits(n)); }

Lattice2D Lattice2D::random(int n, Rng& rng) {
  ShiftBits a = ShiftBits::random(n, rng);
  ShiftBits b = ShiftBits::random(n, rng);
  return Lattice2D(std::move(a), std::move(b));
}

DyadicRect Lattice2D::ancestor(const DyadicRect& R, int k1, int k2) const {
  return {first_.ancestor(R.first, k1), second_.ancestor(R.second, k2)};
}

bool Lattice2D::contains_cell(const DyadicRect& R, std::int64_t i1, std::int64_t i2) const {
  return first_.contains_cell(R.first, i1) && second_.contains_cell(R.second, i2);
}

bool Lattice2D::contains(const DyadicRect& outer, const DyadicRect& inner) const {
  return first_.contains(outer.first, inner.first) && second_.contains(outer.second, inner.second);
}

double Lattice2D::area(const DyadicRect& R) const {
  return first_.length(R.first) * second_.length(R.second);
}

std::vector<DyadicRect> Lattice2D::enumerate_family(int log2_lambda, int j2) const {
  const int j1 = j2 - log2_lambda;
  require(j2 >= 0 && j2 <= n() && j1 >= 0 && j1 <= n(),
          "eccentricity 2^" + std::to_string(log2_lambda) + " at scale " + std::to_string(j2) +
              " is not representable on this grid");
  std::vector<DyadicRect> out;
  out.reserve(static_cast<std::size_t>(first_.count(j1) * second_.count(j2)));
  for (std::int64_t m1 = 0; m1 < first_.count(j1); ++m1)
    for (std::int64_t m2 = 0; m2 < second_.count(j2); ++m2) out.push_back({{j1, m1}, {j2, m2}});
  return out;
}

DyadicRect Lattice2D::enclosing_square(const DyadicRect& R) const {
  if (R.first.scale > R.second.scale)
    return {first_.ancestor(R.first, R.first.scale - R.second.scale), R.second};
  return {R.first, second_.ancestor(R.second, R.second.scale - R.first.scale)};
}

double eccentricity_factor(int log2_lambda) {
  return static_cast<double>(std::int64_t{1} << (log2_lambda < 0 ? -log2_lambda : log2_lambda));
}

double kgood_probability(int j, int k, int trials, std::uint64_t seed, std::int64_t base_index, int n) {
  require(trials >= 1, "trials must be positive");
  require(k >= 2 && j >= k, "kgood_probability needs j >= k >= 2");
  if (n < 0) n = j;
  require(n >= j, "lattice resolution must be at least j");
  require<RangeError>(base_index >= 0 && base_index < (std::int64_t{1} << j), "base index out of range");
  Rng rng(seed);
  int good = 0;
  for (int t = 0; t < trials; ++t) {
    const Lattice1D lat(ShiftBits::random(n, rng));
    // L + omega is the lattice interval with the same scale and index.
    if (lat.is_k_good({j, base_index}, k)) ++good;
  }
  return static_cast<double>(good) / trials;
}

}  // namespace czx
