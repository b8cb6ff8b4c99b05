#include <set>

#include "common.hpp"
#include "czx/errors.hpp"
#include "czx/lattice.hpp"

using namespace czx;

TEST_CASE("zero shift reproduces the standard grid") {
  const Lattice1D L(ShiftBits(3));
  for (int j = 0; j <= 3; ++j)
    for (std::int64_t m = 0; m < L.count(j); ++m)
      CHECK(L.left_endpoint({j, m}) == doctest::Approx(static_cast<double>(m) / static_cast<double>(L.count(j))));
}

TEST_CASE("shift digits move each scale by the hand-evaluated sum") {
  // omega = (1,0,0): only omega_1 acts, and only on intervals longer than 1/2.
  const Lattice1D L(ShiftBits({1, 0, 0}));
  CHECK(L.offset(0) == 4);
  CHECK(L.offset(1) == 0);
  CHECK(L.offset(2) == 0);
  CHECK(L.left_endpoint({0, 0}) == 0.5);
  CHECK(L.left_endpoint({1, 0}) == 0.0);
  CHECK(L.left_endpoint({1, 1}) == 0.5);

  // omega = (0,1,1): scales 0 and 1 move by 1/4 + 1/8, scale 2 by 1/8, scale 3 not at all.
  const Lattice1D M(ShiftBits({0, 1, 1}));
  CHECK(M.left_endpoint({0, 0}) == 0.375);
  CHECK(M.left_endpoint({1, 0}) == 0.375);
  CHECK(M.left_endpoint({2, 0}) == 0.125);
  CHECK(M.left_endpoint({3, 0}) == 0.0);
}

TEST_CASE("intervals tile the circle and nest") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Lattice1D L(ShiftBits::random(5, rng));
    for (int j = 0; j <= 5; ++j) {
      std::vector<int> hits(static_cast<std::size_t>(L.cells()), 0);
      for (const auto& I : L.intervals(j))
        for (std::int64_t c = 0; c < L.cells(); ++c)
          if (L.contains_cell(I, c)) ++hits[static_cast<std::size_t>(c)];
      for (int h : hits) CHECK(h == 1);
      if (j > 0)
        for (const auto& I : L.intervals(j)) CHECK(L.contains(L.parent(I), I));
    }
  }
}

TEST_CASE("parent of parent is the second ancestor") {
  Rng rng(5);
  const Lattice1D L(ShiftBits::random(6, rng));
  for (const auto& I : L.intervals(5)) CHECK(L.parent(L.parent(I)) == L.ancestor(I, 2));
}

TEST_CASE("ancestor of [1/4, 3/8) on the standard grid") {
  const Lattice1D L(ShiftBits(3));
  const DyadicInterval I{3, 2};
  CHECK(L.ancestor(I, 0) == I);
  const DyadicInterval a1 = L.ancestor(I, 1);
  CHECK(L.left_endpoint(a1) == 0.25);
  CHECK(L.length(a1) == 0.25);
  // The ancestor two generations up has length 2^2 / 8 = 1/2.
  const DyadicInterval a2 = L.ancestor(I, 2);
  CHECK(L.left_endpoint(a2) == 0.0);
  CHECK(L.length(a2) == 0.5);
}

TEST_CASE("rectangle ancestors change eccentricity by 2^(k1 - k2)") {
  const Lattice2D L = Lattice2D::standard(6);
  const DyadicRect sq{{5, 3}, {5, 7}};
  for (int k1 = 0; k1 <= 3; ++k1)
    for (int k2 = 0; k2 <= 3; ++k2) {
      const DyadicRect a = L.ancestor(sq, k1, k2);
      const double l1 = L.first().length(a.first), l2 = L.second().length(a.second);
      CHECK(l1 / l2 == doctest::Approx(std::exp2(k1 - k2)));
      CHECK(L.contains(a, sq));
    }
}

TEST_CASE("k-goodness by direct distance") {
  const Lattice1D L(ShiftBits(4));
  // [1/4, 1/2) inside [0, 1): distance 1/4 = l([0,1)) / 4.
  CHECK(L.is_k_good({2, 1}, 2));
  CHECK(L.is_k_good({2, 2}, 2));
  CHECK_FALSE(L.is_k_good({2, 0}, 2));
  CHECK_FALSE(L.is_k_good({2, 3}, 2));
  CHECK(L.boundary_distance_cells({2, 1}, 2) == 4);
}

TEST_CASE("k-goodness is invariant under a common translation") {
  // Changing only the digits below scale j translates every interval of scale
  // <= j together with its ancestors by the same amount.
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> bits(6, 0);
    for (std::size_t i = 3; i < 6; ++i) bits[i] = static_cast<std::uint8_t>(rng.bit());
    const Lattice1D shifted{ShiftBits(bits)}, plain{ShiftBits(6)};
    for (int k = 2; k <= 3; ++k)
      for (std::int64_t m = 0; m < 8; ++m)
        CHECK(shifted.is_k_good({3, m}, k) == plain.is_k_good({3, m}, k));
  }
}

TEST_CASE("k-good probability is one half") {
  const double p = kgood_probability(4, 2, 10000, 42);
  CHECK(p >= 0.48);
  CHECK(p <= 0.52);
  const double single = kgood_probability(4, 2, 1, 42);
  CHECK((single == 0.0 || single == 1.0));
  // Any base interval gives the same probability up to Monte Carlo error.
  for (std::int64_t base : {0, 3, 9, 15}) CHECK(std::abs(kgood_probability(4, 3, 10000, 7, base) - 0.5) <= 0.02);
}

TEST_CASE("family counts") {
  const Lattice2D L = Lattice2D::standard(4);
  CHECK(L.squares(2).size() == 16);
  const auto fam = L.enumerate_family(2, 3);  // lambda = 4, l(I^2) = 1/8
  CHECK(fam.size() == 16);
  for (const auto& R : fam) {
    CHECK(L.first().length(R.first) == 0.5);
    CHECK(L.second().length(R.second) == 0.125);
  }
}

TEST_CASE("every rectangle lies in a square of area D(lambda)|R|") {
  Rng rng(13);
  const Lattice2D L = Lattice2D::random(5, rng);
  for (int e = -3; e <= 3; ++e)
    for (const auto& R : L.enumerate_family(e, 1 + std::max(e, 0))) {
      const DyadicRect J = L.enclosing_square(R);
      CHECK(J.is_square());
      CHECK(L.contains(J, R));
      CHECK(L.area(J) <= eccentricity_factor(e) * L.area(R) * (1 + 1e-12));
    }
}

TEST_CASE("distinct shifts give distinct lattices") {
  std::set<std::vector<std::int64_t>> seen;
  for (int code = 0; code < 16; ++code) {
    std::vector<std::uint8_t> bits(4);
    for (int i = 0; i < 4; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> i) & 1);
    const Lattice1D L{ShiftBits(bits)};
    std::vector<std::int64_t> firsts;
    for (int j = 0; j < 4; ++j) firsts.push_back(L.first_cell({j, 0}));
    seen.insert(firsts);
  }
  CHECK(seen.size() == 16);
}

TEST_CASE("invalid input is rejected") {
  const Lattice1D L(ShiftBits(3));
  CHECK_THROWS_AS(L.validate({4, 0}), Error);
  CHECK_THROWS_AS(L.validate({2, 4}), Error);
  CHECK_THROWS(GridGeometry(0));
}
