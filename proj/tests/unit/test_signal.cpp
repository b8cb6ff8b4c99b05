#include "common.hpp"
#include "czx/haar.hpp"
#include "czx/signal.hpp"

using namespace czx;
using czx::test::close;

namespace {

const std::array<std::array<int, 2>, 4> kAll{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

}  // namespace

TEST_CASE("non-cancellative Haar function on the unit square is one") {
  const HaarSystem hs(GridGeometry(3), Lattice2D::standard(3));
  const Signal2D h = hs.haar_function({hs.square(0, 0), {0, 0}});
  for (double v : h.values()) CHECK(v == 1.0);
}

TEST_CASE("h^(1,0) on a square of side 1/2 by direct cell summation") {
  const GridGeometry g(3);
  const HaarSystem hs(g, Lattice2D::standard(3));
  const DyadicRect I{{1, 0}, {1, 1}};  // [0,1/2) x [1/2,1)
  const Signal2D h = hs.haar_function({I, {1, 0}});
  double sum = 0.0, sq = 0.0;
  for (std::int64_t i1 = 0; i1 < 8; ++i1)
    for (std::int64_t i2 = 0; i2 < 8; ++i2) {
      const double v = h(i1, i2);
      const bool inside = i1 < 4 && i2 >= 4;
      if (!inside) CHECK(v == 0.0);
      else CHECK(v == (i1 < 2 ? 2.0 : -2.0));
      sum += v * g.cell_area();
      sq += v * v * g.cell_area();
    }
  CHECK(sum == doctest::Approx(0.0));
  CHECK(sq == doctest::Approx(1.0));
}

TEST_CASE("Haar functions are orthonormal on shifted lattices") {
  Rng rng(21);
  const GridGeometry g(4);
  const HaarSystem hs(g, Lattice2D::random(4, rng));
  for (int s = 1; s <= 2; ++s)
    for (std::int64_t q = 0; q < (1 << (2 * s)); q += 3) {
      const DyadicRect I = hs.square(s, q);
      for (const auto& a : kAll)
        for (const auto& b : kAll) {
          const double ip = inner(hs.haar_function({I, a}), hs.haar_function({I, b}));
          CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("balanced Haar difference of two disjoint squares") {
  const GridGeometry g(2);
  const HaarSystem hs(g, Lattice2D::standard(2));
  const DyadicRect I{{1, 0}, {1, 0}}, J{{1, 1}, {1, 1}};
  const Signal2D H = hs.balanced_haar(I, J);
  for (std::int64_t i1 = 0; i1 < 4; ++i1)
    for (std::int64_t i2 = 0; i2 < 4; ++i2) {
      const double expect = (i1 < 2 && i2 < 2) ? 2.0 : (i1 >= 2 && i2 >= 2) ? -2.0 : 0.0;
      CHECK(H(i1, i2) == expect);
    }
  const Signal2D zero = hs.balanced_haar(I, I);
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("Parseval over all lattice squares") {
  Rng rng(4);
  const GridGeometry g(4);
  const HaarSystem hs(g, Lattice2D::random(4, rng));
  const Signal2D f = random_signal(g, rng, 4);
  double sum = 0.0;
  for (int s = 0; s < 4; ++s)
    for (const auto& I : hs.lattice().squares(s)) {
      const Signal2D d = hs.difference(f, I);
      sum += inner(d, d);
    }
  const Signal2D centred = f - Signal2D::constant(g, f.mean());
  CHECK(sum == doctest::Approx(inner(centred, centred)).epsilon(1e-12));
}

TEST_CASE("analysis followed by synthesis is the identity") {
  Rng rng(6);
  for (Domain d : {Domain::torus, Domain::box}) {
    const GridGeometry g(5, d);
    const HaarSystem hs(g, d == Domain::torus ? Lattice2D::random(5, rng) : Lattice2D::standard(5));
    const Signal2D f = random_signal(g, rng, 5);
    CHECK(max_abs_difference(hs.synthesize(hs.analyze(f)), f) < 1e-12);
  }
}

TEST_CASE("differences telescope between scales") {
  Rng rng(9);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  const Signal2D f = random_signal(g, rng, 5);
  const ScaleAverages avg = hs.averages(f);
  Signal2D sum = hs.expectation_at_scale(avg, 1);
  for (int s = 1; s < 4; ++s) sum += hs.difference_at_scale(avg, s);
  CHECK(max_abs_difference(sum, hs.expectation_at_scale(avg, 4)) < 1e-12);
}

TEST_CASE("expectations and differences of special inputs") {
  Rng rng(10);
  const GridGeometry g(4);
  const HaarSystem hs(g, Lattice2D::random(4, rng));
  const DyadicRect I = hs.square(2, 5);
  const Signal2D c = Signal2D::constant(g, 3.0);
  CHECK(max_abs_difference(hs.expectation(c, I), 3.0 * Signal2D::indicator(g, hs.lattice(), I)) < 1e-14);
  CHECK(hs.difference(c, I).max_abs() < 1e-14);
  const Signal2D h = hs.haar_function({I, {1, 0}});
  CHECK(max_abs_difference(hs.difference(h, I), h) < 1e-14);
  CHECK(hs.expectation(h, I).max_abs() < 1e-14);
}

TEST_CASE("block projection reproduces pairings with balanced Haar functions") {
  Rng rng(17);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  const Signal2D f = random_signal(g, rng, 5);
  int done = 0;
  while (done < 20) {
    const int k1 = static_cast<int>(rng.integer(0, 3));
    const int k2 = static_cast<int>(rng.integer(0, k1));
    const int j = static_cast<int>(rng.integer(k1, 4));
    const DyadicRect I = hs.square(j, rng.integer(0, (std::int64_t{1} << (2 * j)) - 1));
    const DyadicRect K = hs.lattice().ancestor(I, k1, k2);
    // A second square with the same ancestor.
    const DyadicRect J = hs.square(j, rng.integer(0, (std::int64_t{1} << (2 * j)) - 1));
    if (!(hs.lattice().ancestor(J, k1, k2) == K)) continue;
    const Signal2D H = hs.balanced_haar(I, J);
    const Signal2D gamma = hs.block_projection(f, K, k1);
    CHECK(inner(gamma, H) == doctest::Approx(inner(f, H)).epsilon(1e-12));
    ++done;
  }
}

TEST_CASE("block projections are square summable with a (1 + k) bound") {
  // Constant found by a preliminary sweep over random lattices and inputs.
  constexpr double kBlockConstant = 1.0;
  Rng rng(19);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  for (int t = 0; t < 3; ++t) {
    const Signal2D f = random_signal(g, rng, 5);
    for (int k1 = 0; k1 <= 3; ++k1)
      for (int s = 0; s + k1 <= 4; ++s) {
        double sum = 0.0;
        for (const auto& K : hs.lattice().squares(s)) {
          const Signal2D p = hs.block_projection(f, K, k1);
          sum += inner(p, p);
        }
        CHECK(sum <= kBlockConstant * (1 + k1) * inner(f, f));
      }
    const Signal2D flat = hs.block_projection(Signal2D::constant(g, 2.0), hs.square(1, 2), 2);
    CHECK(flat.max_abs() < 1e-14);
  }
}

TEST_CASE("block differences are square summable") {
  Rng rng(23);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  const Signal2D f = random_signal(g, rng, 5);
  for (int k1 = 0; k1 <= 2; ++k1)
    for (int k2 = 0; k2 <= 2; ++k2) {
      double sum = 0.0;
      for (int j = std::max(k1, k2); j <= 4; ++j)
        for (const auto& K : hs.lattice().enumerate_family(k1 - k2, j - k2)) {
          const Signal2D d = hs.block_difference(f, K, k1, k2);
          sum += inner(d, d);
        }
      CHECK(sum <= inner(f, f) * (1 + 1e-12));
    }
  // k = (0,0): the single square difference.
  const DyadicRect K = hs.square(2, 7);
  CHECK(max_abs_difference(hs.block_difference(f, K, 0, 0), hs.difference(f, K)) < 1e-13);
  CHECK(hs.block_difference(Signal2D::constant(g, 1.5), K, 0, 0).max_abs() < 1e-14);
}

TEST_CASE("random signals refine consistently") {
  Rng a(5), b(5);
  const Signal2D f4 = random_signal(GridGeometry(4), a, 3);
  const Signal2D f6 = random_signal(GridGeometry(6), b, 3);
  for (std::int64_t i1 = 0; i1 < 64; ++i1)
    for (std::int64_t i2 = 0; i2 < 64; ++i2) CHECK(f6(i1, i2) == f4(i1 / 4, i2 / 4));
  Rng c(8);
  CHECK(std::abs(random_mean_zero_signal(GridGeometry(5), c).mean()) < 1e-14);
}
