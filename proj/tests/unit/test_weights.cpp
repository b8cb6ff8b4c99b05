#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "common.hpp"
#include "czx/haar.hpp"
#include "czx/weights.hpp"

using namespace czx;

namespace {

// Brute-force BMO: every square of dyadic side at every cell position.
double bmo_oracle(const Signal2D& b) {
  const std::int64_t N = b.side();
  double best = 0.0;
  for (std::int64_t s = 1; s <= N; s *= 2)
    for (std::int64_t r = 0; r + s <= N; ++r)
      for (std::int64_t c = 0; c + s <= N; ++c) {
        double mean = 0.0;
        for (std::int64_t i = r; i < r + s; ++i)
          for (std::int64_t j = c; j < c + s; ++j) mean += b(i, j);
        mean /= static_cast<double>(s * s);
        double osc = 0.0;
        for (std::int64_t i = r; i < r + s; ++i)
          for (std::int64_t j = c; j < c + s; ++j) osc += std::abs(b(i, j) - mean);
        best = std::max(best, osc / static_cast<double>(s * s));
      }
  return best;
}

}  // namespace

TEST_CASE("A_p constants") {
  const GridGeometry g(5, Domain::box);
  CHECK(ap_constant(constant_weight(g, 3.0).values, 2.0).value == doctest::Approx(1.0));
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    const Signal2D w = random_positive_signal(g, rng, 3);
    for (double p : {1.5, 2.0, 3.0}) {
      const ApResult cubes = ap_constant(w, p), rects = ap_constant(w, p, ApFamily::rectangles);
      CHECK(cubes.value >= 1.0 - 1e-12);
      CHECK(rects.value >= cubes.value - 1e-12);
      // Duality: [w]_{A_p} = [sigma]_{A_p'}^{p-1} with sigma = w^{-1/(p-1)}.
      const double q = p / (p - 1);
      for (ApFamily fam : {ApFamily::cubes, ApFamily::rectangles})
        CHECK(ap_constant(w, p, fam).value ==
              doctest::Approx(std::pow(ap_constant(dual_weight(w, p), q, fam).value, p - 1)).epsilon(1e-10));
    }
  }
}

TEST_CASE("power weight: cube constant settles, rectangle constant grows") {
  std::vector<double> cubes, rects;
  for (int n = 4; n <= 7; ++n) {
    const Weight w = power_weight(GridGeometry(n, Domain::box), 1.5);
    cubes.push_back(ap_constant(w.values, 2.0).value);
    rects.push_back(ap_constant(w.values, 2.0, ApFamily::rectangles).value);
  }
  for (std::size_t i = 1; i < cubes.size(); ++i) {
    CHECK(cubes[i] <= cubes[i - 1] * 1.1);
    CHECK(rects[i] > rects[i - 1] * 1.2);
  }
}

TEST_CASE("BMO norms") {
  const GridGeometry g(3, Domain::box);
  CHECK(bmo_norm(Signal2D::constant(g, 2.0)) == 0.0);
  const HaarSystem hs(g, Lattice2D::standard(3));
  const Signal2D step = hs.haar_function({hs.square(1, 2), {1, 1}});
  CHECK(bmo_norm(step) == doctest::Approx(bmo_oracle(step)).epsilon(1e-12));
  Rng rng(2);
  const Signal2D b = random_signal(g, rng, 3);
  CHECK(bmo_norm(b) == doctest::Approx(bmo_oracle(b)).epsilon(1e-12));
  const BmoNorms nb = bmo_norms(b, Signal2D::constant(g, 1.0));
  CHECK(nb.weighted == doctest::Approx(nb.plain).epsilon(1e-12));
  CHECK(bmo_norms(b).weighted == nb.plain);
}

TEST_CASE("weighted norms") {
  Rng rng(3);
  const GridGeometry g(4, Domain::box);
  const Signal2D f = random_signal(g, rng, 4), one = Signal2D::constant(g, 1.0);
  CHECK(weighted_norm(f, one, 3.0) == doctest::Approx(f.norm(3.0)).epsilon(1e-13));
  const Signal2D w = random_positive_signal(g, rng, 4);
  CHECK(weighted_norm(-2.5 * f, w, 1.5) == doctest::Approx(2.5 * weighted_norm(f, w, 1.5)).epsilon(1e-13));
}

TEST_CASE("integral of a power weight") {
  // Oracle: integrate in x1 analytically-free form by nested Gauss-Kronrod.
  using boost::math::quadrature::gauss_kronrod;
  for (double alpha : {0.5, 1.5, -1.0}) {
    auto inner_int = [alpha](double y) {
      return gauss_kronrod<double, 61>::integrate([&](double x) { return std::pow(x * x + y * y, alpha / 2); }, 0.0,
                                                  1.0, 15, 1e-13);
    };
    const double oracle = gauss_kronrod<double, 61>::integrate(inner_int, 0.0, 1.0, 15, 1e-12);
    CHECK(power_weight_integral(alpha) == doctest::Approx(oracle).epsilon(1e-9));
  }
  // The sampled weight converges at rate O(2^-n).
  const double exact = power_weight_integral(1.5);
  double prev = 1.0;
  for (int n = 4; n <= 8; ++n) {
    const Weight w = power_weight(GridGeometry(n, Domain::box), 1.5);
    const double err = std::abs(std::pow(weighted_norm(Signal2D::constant(GridGeometry(n, Domain::box), 1.0), w.values, 2.0), 2) - exact) / exact;
    CHECK(err <= 4.0 * std::exp2(-n));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("eccentric rectangles") {
  const GridGeometry g(6, Domain::box);
  const EpsRect r = eps_rect(g, 0.125);
  CHECK(r.rows == 8);
  CHECK(r.col0 == 8);
  CHECK(r.eccentricity() == 7.0);
  const auto sweep = dyadic_eps_sweep(6);
  CHECK(sweep.size() == 4);
  CHECK(sweep.front() == 0.25);
  CHECK(sweep.back() == 1.0 / 32);
}

TEST_CASE("counterexample rows at a small size") {
  const CounterexampleReport rep = counterexample_experiment(2.0, 1.5, 0.1, 7);
  REQUIRE(rep.rows.size() >= 3);
  for (const auto& row : rep.rows) {
    // Exact continuum averages against the sampled ones.
    CHECK(row.avg_w == doctest::Approx(row.avg_w_exact).epsilon(0.2));
    CHECK(row.measured_ratio > 0.0);
    // K * f >= c ecc^-theta2 <f>_R on R for a nonnegative bump.
    CHECK(row.pointwise_constant > 0.1);
  }
  CHECK(rep.slope_sigma < 0.0);
}

TEST_CASE("unit weight reduces to the unweighted ratio") {
  const GridGeometry g(6, Domain::box);
  const WeightedCheckReport r =
      weighted_boundedness_check(KernelSpec::bump(1.0, 1.0, 1.0), 2.0, constant_weight(g), 2, 3, 4);
  CHECK(r.ap == doctest::Approx(1.0));
  // Young: the ratio cannot exceed the L1 norm of the kernel, which is below one.
  CHECK(r.max_ratio <= 1.0);
  CHECK(r.max_over_baseline <= 2.0);
}
