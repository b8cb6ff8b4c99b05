#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "common.hpp"
#include "czx/errors.hpp"
#include "czx/kernel.hpp"

using namespace czx;
using czx::test::rel_error;

TEST_CASE("decay factor values") {
  CHECK(decay_factor_ratio(1.0, 1.0, false) == doctest::Approx(0.5));
  CHECK(decay_factor_ratio(4.0, 0.5, false) == doctest::Approx(std::pow(17.0 / 4.0, -0.5)).epsilon(1e-14));
  CHECK(decay_factor_ratio(4.0, 0.5, false) == doctest::Approx(0.48507125007266594).epsilon(1e-14));
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Point2 x{rng.uniform(), rng.uniform()}, y{rng.uniform(), rng.uniform()};
    const double th = rng.uniform(0.05, 1.0);
    const double d = decay_factor(x, y, th, false);
    CHECK(d > 0.0);
    CHECK(d <= 1.0);
    CHECK(d == doctest::Approx(decay_factor({x.x2, x.x1}, {y.x2, y.x1}, th, false)).epsilon(1e-14));
    // With the logarithm the factor is t^-1 log t, t = r + 1/r >= 2, at most 1/e.
    CHECK(decay_factor(x, y, 1.0, true) <= std::exp(-1.0) + 1e-15);
  }
}

TEST_CASE("pure kernel evaluation") {
  const KernelSpec s = KernelSpec::pure(1.0, 1.0);
  for (double h : {0.5, 0.01, 1e-4}) CHECK(kernel_eval_diff(s, h, h) == doctest::Approx(1.0 / (2 * h * h)));
  // Exact dilation covariance of the model kernel: K(tx) = t^-2 K(x).
  const KernelSpec q = KernelSpec::pure(0.7, 0.4);
  for (double t : {0.25, 3.0}) CHECK(kernel_eval_diff(q, 0.3 * t, 0.05 * t) == doctest::Approx(kernel_eval_diff(q, 0.3, 0.05) / (t * t)));
}

TEST_CASE("bump kernel with equal widths and its support") {
  const double t = 0.2;
  for (double th : {0.3, 1.0}) {
    const KernelSpec s = KernelSpec::bump(t, t, th);
    CHECK(kernel_eval_diff(s, 0.05, -0.1) ==
          doctest::Approx(std::exp2(-th) / (t * t) * bump_phi(0.05 / t) * bump_phi(-0.1 / t)));
    CHECK(kernel_eval_diff(s, t, 0.0) == 0.0);
    CHECK(kernel_eval_diff(s, 0.0, -1.5 * t) == 0.0);
  }
  CHECK(bump_phi(0.0) == 1.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double I = ts.integrate([](double u) { return bump_phi(u); }, -1.0, 1.0);
  CHECK(bump_phi_integral() == doctest::Approx(I).epsilon(1e-12));
}

TEST_CASE("invalid kernel parameters are rejected") {
  CHECK_THROWS_AS(KernelSpec::pure(0.0, 1.0).validate(), ParameterError);
  CHECK_THROWS_AS(KernelSpec::pure(1.0, 1.5).validate(), ParameterError);
  CHECK_THROWS_AS(KernelSpec::pure(1.0, 0.5, true).validate(), ParameterError);
  CHECK_THROWS_AS(KernelSpec::bump(-1.0, 1.0, 1.0).validate(), ParameterError);
}

TEST_CASE("sampled estimates of the model kernel") {
  for (double th : {0.5, 1.0}) {
    const BoundReport r = verify_kernel_estimates(KernelSpec::pure(1.0, th), 10000, 7);
    CHECK(r.find("size").max_ratio == doctest::Approx(1.0).epsilon(1e-12));
    // Preliminary sweep: about 6 at theta2 = 1 and 3.7 at 1/2.
    CHECK(r.max_ratio() <= 12.0);
  }
}

TEST_CASE("bump family estimates are uniform in the widths") {
  // Found by sweeping log2(t1/t2) over [-6, 6] (worst about 1.6) and frozen.
  constexpr double kBumpConstant = 4.0;
  for (bool lg : {false, true})
    for (int e = -6; e <= 6; ++e) {
      const KernelSpec s = KernelSpec::bump(0.25 * std::exp2(e), 0.25, 1.0, lg);
      CHECK(verify_kernel_estimates(s, 10000, 100 + static_cast<std::uint64_t>(e + 6)).max_ratio() <= kBumpConstant);
    }
}

TEST_CASE("Hoelder ratio near the limit regime") {
  // |x1 - w1| / |x1 - y1| -> 0 with y fixed: the ratio tends to a finite limit.
  for (double th : {0.5, 1.0}) {
    const KernelSpec s = KernelSpec::pure(1.0, th);
    double prev = 0.0;
    for (double d = 1e-3; d > 1e-8; d /= 10) {
      double worst = 0.0;
      for (double b : {0.01, 0.3, 1.0, 5.0}) {
        const double lhs = std::abs(kernel_eval_diff(s, 1.0, b) - kernel_eval_diff(s, 1.0 - d, b));
        worst = std::max(worst, lhs / (d * size_bound(s, 1.0, b)));
      }
      CHECK(worst <= 4.0);
      if (prev > 0.0) CHECK(rel_error(worst, prev) < 0.01);
      prev = worst;
    }
  }
}

TEST_CASE("slice integrals against closed forms") {
  // theta2 = 1: integral of da / (a^2 + h^2) = pi / h.
  // theta2 = 1/2: (1/h) Gamma(1/4)^2 / Gamma(1/2) by a Beta integral.
  const double g14 = boost::math::tgamma(0.25);
  const double closed[2] = {M_PI, g14 * g14 / std::sqrt(M_PI)};
  const double thetas[2] = {1.0, 0.5};
  for (int c = 0; c < 2; ++c) {
    const KernelSpec s = KernelSpec::pure(1.0, thetas[c]);
    for (int k = 1; k <= 8; ++k) {
      const double h = std::exp2(-k);
      const Point2 x{0.5, 0.5};
      CHECK(slice_integral(s, x, 0.5 - h) * h == doctest::Approx(closed[c]).epsilon(1e-8));
      // u -> 1/u symmetry: the part with |a| <= h is exactly half.
      CHECK(slice_integral(s, x, 0.5 - h, h) * h == doctest::Approx(closed[c] / 2).epsilon(1e-8));
    }
  }
}

TEST_CASE("restricted slices grow like L^theta2 for small L") {
  for (double th : {0.5, 1.0}) {
    const KernelSpec s = KernelSpec::pure(1.0, th);
    const Point2 x{0.5, 0.5};
    for (int m = 14; m >= 8; m -= 2) {
      const double L = 0.5 * std::exp2(-m);
      const double r = slice_integral(s, x, 0.0, 2 * L) / slice_integral(s, x, 0.0, L);
      CHECK(r <= std::exp2(th) * 1.001);
      CHECK(r >= std::exp2(th) * 0.99);
    }
  }
}

TEST_CASE("Hoermander integral vanishes at the centre and stays bounded") {
  const KernelSpec s = KernelSpec::pure(1.0, 1.0);
  const Square J{{0.25, 0.25}, 0.125};
  CHECK(hormander_integral(s, J, J.center()) == 0.0);
  const double corner = hormander_integral(s, J, J.corner);
  CHECK(corner > 0.0);
  CHECK(corner <= 32.0);
  // Scale invariance of the model kernel.
  const Square K{{0.25, 0.25}, 0.03125};
  CHECK(hormander_integral(s, K, K.corner) == doctest::Approx(corner).epsilon(1e-6));
}

TEST_CASE("regularity difference away from 3J") {
  // Preliminary sweep over 6 scales and 2000 points per scale: at most 0.7.
  constexpr double kAwayConstant = 2.0;
  Rng rng(31);
  for (const KernelSpec& s : {KernelSpec::pure(1, 1), KernelSpec::pure(1, 0.5), KernelSpec::pure(0.5, 1),
                              KernelSpec::pure(1, 1, true)})
    for (int k = 1; k <= 6; ++k) {
      const Square J{{0.25, 0.25}, std::exp2(-k)};
      for (int t = 0; t < 300; ++t) {
        const Point2 x{J.corner.x1 + rng.uniform() * J.side, J.corner.x2 + rng.uniform() * J.side};
        auto outside = [&](double c) {
          const double d = J.side * (1 + std::exp2(rng.uniform(0, 10)));
          return rng.bit() ? c - J.side - d : c + 2 * J.side + d;
        };
        const Point2 y{outside(J.corner.x1), outside(J.corner.x2)};
        const AwayRatios r = away_ratios(s, J, x, y);
        CHECK(r.basic <= kAwayConstant);
        CHECK(r.sharp <= kAwayConstant);
      }
    }
}
