#include "common.hpp"
#include "czx/rep.hpp"
#include "czx/weights.hpp"

using namespace czx;

namespace {

// Shift applied term by term from its definition.
Signal2D shift_oracle(const HaarSystem& hs, const ShiftOperator& Q, const Signal2D& f, std::array<int, 2> eta) {
  Signal2D out(hs.geometry());
  const auto [k1, k2] = Q.k();
  for (int s = Q.first_scale(); s < hs.n(); ++s) {
    const auto squares = hs.lattice().squares(s);
    for (const auto& I : squares)
      for (const auto& J : squares) {
        if (!(hs.lattice().ancestor(I, k1, k2) == hs.lattice().ancestor(J, k1, k2))) continue;
        const double a = Q.coefficient(s, hs.flat(I), hs.flat(J));
        const double pairing = Q.flavor() == ShiftFlavor::balanced ? inner(f, hs.balanced_haar(I, J))
                                                                   : inner(f, hs.haar_function({I, eta}));
        out += (a * pairing) * hs.haar_function({J, eta});
      }
  }
  return out;
}

}  // namespace

TEST_CASE("shift operators match the term-by-term definition") {
  Rng rng(7);
  const GridGeometry g(4);
  const HaarSystem hs(g, Lattice2D::random(4, rng));
  const Signal2D f = random_signal(g, rng, 4);
  for (ShiftFlavor fl : {ShiftFlavor::balanced, ShiftFlavor::symmetric})
    for (std::array<int, 2> k : {std::array<int, 2>{1, 1}, {2, 1}, {0, 2}, {2, 2}})
      for (std::array<int, 2> eta : {std::array<int, 2>{1, 1}, {1, 0}}) {
        const ShiftOperator Q(hs, k, ShiftCoefficients::random_sign(11), fl, eta);
        CHECK(max_abs_difference(Q.apply(f), shift_oracle(hs, Q, f, eta)) < 1e-12);
      }
}

TEST_CASE("shift adjoints are consistent") {
  Rng rng(8);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  for (ShiftFlavor fl : {ShiftFlavor::balanced, ShiftFlavor::symmetric})
    for (std::array<int, 2> k : {std::array<int, 2>{0, 0}, {1, 2}, {3, 3}, {3, 0}}) {
      const ShiftOperator Q(hs, k, ShiftCoefficients::random_sign(5), fl);
      const Signal2D f = random_signal(g, rng, 5), h = random_signal(g, rng, 5);
      CHECK(inner(Q.apply(f), h) == doctest::Approx(inner(f, Q.apply_adjoint(h))).epsilon(1e-12));
    }
}

TEST_CASE("trivial shifts") {
  Rng rng(9);
  const GridGeometry g(4);
  const HaarSystem hs(g, Lattice2D::random(4, rng));
  const Signal2D f = random_signal(g, rng, 4);
  CHECK(ShiftOperator(hs, {2, 1}, ShiftCoefficients::zero()).apply(f).max_abs() == 0.0);
  CHECK(ShiftOperator(hs, {0, 0}, ShiftCoefficients::random_sign(1)).apply(f).max_abs() < 1e-14);
  // k = (0,0), symmetric flavor with unit coefficients: projection onto the h^(1,1) components.
  const ShiftOperator M(hs, {0, 0}, ShiftCoefficients::constant(1.0), ShiftFlavor::symmetric);
  Signal2D expect(g);
  for (int s = 0; s < 4; ++s)
    for (const auto& I : hs.lattice().squares(s)) {
      const Signal2D h = hs.haar_function({I, {1, 1}});
      expect += inner(f, h) * h;
    }
  CHECK(max_abs_difference(M.apply(f), expect) < 1e-12);
}

TEST_CASE("random sign shifts grow at most like (1 + k)^(1/2)") {
  // Preliminary sweep at n = 5: norm / (1 + k)^(1/2) is at most 1.
  constexpr double kShiftConstant = 1.5;
  Rng rng(10);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  for (int k = 0; k <= 3; ++k)
    for (std::uint64_t draw = 0; draw < 20; ++draw) {
      const ShiftOperator Q(hs, {k, k}, ShiftCoefficients::random_sign(hash_combine(77, draw)));
      const NormEstimate e = operator_norm(Q, 60, draw);
      CHECK(e.norm <= kShiftConstant * std::sqrt(1.0 + k));
    }
}

TEST_CASE("power iteration recovers a known norm") {
  const GridGeometry g(3);
  auto A = [](const Signal2D& f) { return f * 3.0; };
  CHECK(power_iteration_norm(A, A, g, 50, 1).norm == doctest::Approx(3.0).epsilon(1e-9));
  const Signal2D w = Signal2D::generate(g, [](auto i, auto j) { return 1.0 + i + j; });
  // w^{1/2} (3 I) w^{-1/2} = 3 I.
  struct Scale final : LinearOperator {
    GridGeometry g;
    explicit Scale(GridGeometry gg) : g(gg) {}
    const GridGeometry& geometry() const override { return g; }
    Signal2D apply(const Signal2D& f) const override { return f * 3.0; }
    Signal2D apply_adjoint(const Signal2D& f) const override { return f * 3.0; }
  } S(g);
  CHECK(weighted_operator_norm(S, w, 50, 2).norm == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("paraproducts") {
  Rng rng(12);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  const Signal2D b = random_signal(g, rng, 5), f = random_signal(g, rng, 5), h = random_signal(g, rng, 5);
  const Paraproduct P(hs, b);
  // pi_b 1 = b - <b> by Haar reconstruction.
  CHECK(max_abs_difference(P.apply(Signal2D::constant(g, 1.0)), b - Signal2D::constant(g, b.mean())) < 1e-12);
  CHECK(Paraproduct(hs, Signal2D::constant(g, 2.0)).apply(f).max_abs() < 1e-13);
  CHECK(inner(P.apply(f), h) == doctest::Approx(inner(f, P.apply_adjoint(h))).epsilon(1e-12));
  const Paraproduct Pa(hs, b, ParaproductFlavor::adjoint);
  CHECK(inner(Pa.apply(f), h) == doctest::Approx(inner(f, Pa.apply_adjoint(h))).epsilon(1e-12));
}

TEST_CASE("paraproducts are bounded by the BMO norm of the symbol") {
  // Preliminary sweep: at most 0.29 for pi_b and 0.48 for the triple parts.
  constexpr double kParaConstant = 1.0;
  Rng rng(13);
  const GridGeometry g(5);
  for (int t = 0; t < 20; ++t) {
    const HaarSystem hs(g, Lattice2D::random(5, rng));
    const Signal2D b = t % 2 ? random_signal(g, rng, 5) : log_signal(g, rng.uniform(), rng.uniform());
    const Signal2D f = random_signal(g, rng, 5);
    const double scale = bmo_norm(b) * f.norm();
    CHECK(Paraproduct(hs, b).apply(f).norm() <= kParaConstant * scale);
    const ParaproductTriple tr = paraproduct_triple(hs, b, f);
    CHECK(tr.a1.norm() <= kParaConstant * scale);
    CHECK(tr.a2.norm() <= kParaConstant * scale);
  }
}

TEST_CASE("paraproduct triple reconstructs the product") {
  Rng rng(14);
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  const Signal2D b = random_signal(g, rng, 5), f = random_signal(g, rng, 5);
  const ParaproductTriple tr = paraproduct_triple(hs, b, f);
  const Signal2D sum = tr.a1 + tr.a2 + tr.a3 + Signal2D::constant(g, tr.mean_product);
  CHECK(max_abs_difference(sum, b * f) < 1e-12);
  const ParaproductTriple c = paraproduct_triple(hs, Signal2D::constant(g, 3.0), f);
  CHECK(c.a1.max_abs() < 1e-13);
  CHECK(c.a2.max_abs() < 1e-13);
  CHECK(max_abs_difference(c.a3, 3.0 * (f - Signal2D::constant(g, f.mean()))) < 1e-12);
}

TEST_CASE("representation identity on random lattices") {
  Rng rng(15);
  const GridGeometry g(4);
  for (const KernelSpec& s : {KernelSpec::pure(1.0, 1.0), KernelSpec::pure(1.0, 0.5), KernelSpec::bump(0.25, 0.125, 1.0)}) {
    const FormMatrix B(s, g);
    for (int l = 0; l < 2; ++l) {
      const HaarSystem hs(g, Lattice2D::random(4, rng));
      const RepresentationEngine eng(B, hs);
      for (int t = 0; t < 5; ++t) {
        const Signal2D f = random_mean_zero_signal(g, rng, 4), h = random_mean_zero_signal(g, rng, 4);
        const RepDecomposition d = eng.decompose(f, h, s.theta1, s.theta2);
        CHECK(d.identity_error() <= 1e-10);
        CHECK(d.form_value == doctest::Approx(B.form(f, h)).epsilon(1e-12));
        CHECK(d.sigma12 == doctest::Approx(d.sigma12_via_t1).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("normalised representation coefficients are bounded") {
  // Preliminary runs at n = 5: about 36 at theta2 = 1 and 47 at 1/2.
  constexpr double kCoefficientConstant = 64.0;
  Rng rng(16);
  const GridGeometry g(5);
  for (double th2 : {0.5, 1.0}) {
    const FormMatrix B(KernelSpec::pure(1.0, th2), g);
    const HaarSystem hs(g, Lattice2D::random(5, rng));
    const RepDecomposition d =
        decompose(B, hs, random_mean_zero_signal(g, rng, 5), random_mean_zero_signal(g, rng, 5), 1.0, th2);
    CHECK(d.max_normalized_coefficient <= kCoefficientConstant);
    CHECK(d.max_normalized_coefficient > 0.0);
  }
}

TEST_CASE("a narrow bump only fills near-diagonal bands") {
  Rng rng(17);
  const GridGeometry g(5);
  const FormMatrix B(KernelSpec::bump(1.0 / 32, 1.0 / 32, 1.0), g);
  const HaarSystem hs(g, Lattice2D::random(5, rng));
  const RepDecomposition d =
      decompose(B, hs, random_mean_zero_signal(g, rng, 5), random_mean_zero_signal(g, rng, 5));
  for (const auto& e : d.ledger)
    if (std::max(std::abs(e.m1), std::abs(e.m2)) > 1) CHECK(e.coefficient_max == 0.0);
}

TEST_CASE("commutators") {
  Rng rng(18);
  const GridGeometry g(5, Domain::box);
  const BumpConvolution T(KernelSpec::bump(0.25, 0.125, 1.0), g);
  const Signal2D b1 = random_signal(g, rng, 5), b2 = random_signal(g, rng, 5), f = random_signal(g, rng, 5);
  CHECK(commutator_apply(Signal2D::constant(g, 4.0), T, f).max_abs() < 1e-13);
  CHECK(max_abs_difference(commutator_apply(b1 + b2, T, f), commutator_apply(b1, T, f) + commutator_apply(b2, T, f)) <
        1e-12);
}
