#include "common.hpp"
#include "czx/errors.hpp"
#include "czx/sparse.hpp"
#include "czx/weights.hpp"

using namespace czx;

namespace {

// Per-cube averages computed straight from the cube list.
Signal2D sparse_oracle(const SparseFamily& S, const Signal2D& f, double p) {
  Signal2D out(S.geometry);
  std::vector<double> v(out.size(), 0.0);
  for (const auto& Q : S.cubes) {
    double s = 0.0;
    for (std::int64_t i = Q.S.r0; i < Q.S.r1; ++i)
      for (std::int64_t j = Q.S.c0; j < Q.S.c1; ++j) s += std::pow(std::abs(f(i, j)), p);
    const double avg = std::pow(s / static_cast<double>(Q.S.rows() * Q.S.cols()), 1.0 / p);
    for (std::int64_t i = Q.S.r0; i < Q.S.r1; ++i)
      for (std::int64_t j = Q.S.c0; j < Q.S.c1; ++j) v[static_cast<std::size_t>(i * f.side() + j)] += avg;
  }
  return Signal2D(S.geometry, v);
}

SparseCube cube(std::int64_t r0, std::int64_t c0, std::int64_t side, int depth = 0) {
  SparseCube q;
  q.r0 = r0;
  q.c0 = c0;
  q.side = side;
  q.S = {r0, r0 + side, c0, c0 + side};
  q.depth = depth;
  return q;
}

void witness_all(SparseCube& q, std::int64_t N) {
  for (std::int64_t i = q.S.r0; i < q.S.r1; ++i)
    for (std::int64_t j = q.S.c0; j < q.S.c1; ++j) q.witness.push_back(static_cast<std::uint32_t>(i * N + j));
}

}  // namespace

TEST_CASE("sparse forms") {
  Rng rng(1);
  const GridGeometry g(4, Domain::box);
  SparseFamily S;
  S.geometry = g;
  S.cubes = {cube(0, 0, 16), cube(0, 0, 8, 1), cube(4, 8, 4, 2)};
  const Signal2D f = random_signal(g, rng, 4);
  for (double p : {1.0, 1.5, 3.0}) CHECK(max_abs_difference(sparse_form_eval(S, f, p), sparse_oracle(S, f, p)) < 1e-12);
  Signal2D prev = sparse_form_eval(S, f, 1.0);
  for (double p : {1.2, 2.0, 4.0}) {
    const Signal2D cur = sparse_form_eval(S, f, p);
    for (std::size_t i = 0; i < cur.size(); ++i) CHECK(cur[i] >= prev[i] - 1e-12);
    prev = cur;
  }
  SparseFamily root;
  root.geometry = g;
  root.cubes = {cube(0, 0, 16)};
  CHECK(max_abs_difference(sparse_form_eval(root, Signal2D::constant(g, 1.0), 2.0), Signal2D::constant(g, 1.0)) < 1e-14);
}

TEST_CASE("sparseness certificates of hand-built families") {
  const GridGeometry g(3, Domain::box);
  SparseFamily S;
  S.geometry = g;
  S.cubes = {cube(0, 0, 4), cube(4, 4, 4)};
  for (auto& q : S.cubes) witness_all(q, 8);
  CHECK(verify_sparseness(S).epsilon == 1.0);

  SparseFamily N;
  N.geometry = g;
  N.cubes = {cube(0, 0, 8), cube(0, 0, 4, 1)};
  // Outer witness: the right half; inner: the lower half of the inner square.
  for (std::int64_t i = 0; i < 8; ++i)
    for (std::int64_t j = 4; j < 8; ++j) N.cubes[0].witness.push_back(static_cast<std::uint32_t>(i * 8 + j));
  for (std::int64_t i = 2; i < 4; ++i)
    for (std::int64_t j = 0; j < 4; ++j) N.cubes[1].witness.push_back(static_cast<std::uint32_t>(i * 8 + j));
  CHECK(verify_sparseness(N).epsilon == 0.5);

  N.cubes[1].witness.push_back(static_cast<std::uint32_t>(0 * 8 + 5));  // overlaps the outer witness
  CHECK_THROWS_AS(verify_sparseness(N), InvariantViolation);
}

TEST_CASE("zero operator") {
  Rng rng(2);
  const GridGeometry g(4, Domain::box);
  const ZeroOperator Z(g);
  const SparseResult r = sparse_dominate(Z, random_signal(g, rng, 4), 1.5);
  CHECK(r.check.dominated);
  CHECK(r.family.cubes.size() <= 1);
  CHECK(r.target.max_abs() == 0.0);
}

TEST_CASE("bump kernels are sparsely dominated") {
  const GridGeometry g(5, Domain::box);
  const double ps[] = {1.1, 1.5, 2.0};
  double Cmax[3] = {0, 0, 0};
  for (int pi = 0; pi < 3; ++pi)
    for (int t = 0; t < 20; ++t) {
      Rng rng(hash_combine(5, static_cast<std::uint64_t>(t)));
      const BumpConvolution T(KernelSpec::bump(std::exp2(-1 - t % 5), std::exp2(-1 - (t / 2) % 5), 1.0), g);
      const Signal2D f = random_signal(g, rng, 5);
      const SparseResult r = sparse_dominate(T, f, ps[pi]);
      // Independent cellwise check of |Tf| <= C * sparse sum.
      const Signal2D Tf = T.apply(f).abs(), sum = sparse_oracle(r.family, f, ps[pi]);
      double worst = 0.0;
      for (std::size_t i = 0; i < Tf.size(); ++i) worst = std::max(worst, Tf[i] / sum[i]);
      CHECK(worst <= r.family.C * (1 + 1e-12));
      CHECK(r.check.dominated);
      const SparsenessCertificate cert = verify_sparseness(r.family);
      CHECK(cert.epsilon >= 1.0 / 16);
      CHECK(cert.max_selected_fraction <= 0.5);
      // Nested squares halve in measure at every generation.
      for (std::size_t d = 0; d < cert.depth_measure.size(); ++d) CHECK(cert.depth_measure[d] <= std::ldexp(1.0, -static_cast<int>(d)) + 1e-12);
      Cmax[pi] = std::max(Cmax[pi], r.family.C);
    }
  // Calibrated constants come out the same at every p on this grid; the
  // frozen bound C <= 5 p' (set at p = 2) and a spread of at most 4 across p.
  for (int pi = 0; pi < 3; ++pi) CHECK(Cmax[pi] <= 5.0 * ps[pi] / (ps[pi] - 1));
  CHECK(*std::max_element(Cmax, Cmax + 3) <= 4 * *std::min_element(Cmax, Cmax + 3));
}

TEST_CASE("commutators are sparsely dominated") {
  const GridGeometry g(5, Domain::box);
  for (double p : {1.1, 2.0})
    for (int t = 0; t < 10; ++t) {
      Rng rng(hash_combine(6, static_cast<std::uint64_t>(t)));
      const BumpConvolution T(KernelSpec::bump(std::exp2(-1 - t % 4), std::exp2(-1 - (t / 2) % 4), 1.0), g);
      const Signal2D b = random_signal(g, rng, 5), f = random_signal(g, rng, 5);
      const CommutatorSparseResult r = commutator_sparse(T, b, f, p);
      CHECK(r.check.dominated);
      const CommutatorForms forms = commutator_forms(r.family, b, f, p);
      const Signal2D target = commutator_apply(b, T, f).abs();
      for (std::size_t i = 0; i < target.size(); ++i)
        CHECK(target[i] <= r.family.C * (forms.sum1[i] + forms.sum2[i]) * (1 + 1e-12) + 1e-14);
      CHECK(verify_sparseness(r.family).epsilon >= 1.0 / 16);
    }
  Rng rng(7);
  const BumpConvolution T(KernelSpec::bump(0.25, 0.25, 1.0), g);
  const Signal2D f = random_signal(g, rng, 5);
  const CommutatorSparseResult c = commutator_sparse(T, Signal2D::constant(g, 2.0), f, 1.5);
  CHECK(c.target.max_abs() < 1e-12);
  CHECK(c.sum1.max_abs() < 1e-12);
  CHECK(c.sum2.max_abs() < 1e-12);
}

TEST_CASE("two-weight commutator bound with power weights") {
  // With nu = w^(1/p) lambda^(-1/p); preliminary maximum 0.024.
  constexpr double kTwoWeightConstant = 0.1;
  const GridGeometry g(6, Domain::box);
  const double p = 2.0;
  for (double a : {0.5, 1.0})
    for (double l : {-0.5, 0.5, 1.0}) {
      const Weight w = power_weight(g, a), lam = power_weight(g, l);
      const Signal2D nu = Signal2D::generate(
          g, [&](auto i, auto j) { return std::pow(w.values(i, j), 1 / p) * std::pow(lam.values(i, j), -1 / p); });
      for (int t = 0; t < 3; ++t) {
        Rng rng(hash_combine(9, static_cast<std::uint64_t>(t)));
        const BumpConvolution T(KernelSpec::bump(std::exp2(-1 - t), 0.25, 1.0), g);
        const Signal2D b = random_signal(g, rng, 6), f = random_signal(g, rng, 6);
        const double lhs = weighted_norm(commutator_apply(b, T, f), lam.values, p);
        CHECK(lhs <= kTwoWeightConstant * bmo_norms(b, nu).weighted * weighted_norm(f, w.values, p));
      }
    }
}
