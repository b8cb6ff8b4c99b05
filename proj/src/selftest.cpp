#include "czx/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "czx/errors.hpp"
#include "czx/form.hpp"
#include "czx/haar.hpp"
#include "czx/kernel.hpp"
#include "czx/maximal.hpp"
#include "czx/operator.hpp"
#include "czx/rep.hpp"
#include "czx/rng.hpp"
#include "czx/signal.hpp"
#include "czx/sparse.hpp"
#include "czx/weights.hpp"

namespace czx {

bool SelftestReport::passed() const {
  for (const auto& c : cases)
    if (!c.passed) return false;
  return true;
}

namespace {

class Recorder {
 public:
  explicit Recorder(std::string module) { report_.module = std::move(module); }

  // Runs one case; exceptions count as failures with the message as detail.
  void check(const std::string& name, const std::function<bool(std::string&)>& body) {
    SelftestCase c;
    c.name = name;
    try {
      c.passed = body(c.detail);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("exception: ") + e.what();
    }
    report_.cases.push_back(std::move(c));
  }

  SelftestReport take() { return std::move(report_); }

 private:
  SelftestReport report_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool near(double a, double b, double tol, std::string& detail) {
  detail = num(a) + " vs " + num(b);
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

bool small(double v, double tol, std::string& detail) {
  detail = num(v);
  return std::abs(v) <= tol;
}

SelftestReport lattice_tests() {
  Recorder r("lattice");
  r.check("zero shift gives the standard grid", [](std::string& d) {
    Lattice1D L(ShiftBits(3));
    for (int j = 0; j <= 3; ++j)
      for (std::int64_t m = 0; m < L.count(j); ++m)
        if (L.first_cell({j, m}) != m * L.span(j)) {
          d = "scale " + std::to_string(j);
          return false;
        }
    return true;
  });
  r.check("parent of parent is ancestor 2", [](std::string& d) {
    Rng rng(3);
    Lattice1D L(ShiftBits::random(5, rng));
    for (std::int64_t m = 0; m < 32; ++m) {
      const DyadicInterval I{5, m};
      if (!(L.parent(L.parent(I)) == L.ancestor(I, 2))) {
        d = "index " + std::to_string(m);
        return false;
      }
    }
    return true;
  });
  r.check("ancestor 0 is the identity", [](std::string&) {
    Lattice1D L(ShiftBits(4));
    return L.ancestor({3, 5}, 0) == DyadicInterval{3, 5};
  });
  r.check("rectangle ancestor side ratio", [](std::string& d) {
    Lattice2D L = Lattice2D::standard(5);
    const DyadicRect R{{4, 3}, {4, 9}};
    const DyadicRect A = L.ancestor(R, 3, 1);
    const double ratio = L.first().length(A.first) / L.first().length(A.second);
    return near(ratio, 4.0, 0.0, d);
  });
  r.check("boundary-adjacent interval is not 2-good", [](std::string&) {
    Lattice1D L(ShiftBits(3));
    return !L.is_k_good({2, 0}, 2) && !L.is_k_good({2, 3}, 2);
  });
  r.check("goodness is translation invariant", [](std::string& d) {
    // Digits only below scale 3 translate scale 3 and scale 1 by the same amount.
    Rng rng(9);
    const Lattice1D L0(ShiftBits(6));
    for (int t = 0; t < 8; ++t) {
      std::vector<std::uint8_t> bits(6, 0);
      for (int i = 3; i < 6; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.bit());
      const Lattice1D L(ShiftBits(std::move(bits)));
      for (std::int64_t m = 0; m < 8; ++m)
        if (L.is_k_good({3, m}, 2) != L0.is_k_good({3, m}, 2)) {
          d = "index " + std::to_string(m);
          return false;
        }
    }
    return true;
  });
  r.check("single trial gives 0 or 1", [](std::string& d) {
    const double p = kgood_probability(4, 2, 1, 5);
    d = num(p);
    return p == 0.0 || p == 1.0;
  });
  r.check("16 squares at scale 2", [](std::string& d) {
    const auto fam = Lattice2D::standard(3).enumerate_family(0, 2);
    d = std::to_string(fam.size());
    return fam.size() == 16;
  });
  return r.take();
}

SelftestReport signal_tests() {
  Recorder r("signal");
  const int n = 4;
  const GridGeometry g(n);
  Rng rng(21);
  const HaarSystem hs(g, Lattice2D::random(n, rng));
  r.check("h^(0,0) on the unit square is 1", [&](std::string& d) {
    const Signal2D h = hs.haar_function({{{0, 0}, {0, 0}}, {0, 0}});
    return small(max_abs_difference(h, Signal2D::constant(g, 1.0)), 1e-14, d);
  });
  r.check("orthonormality within one square", [&](std::string& d) {
    const DyadicRect I{{2, 1}, {2, 3}};
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double v = inner(hs.haar_function({I, {a >> 1, a & 1}}), hs.haar_function({I, {b >> 1, b & 1}}));
        worst = std::max(worst, std::abs(v - (a == b ? 1.0 : 0.0)));
      }
    return small(worst, 1e-12, d);
  });
  r.check("H_{I,I} is zero", [&](std::string& d) {
    const DyadicRect I{{3, 2}, {3, 5}};
    return small(hs.balanced_haar(I, I).max_abs(), 0.0, d);
  });
  r.check("H_{I,J} properties on 50 pairs", [&](std::string& d) {
    Rng pick(4);
    for (int t = 0; t < 50; ++t) {
      const int s = static_cast<int>(pick.integer(1, n - 1));
      const std::int64_t Q = std::int64_t{1} << (2 * s);
      const DyadicRect I = hs.square(s, pick.integer(0, Q - 1)), J = hs.square(s, pick.integer(0, Q - 1));
      const Signal2D H = hs.balanced_haar(I, J);
      const double bound = std::exp2(s);  // |I|^{-1/2}
      if (std::abs(H.integral()) > 1e-12 || H.max_abs() > bound * (1 + 1e-12)) {
        d = "pair " + std::to_string(t);
        return false;
      }
      for (std::int64_t i1 = 0; i1 < g.side(); ++i1)
        for (std::int64_t i2 = 0; i2 < g.side(); ++i2) {
          const bool in = hs.lattice().contains_cell(I, i1, i2) || hs.lattice().contains_cell(J, i1, i2);
          if (!in && H(i1, i2) != 0.0) {
            d = "support, pair " + std::to_string(t);
            return false;
          }
        }
      // Constant on children: the projection to scale s+1 reproduces H.
      if (max_abs_difference(hs.expectation_at_scale(H, s + 1), H) > 1e-12) {
        d = "children, pair " + std::to_string(t);
        return false;
      }
    }
    return true;
  });
  r.check("constants have no fluctuation", [&](std::string& d) {
    const Signal2D c = Signal2D::constant(g, 2.5);
    const DyadicRect I{{2, 1}, {2, 2}};
    const double e = max_abs_difference(hs.expectation(c, I), 2.5 * Signal2D::indicator(g, hs.lattice(), I));
    const double f = hs.difference(c, I).max_abs();
    return small(std::max(e, f), 1e-13, d);
  });
  r.check("cancellative Haar is its own difference", [&](std::string& d) {
    const DyadicRect I{{2, 3}, {2, 0}};
    const Signal2D h = hs.haar_function({I, {1, 0}});
    const double e = hs.expectation(h, I).max_abs();
    return small(std::max(e, max_abs_difference(hs.difference(h, I), h)), 1e-12, d);
  });
  r.check("block projection and difference of constants vanish", [&](std::string& d) {
    const Signal2D c = Signal2D::constant(g, -1.25);
    const DyadicRect K{{1, 1}, {1, 0}};
    const double a = hs.block_projection(c, K, 2).max_abs();
    const double b = hs.block_difference(c, K, 2, 2).max_abs();
    return small(std::max(a, b), 1e-13, d);
  });
  r.check("block difference with k = (0,0) is Delta_K", [&](std::string& d) {
    Rng local(8);
    const Signal2D f = random_signal(g, local, n);
    const DyadicRect K{{2, 2}, {2, 1}};
    return small(max_abs_difference(hs.block_difference(f, K, 0, 0), hs.difference(f, K)), 1e-12, d);
  });
  return r.take();
}

SelftestReport kernel_tests() {
  Recorder r("kernel");
  r.check("decay factor at r = 1 with theta2 = 1", [](std::string& d) {
    return near(decay_factor_ratio(1.0, 1.0, false), 0.5, 1e-15, d);
  });
  r.check("decay factor symmetric in the coordinates", [](std::string& d) {
    double worst = 0.0;
    for (double r : {0.01, 0.3, 2.0, 77.0})
      for (double th : {0.1, 0.5, 1.0})
        worst = std::max(worst, std::abs(decay_factor_ratio(r, th, false) - decay_factor_ratio(1.0 / r, th, false)));
    return small(worst, 1e-14, d);
  });
  r.check("bump with equal widths", [](std::string& d) {
    const double t = 0.3, th = 0.7;
    const KernelSpec s = KernelSpec::bump(t, t, th);
    const double u1 = 0.11, u2 = -0.2;
    const double want = std::pow(2.0, -th) / (t * t) * bump_phi(u1 / t) * bump_phi(u2 / t);
    return near(kernel_eval_diff(s, u1, u2), want, 1e-14, d);
  });
  r.check("bump vanishes outside its support", [](std::string& d) {
    const KernelSpec s = KernelSpec::bump(0.25, 0.5, 1.0);
    const double v = std::abs(kernel_eval_diff(s, 0.25, 0.1)) + std::abs(kernel_eval_diff(s, 0.1, -0.5)) +
                     std::abs(kernel_eval_diff(s, 0.3, 0.7));
    return small(v, 0.0, d);
  });
  r.check("pure kernel size ratio is exactly 1", [](std::string& d) {
    const BoundReport rep = verify_kernel_estimates(KernelSpec::pure(1.0, 0.5), 500, 3);
    return near(rep.find("size").max_ratio, 1.0, 1e-12, d);
  });
  r.check("Hormander integrand vanishes at the centre", [](std::string& d) {
    const Square J{{0.25, 0.25}, 0.125};
    return small(hormander_integral(KernelSpec::pure(1.0, 1.0), J, J.center()), 0.0, d);
  });
  return r.take();
}

SelftestReport form_tests() {
  Recorder r("form");
  const int n = 4;
  const GridGeometry g(n);
  Rng rng(31);
  const FormMatrix Bp(KernelSpec::pure(1.0, 0.5), g);
  const FormMatrix Bb(KernelSpec::bump(0.2, 0.3, 1.0), g);
  const Signal2D f1 = random_signal(g, rng, n), f2 = random_signal(g, rng, n), h = random_signal(g, rng, n);
  r.check("bilinearity", [&](std::string& d) {
    const double lhs = Bp.form(2.5 * f1 + f2, h);
    const double rhs = 2.5 * Bp.form(f1, h) + Bp.form(f2, h);
    return near(lhs, rhs, 1e-12, d);
  });
  r.check("swapping the arguments gives the transpose pairing", [&](std::string& d) {
    return near(Bb.form(f1, h), inner(f1, Bb.apply_adjoint(h)), 1e-12, d);
  });
  r.check("disjoint supports give a zero coefficient", [&](std::string& d) {
    const FormMatrix B(KernelSpec::bump(0.05, 0.05, 1.0), g);
    const HaarSystem hs(g, Lattice2D::standard(n));
    const DyadicRect I{{3, 0}, {3, 0}}, J{{3, 4}, {3, 4}};
    return small(haar_coefficient(B, hs, {I, {1, 1}}, {J, {0, 1}}), 0.0, d);
  });
  r.check("WBP ratio invariant under lattice shift", [&](std::string& d) {
    Rng local(2);
    const HaarSystem h0(g, Lattice2D::standard(n)), h1(g, Lattice2D::random(n, local));
    const DyadicRect I{{2, 1}, {2, 2}};
    return near(wbp_check(Bb, h0, I), wbp_check(Bb, h1, I), 1e-12, d);
  });
  r.check("<T1, g> equals the integral of b2 g", [&](std::string& d) {
    const T1Data t1 = t1_functions(Bb);
    const Signal2D m = h - Signal2D::constant(g, h.mean());
    return near(Bb.form(Signal2D::constant(g, 1.0), m), inner(t1.b2, m), 1e-12, d);
  });
  return r.take();
}

SelftestReport rep_tests() {
  Recorder r("rep");
  const int n = 4;
  const GridGeometry g(n);
  Rng rng(41);
  const HaarSystem hs(g, Lattice2D::random(n, rng));
  const Signal2D f = random_signal(g, rng, n), b = random_signal(g, rng, n);
  r.check("zero coefficients give the zero operator", [&](std::string& d) {
    const ShiftOperator Q(hs, {2, 1}, ShiftCoefficients::zero());
    return small(Q.apply(f).max_abs() + Q.apply_adjoint(f).max_abs(), 0.0, d);
  });
  r.check("balanced shift with k = (0,0) is zero", [&](std::string& d) {
    const ShiftOperator Q(hs, {0, 0}, ShiftCoefficients::random_sign(4));
    return small(Q.apply(f).max_abs(), 1e-13, d);
  });
  r.check("symmetric shift with k = (0,0) is a Haar multiplier", [&](std::string& d) {
    const ShiftOperator Q(hs, {0, 0}, ShiftCoefficients::constant(-0.5), ShiftFlavor::symmetric);
    const DyadicRect I{{2, 3}, {2, 1}};
    const Signal2D h11 = hs.haar_function({I, {1, 1}});
    const Signal2D h10 = hs.haar_function({I, {1, 0}});
    const double e = max_abs_difference(Q.apply(h11), -0.5 * h11) + Q.apply(h10).max_abs();
    return small(e, 1e-12, d);
  });
  r.check("paraproduct of a constant symbol is zero", [&](std::string& d) {
    const Paraproduct P(hs, Signal2D::constant(g, 3.0));
    return small(P.apply(f).max_abs(), 1e-12, d);
  });
  r.check("paraproduct triple with constant b", [&](std::string& d) {
    const double c = 1.75;
    const ParaproductTriple t = paraproduct_triple(hs, Signal2D::constant(g, c), f);
    const Signal2D want = c * (f - Signal2D::constant(g, f.mean()));
    return small(t.a1.max_abs() + t.a2.max_abs() + max_abs_difference(t.a3, want), 1e-12, d);
  });
  r.check("commutator with a constant vanishes", [&](std::string& d) {
    const GridGeometry gb(n, Domain::box);
    const BumpConvolution T(KernelSpec::bump(0.25, 0.5, 1.0), gb);
    const Signal2D fb(gb, std::vector<double>(f.values().begin(), f.values().end()));
    return small(commutator_apply(Signal2D::constant(gb, 2.0), T, fb).max_abs(), 1e-12, d);
  });
  r.check("commutator is additive in b", [&](std::string& d) {
    const GridGeometry gb(n, Domain::box);
    const BumpConvolution T(KernelSpec::bump(0.25, 0.5, 1.0), gb);
    Rng local(6);
    const Signal2D b1 = random_signal(gb, local, n), b2 = random_signal(gb, local, n), fb = random_signal(gb, local, n);
    const Signal2D lhs = commutator_apply(b1 + b2, T, fb);
    const Signal2D rhs = commutator_apply(b1, T, fb) + commutator_apply(b2, T, fb);
    return small(max_abs_difference(lhs, rhs), 1e-12, d);
  });
  r.check("representation identity", [&](std::string& d) {
    const FormMatrix B(KernelSpec::pure(1.0, 1.0), g);
    const RepresentationEngine eng(B, hs);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const Signal2D u = random_mean_zero_signal(g, rng, n), v = random_mean_zero_signal(g, rng, n);
      worst = std::max(worst, eng.decompose(u, v).identity_error());
    }
    return small(worst, 1e-10, d);
  });
  return r.take();
}

SelftestReport maximal_tests() {
  Recorder r("maximal");
  const int n = 4;
  const GridGeometry g(n, Domain::box);
  Rng rng(51);
  const Lattice2D L = Lattice2D::random(n, rng);
  const Signal2D f = random_signal(g, rng, n);
  r.check("indicator of a lattice rectangle", [&](std::string& d) {
    const DyadicRect R{{1, 1}, {3, 5}};  // lambda = 4
    const Signal2D ind = Signal2D::indicator(g, L, R);
    const Signal2D M = lattice_maximal(ind, 2, L);
    double lo = 1e300;
    for (std::size_t k = 0; k < ind.size(); ++k)
      if (ind[k] > 0) lo = std::min(lo, M[k]);
    d = num(lo);
    return lo >= 1.0 - 1e-14;
  });
  r.check("maximal functions fix nonnegative constants", [&](std::string& d) {
    const Signal2D c = Signal2D::constant(g, 0.75);
    const double e = max_abs_difference(lattice_maximal(c, -1, L), c) + max_abs_difference(strong_maximal(c), c) +
                     max_abs_difference(iterated_maximal(c), c);
    return small(e, 1e-14, d);
  });
  r.check("lattice maximal below strong maximal", [&](std::string& d) {
    // Standard lattice: shifted lattices contain rectangles that wrap around.
    const Lattice2D L0 = Lattice2D::standard(n);
    const Signal2D Ms = strong_maximal(f);
    double worst = 0.0;
    for (int lam = -3; lam <= 3; ++lam) {
      const Signal2D M = lattice_maximal(f, lam, L0);
      for (std::size_t k = 0; k < M.size(); ++k) worst = std::max(worst, M[k] - Ms[k]);
    }
    return small(std::max(worst, 0.0), 1e-13, d);
  });
  r.check("sub-cell bump has zero sharp maximal function", [&](std::string& d) {
    const BumpConvolution T(KernelSpec::bump(0.5 / 16, 0.5 / 16, 1.0), g);
    return small(sharp_maximal(T, f).max_abs(), 1e-14, d);
  });
  return r.take();
}

SparseCube cube(std::int64_t r0, std::int64_t c0, std::int64_t side, int depth) {
  SparseCube q;
  q.r0 = r0;
  q.c0 = c0;
  q.side = side;
  q.S = {r0, r0 + side, c0, c0 + side};
  q.depth = depth;
  return q;
}

void add_witness(SparseCube& q, const GridGeometry& g, const CellBox& box) {
  for (std::int64_t i1 = box.r0; i1 < box.r1; ++i1)
    for (std::int64_t i2 = box.c0; i2 < box.c1; ++i2) q.witness.push_back(static_cast<std::uint32_t>(g.flat(i1, i2)));
}

SelftestReport sparse_tests() {
  Recorder r("sparse");
  const int n = 4;
  const GridGeometry g(n, Domain::box);
  const std::int64_t N = g.side();
  Rng rng(61);
  const Signal2D f = random_signal(g, rng, n);
  r.check("zero operator is dominated", [&](std::string& d) {
    const SparseResult res = sparse_dominate(ZeroOperator(g), f, 2.0);
    d = num(res.check.max_ratio);
    return res.check.dominated && res.check.max_ratio == 0.0;
  });
  r.check("single root cube with f = 1", [&](std::string& d) {
    SparseFamily S;
    S.geometry = g;
    S.cubes.push_back(cube(0, 0, N, 0));
    const Signal2D one = Signal2D::constant(g, 1.0);
    return small(max_abs_difference(sparse_form_eval(S, one, 1.5), one), 1e-14, d);
  });
  r.check("sparse averages increase with p", [&](std::string& d) {
    SparseFamily S;
    S.geometry = g;
    S.cubes.push_back(cube(0, 0, N, 0));
    S.cubes.push_back(cube(4, 8, 4, 1));
    const Signal2D a = sparse_form_eval(S, f, 1.1), b = sparse_form_eval(S, f, 2.0), c = sparse_form_eval(S, f, 3.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max({worst, a[k] - b[k], b[k] - c[k]});
    return small(std::max(worst, 0.0), 1e-13, d);
  });
  r.check("disjoint cubes with full witnesses", [&](std::string& d) {
    SparseFamily S;
    S.geometry = g;
    for (std::int64_t a = 0; a < 2; ++a)
      for (std::int64_t b = 0; b < 2; ++b) {
        SparseCube q = cube(a * 8, b * 8, 8, 0);
        add_witness(q, g, q.S);
        S.cubes.push_back(q);
      }
    return near(verify_sparseness(S).epsilon, 1.0, 0.0, d);
  });
  r.check("nested cubes with half witnesses", [&](std::string& d) {
    SparseFamily S;
    S.geometry = g;
    SparseCube outer = cube(0, 0, N, 0), inner_cube = cube(0, 0, N / 2, 1);
    add_witness(outer, g, {N / 2, N, 0, N});
    add_witness(inner_cube, g, {N / 4, N / 2, 0, N / 2});
    S.cubes = {outer, inner_cube};
    return near(verify_sparseness(S).epsilon, 0.5, 0.0, d);
  });
  r.check("commutator with constant b", [&](std::string& d) {
    const BumpConvolution T(KernelSpec::bump(0.25, 0.25, 1.0), g);
    const CommutatorSparseResult res = commutator_sparse(T, Signal2D::constant(g, 1.5), f, 2.0);
    d = num(res.target.max_abs()) + ", sum1 " + num(res.sum1.max_abs());
    return res.check.dominated && res.target.max_abs() <= 1e-12 && res.sum1.max_abs() <= 1e-12;
  });
  return r.take();
}

SelftestReport weights_tests() {
  Recorder r("weights");
  const int n = 4;
  const GridGeometry g(n, Domain::box);
  Rng rng(71);
  const Signal2D one = Signal2D::constant(g, 1.0);
  const Signal2D f = random_signal(g, rng, n);
  r.check("A_p constant of w = 1", [&](std::string& d) {
    const double a = ap_constant(one, 2.0, ApFamily::cubes).value;
    const double b = ap_constant(one, 3.0, ApFamily::rectangles).value;
    return near(a, 1.0, 1e-13, d) && near(b, 1.0, 1e-13, d);
  });
  r.check("A_p constant is at least 1", [&](std::string& d) {
    const Signal2D w = random_positive_signal(g, rng, n);
    const double a = ap_constant(w, 1.5, ApFamily::cubes).value;
    d = num(a);
    return a >= 1.0 - 1e-13;
  });
  r.check("BMO of a constant is zero", [&](std::string& d) {
    return small(bmo_norm(Signal2D::constant(g, -4.0)), 1e-13, d);
  });
  r.check("BMO_nu with nu = 1 is BMO", [&](std::string& d) {
    const BmoNorms b = bmo_norms(f, one);
    return near(b.weighted, b.plain, 1e-13, d);
  });
  r.check("weighted norm with w = 1 and scaling", [&](std::string& d) {
    const Signal2D w = random_positive_signal(g, rng, n);
    if (!near(weighted_norm(f, one, 1.5), f.norm(1.5), 1e-13, d)) return false;
    return near(weighted_norm(-3.0 * f, w, 2.0), 3.0 * weighted_norm(f, w, 2.0), 1e-13, d);
  });
  r.check("unit weight reduces to unweighted bounds", [&](std::string& d) {
    const WeightedCheckReport rep =
        weighted_boundedness_check(KernelSpec::bump(1.0, 1.0, 1.0), 2.0, constant_weight(g), 2, 5, 3);
    d = num(rep.max_ratio) + " ap " + num(rep.ap);
    return std::isfinite(rep.max_ratio) && rep.max_ratio <= 1.0 + 1e-12 && std::abs(rep.ap - 1.0) < 1e-13;
  });
  return r.take();
}

}  // namespace

std::vector<std::string> selftest_modules() {
  return {"lattice", "signal", "kernel", "form", "rep", "maximal", "sparse", "weights"};
}

SelftestReport run_selftest(const std::string& module) {
  if (module == "lattice") return lattice_tests();
  if (module == "signal") return signal_tests();
  if (module == "kernel") return kernel_tests();
  if (module == "form") return form_tests();
  if (module == "rep") return rep_tests();
  if (module == "maximal") return maximal_tests();
  if (module == "sparse") return sparse_tests();
  if (module == "weights") return weights_tests();
  throw ParameterError("unknown selftest module: " + module);
}

}  // namespace czx
