// Acceptance report: one PASS/FAIL line per criterion.
//
//   acceptance                  run all ten criteria
//   acceptance --criterion N    run one
//
// Exit status: 0 when every selected criterion passes, 77 when the only
// failures are criteria known to be out of reach on desk-size grids (listed in
// kKnownOutOfReach; the README explains each), 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "czx/form.hpp"
#include "czx/kernel.hpp"
#include "czx/lattice.hpp"
#include "czx/maximal.hpp"
#include "czx/rep.hpp"
#include "czx/sparse.hpp"
#include "czx/stats.hpp"
#include "czx/weights.hpp"

using namespace czx;

namespace {

constexpr std::uint64_t kSeed = 1;

// Constants frozen after the first calibration run.
constexpr double kSharpMaximalConstant = 0.40;
constexpr double kCommutatorConstant = 0.2;
constexpr double kHormanderConstant = 32.0;

const std::set<int> kKnownOutOfReach{3, 4, 5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Outcome check_representation_identity() {
  double worst = 0.0;
  const GridGeometry g(5);
  Rng rng(kSeed);
  std::vector<Lattice2D> lattices;
  for (int l = 0; l < 5; ++l) lattices.push_back(Lattice2D::random(5, rng));
  for (const KernelSpec& s : {KernelSpec::bump(0.25, 0.125, 1.0), KernelSpec::pure(1.0, 1.0)}) {
    const FormMatrix B(s, g);
    std::vector<std::pair<Signal2D, Signal2D>> pairs;
    for (int t = 0; t < 20; ++t) pairs.emplace_back(random_mean_zero_signal(g, rng, 5), random_mean_zero_signal(g, rng, 5));
    for (const auto& L : lattices) {
      const HaarSystem hs(g, L);
      const RepresentationEngine eng(B, hs);
      for (const auto& [f, h] : pairs) worst = std::max(worst, eng.decompose(f, h, s.theta1, s.theta2).identity_error());
    }
  }
  return {worst <= 1e-10, "max relative residual " + fmt(worst) + " (tolerance 1e-10)"};
}

Outcome check_kgood() {
  double lo = 1.0, hi = 0.0;
  for (int j = 2; j <= 8; ++j)
    for (int k = 2; k <= j; ++k) {
      const std::uint64_t s = hash_combine(hash_combine(kSeed, static_cast<std::uint64_t>(j)), static_cast<std::uint64_t>(k));
      const double p = kgood_probability(j, k, 10000, s);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  return {lo >= 0.48 && hi <= 0.52, "estimates in [" + fmt(lo) + ", " + fmt(hi) + "], required [0.48, 0.52]"};
}

Outcome check_haar_decay() {
  // Squares of side 1/8 at two resolutions.
  constexpr int kScale = 3;
  bool ok = true;
  std::ostringstream os;
  for (double th2 : {0.5, 1.0}) {
    DecayReport r[2];
    for (int i = 0; i < 2; ++i) {
      const int n = 5 + i;
      const GridGeometry g(n);
      r[i] = decay_report(FormMatrix(KernelSpec::pure(1.0, th2), g), HaarSystem(g, Lattice2D::standard(n)), 1.0, th2,
                          kScale);
    }
    os << "theta2=" << th2 << ":";
    for (std::size_t c = 0; c < 4; ++c) {
      const double a = r[0].cases[c].max_ratio, b = r[1].cases[c].max_ratio;
      const double spread = std::max(a, b) / std::min(a, b);
      const bool good = std::isfinite(a) && std::isfinite(b) && a > 0 && b > 0 && spread <= 2.0;
      ok = ok && good;
      os << " " << to_string(r[0].cases[c].kind) << " x" << fmt(spread) << (good ? "" : "!");
    }
    const double need = 1.0 + 0.5 * std::min(1.0, th2) - 0.15;
    const double slope = r[1].decay_slope_per_parameter;
    ok = ok && slope >= need;
    os << "; slope " << fmt(slope) << " (need " << fmt(need) << ")" << (slope >= need ? "" : "!") << "; ";
  }
  return {ok, os.str()};
}

Outcome check_counterexample() {
  const CounterexampleReport r = counterexample_experiment(2.0, 1.5, 0.1, 9);
  const bool sigma = std::abs(r.slope_sigma + 0.5) <= 0.05;
  const bool w = std::abs(r.slope_w) <= 0.05;
  return {sigma && w && r.ratio_monotone_tail,
          "sigma slope " + fmt(r.slope_sigma) + (sigma ? "" : "!") + " (need -0.5 +- 0.05), w slope " + fmt(r.slope_w) +
              (w ? "" : "!") + " (need 0 +- 0.05), ratio increasing over last 5 points: " +
              (r.ratio_monotone_tail ? "yes" : "no!")};
}

Outcome check_weighted_contrast() {
  const GridGeometry g(8, Domain::box);
  const Weight w = power_weight(g, 1.5);
  double worst = 0.0;
  for (bool lg : {false, true}) {
    const WeightedCheckReport r = weighted_boundedness_check(KernelSpec::bump(1.0, 1.0, 1.0, lg), 2.0, w, 5, kSeed, 10);
    worst = std::max(worst, r.max_over_baseline);
  }
  const CounterexampleReport c = counterexample_experiment(2.0, 1.5, 0.1, 9);
  const bool uniform = worst <= 2.0, diverges = c.growth_over_baseline >= 2.0;
  return {uniform && diverges, "theta2=1 max/baseline " + fmt(worst) + (uniform ? "" : "!") +
                                   " (need <= 2); theta2=0.1 growth " + fmt(c.growth_over_baseline) +
                                   (diverges ? "" : "!") + " (need >= 2)"};
}

Outcome check_sharp_maximal() {
  const MaximalReport r = sharp_maximal_sweep(6, 1.0, false, {0, 1, 2, 3, 4, 5}, 10, kSeed, kSharpMaximalConstant);
  return {r.dominated, "max M#/M* " + fmt(r.max_ratio) + " over " + std::to_string(r.rows.size()) +
                           " width pairs, frozen C = " + fmt(kSharpMaximalConstant)};
}

Outcome check_sparse_domination() {
  const GridGeometry g(6, Domain::box);
  bool ok = true;
  double eps = 1.0, sel = 0.0;
  int runs = 0;
  for (double p : {1.1, 2.0})
    for (bool comm : {false, true})
      for (int t = 0; t < 10; ++t) {
        Rng rng(hash_combine(kSeed, static_cast<std::uint64_t>(t)));
        const BumpConvolution T(KernelSpec::bump(std::exp2(-1 - t % 5), std::exp2(-1 - (t / 2) % 5), 1.0), g);
        const Signal2D f = random_signal(g, rng, 6);
        SparseFamily fam;
        DominationCheck chk;
        if (comm) {
          CommutatorSparseResult r = commutator_sparse(T, random_signal(g, rng, 6), f, p);
          fam = std::move(r.family);
          chk = r.check;
        } else {
          SparseResult r = sparse_dominate(T, f, p);
          fam = std::move(r.family);
          chk = r.check;
        }
        const SparsenessCertificate cert = verify_sparseness(fam);
        eps = std::min(eps, cert.epsilon);
        sel = std::max(sel, cert.max_selected_fraction);
        ok = ok && chk.dominated;
        ++runs;
      }
  ok = ok && eps >= 1.0 / 16 && sel <= 0.5;
  return {ok, std::to_string(runs) + " runs dominated: " + (ok ? "yes" : "no") + ", min epsilon " + fmt(eps) +
                  ", max selected fraction " + fmt(sel)};
}

Outcome check_shift_norms() {
  const int n = 7, kmax = 6;
  const GridGeometry g(n);
  const HaarSystem hs(g, Lattice2D::standard(n));
  std::vector<double> x, y;
  double envelope = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const std::uint64_t cs = hash_combine(kSeed, 0);
    const double diag = operator_norm(ShiftOperator(hs, {k, k}, ShiftCoefficients::random_sign(cs)), 200, cs + 1).norm;
    if (k >= 1) {
      x.push_back(1.0 + k);
      y.push_back(diag);
    }
    const double first = operator_norm(ShiftOperator(hs, {k, 0}, ShiftCoefficients::random_sign(cs)), 200, cs + 1).norm;
    envelope = std::max(envelope, first / (std::sqrt(1.0 + k) * std::exp2(k)));
  }
  const double slope = loglog_slope(x, y);
  // The (k,0) envelope constant: norms are at most 1 at k = 0 by orthogonality.
  const bool ok = slope <= 0.6 && envelope <= 1.0;
  return {ok, "diagonal log-log slope " + fmt(slope) + " (need <= 0.6), (k,0) envelope constant " + fmt(envelope) +
                  " (need <= 1)"};
}

Outcome check_commutator_bound() {
  double per_n[2][3] = {};
  const double ps[3] = {1.5, 2.0, 3.0};
  for (int i = 0; i < 2; ++i) {
    const GridGeometry g(5 + i, Domain::box);
    for (int k = 0; k < 20; ++k) {
      Rng rng(hash_combine(kSeed, static_cast<std::uint64_t>(k)));
      const BumpConvolution T(KernelSpec::bump(std::exp2(-1 - (k % 4)), std::exp2(-1 - (k / 4) % 4), 1.0), g);
      const Signal2D b = random_signal(g, rng), f = random_signal(g, rng);
      const Signal2D c = commutator_apply(b, T, f);
      const double bmo = bmo_norm(b);
      for (int pi = 0; pi < 3; ++pi) per_n[i][pi] = std::max(per_n[i][pi], c.norm(ps[pi]) / (bmo * f.norm(ps[pi])));
    }
  }
  bool ok = true;
  std::ostringstream os;
  for (int pi = 0; pi < 3; ++pi) {
    const double a = per_n[0][pi], b = per_n[1][pi];
    const bool good = a <= kCommutatorConstant && b <= kCommutatorConstant && std::max(a, b) <= 2 * std::min(a, b);
    ok = ok && good;
    os << "p=" << ps[pi] << ": " << fmt(a) << " / " << fmt(b) << (good ? "" : "!") << "; ";
  }
  os << "frozen C = " << kCommutatorConstant;
  return {ok, os.str()};
}

Outcome check_kernel_suite() {
  const Point2 x{0.5, 0.5};
  double lo = INFINITY, hi = 0.0;
  for (int k = 1; k <= 8; ++k) {
    const double h = std::exp2(-k);
    const double v = slice_integral(KernelSpec::pure(1.0, 1.0), x, 0.5 - h) * h;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double spread = hi / lo;
  double worst = 0.0;
  const KernelSpec s = KernelSpec::pure(1.0, 1.0);
  for (int k = 1; k <= 6; ++k) {
    const double l = std::exp2(-k);
    const Square J{{0.25, 0.25}, l};
    for (Point2 p : {Point2{0.25, 0.25}, Point2{0.25 + 0.5 * l, 0.25 + 0.1 * l}, Point2{0.25 + 0.9 * l, 0.25 + 0.3 * l}})
      worst = std::max(worst, hormander_integral(s, J, p));
  }
  const bool ok = spread <= 1.05 && worst <= kHormanderConstant;
  return {ok, "slice spread " + fmt(spread) + " (need <= 1.05), Hoermander max " + fmt(worst) + " (frozen C = " +
                  fmt(kHormanderConstant) + ")"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"representation identity", check_representation_identity},
      {"k-good probability", check_kgood},
      {"Haar coefficient decay", check_haar_decay},
      {"counterexample slopes", check_counterexample},
      {"weighted boundedness contrast", check_weighted_contrast},
      {"sharp maximal domination", check_sharp_maximal},
      {"sparse domination", check_sparse_domination},
      {"shift norms", check_shift_norms},
      {"commutator bound", check_commutator_bound},
      {"kernel analysis suite", check_kernel_suite},
  };
  std::vector<int> selected;
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const int c = std::atoi(argv[2]);
    if (c < 1 || c > static_cast<int>(all.size())) {
      std::fprintf(stderr, "criterion must lie in [1, %zu]\n", all.size());
      return 2;
    }
    selected.push_back(c);
  } else if (argc == 1) {
    for (int c = 1; c <= static_cast<int>(all.size()); ++c) selected.push_back(c);
  } else {
    std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
    return 2;
  }

  bool unexpected = false, known = false;
  for (int c : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[static_cast<std::size_t>(c - 1)].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s -- %s [%.1fs]\n", c, all[static_cast<std::size_t>(c - 1)].name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) (kKnownOutOfReach.count(c) ? known : unexpected) = true;
  }
  if (unexpected) return 1;
  return known ? 77 : 0;
}
