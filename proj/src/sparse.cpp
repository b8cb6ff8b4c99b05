#include "czx/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>

#include "czx/errors.hpp"
#include "czx/parallel.hpp"

namespace czx {

namespace {

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// Smallest threshold t with #{v > t} <= budget.
double needed_threshold(std::vector<double> v, std::size_t budget) {
  if (budget >= v.size()) return 0.0;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(budget), v.end(), std::greater<>());
  return v[budget];
}

double raise_to(double current, double needed) {
  while (current < needed) current *= 2.0;
  return current;
}

CellBox triple(std::int64_t r0, std::int64_t c0, std::int64_t s, std::int64_t N) {
  return CellBox{r0 - s, r0 + 2 * s, c0 - s, c0 + 2 * s}.clipped(N);
}

// The level-set recursion shared by the plain and commutator constructions.
class Builder {
 public:
  Builder(const LinearOperator& T, const Signal2D& f, const Signal2D* b, double p, const SparseOptions& opts)
      : T_(T), f_(f), b_(b), p_(p), opts_(opts), g_(f.geometry()), N_(g_.side()), n_(g_.n) {
    require(p >= 1.0, "sparse averages need p >= 1");
    require(g_ == T.geometry(), "signal grid differs from the operator grid");
    require(g_.domain == Domain::box, "sparse domination runs in box mode");
    if (b) require(b->geometry() == g_, "symbol grid differs from the signal grid");
    sets_ = b ? 6 : 3;
    // Prefix sums of |f|^p for all averages over triples.
    fp_.assign(static_cast<std::size_t>((N_ + 1) * (N_ + 1)), 0.0);
    for (std::int64_t i1 = 0; i1 < N_; ++i1)
      for (std::int64_t i2 = 0; i2 < N_; ++i2)
        fp_[idx(i1 + 1, i2 + 1)] = fp_[idx(i1, i2 + 1)] + fp_[idx(i1 + 1, i2)] - fp_[idx(i1, i2)] +
                                   std::pow(std::abs(f(i1, i2)), p);
    // T(f 1_{3P}) and T(b f 1_{3P}) on P for every dyadic P.
    const Signal2D bf = b ? (*b) * f : Signal2D();
    TP_.resize(static_cast<std::size_t>(n_) + 1);
    TbP_.resize(static_cast<std::size_t>(n_) + 1);
    avg_.resize(static_cast<std::size_t>(n_) + 1);
    for (int l = 0; l <= n_; ++l) {
      const std::int64_t s = N_ >> l, cnt = std::int64_t{1} << l;
      auto& tp = TP_[static_cast<std::size_t>(l)];
      auto& tbp = TbP_[static_cast<std::size_t>(l)];
      auto& av = avg_[static_cast<std::size_t>(l)];
      tp.assign(g_.cells(), 0.0);
      if (b) tbp.assign(g_.cells(), 0.0);
      av.assign(static_cast<std::size_t>(cnt * cnt), 0.0);
      parallel_for(static_cast<std::size_t>(cnt * cnt), [&](std::size_t q) {
        const std::int64_t r0 = static_cast<std::int64_t>(q) / cnt * s, c0 = static_cast<std::int64_t>(q) % cnt * s;
        const CellBox P{r0, r0 + s, c0, c0 + s};
        const CellBox P3 = triple(r0, c0, s, N_);
        av[q] = std::pow(box_sum(P3) / static_cast<double>(P3.rows() * P3.cols()), 1.0 / p);
        const auto loc = T.apply_local(f, P3, P);
        std::vector<double> locb;
        if (b) locb = T.apply_local(bf, P3, P);
        for (std::int64_t a = 0; a < s; ++a)
          for (std::int64_t c = 0; c < s; ++c) {
            tp[g_.flat(r0 + a, c0 + c)] = loc[static_cast<std::size_t>(a * s + c)];
            if (b) tbp[g_.flat(r0 + a, c0 + c)] = locb[static_cast<std::size_t>(a * s + c)];
          }
      });
    }
  }

  SparseFamily run() {
    SparseFamily fam;
    fam.geometry = g_;
    fam.p = p_;
    fam.commutator = b_ != nullptr;
    double c = 1.0, A = 1.0;
    for (int attempt = 0;; ++attempt) {
      require<CalibrationError>(attempt <= opts_.max_restarts, "sparse threshold calibration did not settle");
      fam.cubes.clear();
      fam.max_selected_fraction = 0.0;
      bool restart = false;
      std::deque<std::pair<int, std::int64_t>> queue{{0, 0}};
      std::map<std::pair<int, std::int64_t>, int> depth{{{0, 0}, 0}};
      while (!queue.empty() && !restart) {
        const auto [l, q] = queue.front();
        queue.pop_front();
        const NodeData& d = node(l, q);
        const std::int64_t s = N_ >> l, area = s * s;
        const auto budget = static_cast<std::size_t>(
            std::floor(opts_.level_set_budget / static_cast<double>(sets_) * static_cast<double>(area)));
        double need_c = needed_threshold(d.r[0], budget);
        double need_A = 0.0;
        for (int k = 1; k < sets_; ++k) {
          if (k == 3) need_c = std::max(need_c, needed_threshold(d.r[3], budget));
          else need_A = std::max(need_A, needed_threshold(d.r[static_cast<std::size_t>(k)], budget));
        }
        if (c < need_c || A < need_A) {
          c = raise_to(c, need_c);
          A = raise_to(A, need_A);
          restart = true;
          break;
        }
        // Exceptional cells of Q and the maximal dense dyadic squares covering them.
        std::vector<char> omega(static_cast<std::size_t>(area), 0);
        for (std::size_t x = 0; x < omega.size(); ++x)
          for (int k = 0; k < sets_; ++k)
            if (d.r[static_cast<std::size_t>(k)][x] > ((k == 0 || k == 3) ? c : A)) omega[x] = 1;
        const auto chosen = select(l, q, omega);
        SparseCube cube;
        cube.r0 = d.r0;
        cube.c0 = d.c0;
        cube.side = s;
        cube.S = triple(d.r0, d.c0, s, N_);
        cube.depth = depth[{l, q}];
        cube.average = avg_[static_cast<std::size_t>(l)][static_cast<std::size_t>(q)];
        cube.b_mean = d.b_mean;
        std::vector<char> covered(static_cast<std::size_t>(area), 0);
        double need_x = 0.0;
        for (const auto& [cl, cq] : chosen) {
          const std::int64_t cs = N_ >> cl, cnt = std::int64_t{1} << cl;
          const std::int64_t pr0 = cq / cnt * cs, pc0 = cq % cnt * cs;
          cube.selected_cells += cs * cs;
          double best_f = std::numeric_limits<double>::infinity(), best_b = best_f;
          for (std::int64_t a = 0; a < cs; ++a)
            for (std::int64_t e = 0; e < cs; ++e) {
              const auto x = static_cast<std::size_t>((pr0 + a - d.r0) * s + (pc0 + e - d.c0));
              covered[x] = 1;
              if (omega[x]) continue;
              best_f = std::min(best_f, d.xf[static_cast<std::size_t>(cl - l)][x]);
              if (b_) best_b = std::min(best_b, d.xb[static_cast<std::size_t>(cl - l)][x]);
            }
          need_x = std::max(need_x, best_f);
          if (b_) need_x = std::max(need_x, best_b);
        }
        if (A < need_x) {
          A = raise_to(A, need_x);
          restart = true;
          break;
        }
        for (std::int64_t a = 0; a < s; ++a)
          for (std::int64_t e = 0; e < s; ++e)
            if (!covered[static_cast<std::size_t>(a * s + e)])
              cube.witness.push_back(static_cast<std::uint32_t>(g_.flat(d.r0 + a, d.c0 + e)));
        fam.max_selected_fraction =
            std::max(fam.max_selected_fraction, static_cast<double>(cube.selected_cells) / static_cast<double>(area));
        fam.cubes.push_back(std::move(cube));
        for (const auto& child : chosen) {
          depth[child] = depth[{l, q}] + 1;
          queue.push_back(child);
        }
      }
      if (!restart) {
        fam.c = c;
        fam.A = A;
        fam.C = (3.0 + c) * A;
        fam.restarts = attempt;
        return fam;
      }
    }
  }

 private:
  struct NodeData {
    std::int64_t r0 = 0, c0 = 0;
    double b_mean = 0.0;
    // Level-set ratios over the cells of Q: maximal, operator, sharp maximal
    // (then the same three for the commutator symbol).
    std::vector<std::vector<double>> r;
    // x' ratios per sub-level: |T(F 1_{3P})| / <F>_{3P,p} on P for P at level l + k.
    std::vector<std::vector<double>> xf, xb;
  };

  std::size_t idx(std::int64_t a, std::int64_t b) const { return static_cast<std::size_t>(a * (N_ + 1) + b); }
  double box_sum(const CellBox& B) const {
    return fp_[idx(B.r1, B.c1)] - fp_[idx(B.r0, B.c1)] - fp_[idx(B.r1, B.c0)] + fp_[idx(B.r0, B.c0)];
  }

  const NodeData& node(int l, std::int64_t q) {
    auto it = cache_.find({l, q});
    if (it != cache_.end()) return it->second;
    NodeData d;
    const std::int64_t s = N_ >> l, cnt = std::int64_t{1} << l;
    d.r0 = q / cnt * s;
    d.c0 = q % cnt * s;
    const auto area = static_cast<std::size_t>(s * s);
    d.r.assign(static_cast<std::size_t>(sets_), std::vector<double>(area, 0.0));
    const int levels = n_ - l + 1;
    d.xf.assign(static_cast<std::size_t>(levels), std::vector<double>(area, 0.0));
    if (b_) d.xb.assign(static_cast<std::size_t>(levels), std::vector<double>(area, 0.0));
    const double avgQ = avg_[static_cast<std::size_t>(l)][static_cast<std::size_t>(q)];
    const auto& TQ = TP_[static_cast<std::size_t>(l)];
    auto local = [&](std::int64_t i1, std::int64_t i2) { return static_cast<std::size_t>((i1 - d.r0) * s + (i2 - d.c0)); };

    // Commutator symbol data: beta = (b - m) f with m the mean of b over 3Q.
    double m = 0.0, avgBQ = 0.0;
    std::vector<std::vector<double>> avgB;  // per sub-level, per sub-square
    if (b_) {
      const CellBox Q3 = triple(d.r0, d.c0, s, N_);
      double sum = 0.0;
      for (std::int64_t i1 = Q3.r0; i1 < Q3.r1; ++i1)
        for (std::int64_t i2 = Q3.c0; i2 < Q3.c1; ++i2) sum += (*b_)(i1, i2);
      m = sum / static_cast<double>(Q3.rows() * Q3.cols());
      d.b_mean = m;
      avgB.resize(static_cast<std::size_t>(levels));
      for (int k = 0; k < levels; ++k) {
        const std::int64_t ss = s >> k, sub = std::int64_t{1} << k;
        auto& ab = avgB[static_cast<std::size_t>(k)];
        ab.assign(static_cast<std::size_t>(sub * sub), 0.0);
        for (std::int64_t u = 0; u < sub * sub; ++u) {
          const CellBox P3 = triple(d.r0 + u / sub * ss, d.c0 + u % sub * ss, ss, N_);
          double acc = 0.0;
          for (std::int64_t i1 = P3.r0; i1 < P3.r1; ++i1)
            for (std::int64_t i2 = P3.c0; i2 < P3.c1; ++i2)
              acc += std::pow(std::abs(((*b_)(i1, i2) - m) * f_(i1, i2)), p_);
          ab[static_cast<std::size_t>(u)] = std::pow(acc / static_cast<double>(P3.rows() * P3.cols()), 1.0 / p_);
        }
      }
      avgBQ = avgB[0][0];
    }
    auto tbeta = [&](int level, std::size_t cell) {
      return TbP_[static_cast<std::size_t>(level)][cell] - m * TP_[static_cast<std::size_t>(level)][cell];
    };

    for (int k = 0; k < levels; ++k) {
      const int lev = l + k;
      const std::int64_t ss = s >> k, sub = std::int64_t{1} << k, gcnt = std::int64_t{1} << lev;
      const auto& TPl = TP_[static_cast<std::size_t>(lev)];
      for (std::int64_t u = 0; u < sub * sub; ++u) {
        const std::int64_t pr0 = d.r0 + u / sub * ss, pc0 = d.c0 + u % sub * ss;
        const std::int64_t gq = (pr0 / ss) * gcnt + pc0 / ss;
        const double avgP = avg_[static_cast<std::size_t>(lev)][static_cast<std::size_t>(gq)];
        double mx = -std::numeric_limits<double>::infinity(), mn = -mx, bmx = mx, bmn = mn;
        for (std::int64_t i1 = pr0; i1 < pr0 + ss; ++i1)
          for (std::int64_t i2 = pc0; i2 < pc0 + ss; ++i2) {
            const std::size_t cell = g_.flat(i1, i2);
            const double v = TQ[cell] - TPl[cell];
            mx = std::max(mx, v);
            mn = std::min(mn, v);
            if (b_) {
              const double w = tbeta(l, cell) - tbeta(lev, cell);
              bmx = std::max(bmx, w);
              bmn = std::min(bmn, w);
            }
          }
        for (std::int64_t i1 = pr0; i1 < pr0 + ss; ++i1)
          for (std::int64_t i2 = pc0; i2 < pc0 + ss; ++i2) {
            const std::size_t x = local(i1, i2), cell = g_.flat(i1, i2);
            d.r[0][x] = std::max(d.r[0][x], safe_ratio(avgP, avgQ));
            d.r[2][x] = std::max(d.r[2][x], safe_ratio(mx - mn, avgQ));
            d.xf[static_cast<std::size_t>(k)][x] = safe_ratio(std::abs(TPl[cell]), avgP);
            if (b_) {
              const double aB = avgB[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)];
              d.r[3][x] = std::max(d.r[3][x], safe_ratio(aB, avgBQ));
              d.r[5][x] = std::max(d.r[5][x], safe_ratio(bmx - bmn, avgBQ));
              d.xb[static_cast<std::size_t>(k)][x] = safe_ratio(std::abs(tbeta(lev, cell)), aB);
            }
          }
      }
    }
    for (std::int64_t i1 = d.r0; i1 < d.r0 + s; ++i1)
      for (std::int64_t i2 = d.c0; i2 < d.c0 + s; ++i2) {
        const std::size_t x = local(i1, i2), cell = g_.flat(i1, i2);
        d.r[1][x] = safe_ratio(std::abs(TQ[cell]), avgQ);
        if (b_) d.r[4][x] = safe_ratio(std::abs(tbeta(l, cell)), avgBQ);
      }
    return cache_.emplace(std::make_pair(l, q), std::move(d)).first->second;
  }

  // Maximal dyadic squares P strictly inside Q with |P cap omega| > density |P|.
  std::vector<std::pair<int, std::int64_t>> select(int l, std::int64_t q, const std::vector<char>& omega) const {
    const std::int64_t s = N_ >> l, cnt = std::int64_t{1} << l;
    const std::int64_t r0 = q / cnt * s, c0 = q % cnt * s;
    std::vector<std::pair<int, std::int64_t>> out;
    std::vector<char> taken(omega.size(), 0);
    for (int k = 1; k <= n_ - l; ++k) {
      const std::int64_t ss = s >> k, sub = std::int64_t{1} << k, gcnt = std::int64_t{1} << (l + k);
      for (std::int64_t u = 0; u < sub * sub; ++u) {
        const std::int64_t a0 = u / sub * ss, e0 = u % sub * ss;
        if (taken[static_cast<std::size_t>(a0 * s + e0)]) continue;
        std::int64_t hits = 0;
        for (std::int64_t a = a0; a < a0 + ss; ++a)
          for (std::int64_t e = e0; e < e0 + ss; ++e) hits += omega[static_cast<std::size_t>(a * s + e)];
        if (static_cast<double>(hits) > opts_.selection_density * static_cast<double>(ss * ss)) {
          for (std::int64_t a = a0; a < a0 + ss; ++a)
            for (std::int64_t e = e0; e < e0 + ss; ++e) taken[static_cast<std::size_t>(a * s + e)] = 1;
          out.emplace_back(l + k, ((r0 + a0) / ss) * gcnt + (c0 + e0) / ss);
        }
      }
    }
    // Every exceptional cell must be covered (single cells are dense when marked).
    for (std::size_t x = 0; x < omega.size(); ++x)
      if (omega[x] && !taken[x]) throw InvariantViolation("exceptional cell left uncovered");
    return out;
  }

  const LinearOperator& T_;
  const Signal2D& f_;
  const Signal2D* b_;
  double p_;
  SparseOptions opts_;
  GridGeometry g_;
  std::int64_t N_;
  int n_;
  int sets_ = 3;
  std::vector<double> fp_;
  std::vector<std::vector<double>> TP_, TbP_, avg_;
  std::map<std::pair<int, std::int64_t>, NodeData> cache_;
};

DominationCheck check_domination(const Signal2D& target, const Signal2D& bound, double C) {
  DominationCheck d;
  const double scale = std::max(target.max_abs(), 1e-300);
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] <= 1e-13 * scale) continue;
    d.max_ratio = std::max(d.max_ratio, safe_ratio(target[k], bound[k]));
  }
  d.dominated = d.max_ratio <= C * (1.0 + 1e-9);
  return d;
}

double box_power_mean(const Signal2D& h, const CellBox& S, double p) {
  double acc = 0.0;
  for (std::int64_t i1 = S.r0; i1 < S.r1; ++i1)
    for (std::int64_t i2 = S.c0; i2 < S.c1; ++i2) acc += std::pow(std::abs(h(i1, i2)), p);
  return std::pow(acc / static_cast<double>(S.rows() * S.cols()), 1.0 / p);
}

}  // namespace

Signal2D sparse_form_eval(const SparseFamily& S, const Signal2D& f, double p) {
  require(p >= 1.0, "sparse averages need p >= 1");
  const GridGeometry& g = f.geometry();
  std::vector<double> out(g.cells(), 0.0);
  for (const SparseCube& Q : S.cubes) {
    const double a = box_power_mean(f, Q.S, p);
    for (std::int64_t i1 = Q.S.r0; i1 < Q.S.r1; ++i1)
      for (std::int64_t i2 = Q.S.c0; i2 < Q.S.c1; ++i2) out[g.flat(i1, i2)] += a;
  }
  return Signal2D(g, std::move(out));
}

CommutatorForms commutator_forms(const SparseFamily& S, const Signal2D& b, const Signal2D& f, double p) {
  require(p >= 1.0, "sparse averages need p >= 1");
  const GridGeometry& g = f.geometry();
  std::vector<double> s1(g.cells(), 0.0), s2(g.cells(), 0.0);
  for (const SparseCube& Q : S.cubes) {
    double mean = 0.0;
    for (std::int64_t i1 = Q.S.r0; i1 < Q.S.r1; ++i1)
      for (std::int64_t i2 = Q.S.c0; i2 < Q.S.c1; ++i2) mean += b(i1, i2);
    mean /= static_cast<double>(Q.S.rows() * Q.S.cols());
    const Signal2D beta = Signal2D::generate(g, [&](std::int64_t i1, std::int64_t i2) { return (b(i1, i2) - mean) * f(i1, i2); });
    const double a1 = box_power_mean(beta, Q.S, p);
    const double a2 = box_power_mean(f, Q.S, p);
    for (std::int64_t i1 = Q.S.r0; i1 < Q.S.r1; ++i1)
      for (std::int64_t i2 = Q.S.c0; i2 < Q.S.c1; ++i2) {
        s1[g.flat(i1, i2)] += a1;
        s2[g.flat(i1, i2)] += std::abs(b(i1, i2) - mean) * a2;
      }
  }
  return {Signal2D(g, std::move(s1)), Signal2D(g, std::move(s2))};
}

SparseResult sparse_dominate(const LinearOperator& T, const Signal2D& f, double p, const SparseOptions& opts) {
  Builder builder(T, f, nullptr, p, opts);
  SparseResult r;
  r.family = builder.run();
  r.target = T.apply(f).abs();
  r.sparse_sum = sparse_form_eval(r.family, f, p);
  r.check = check_domination(r.target, r.sparse_sum, r.family.C);
  return r;
}

CommutatorSparseResult commutator_sparse(const LinearOperator& T, const Signal2D& b, const Signal2D& f, double p,
                                         const SparseOptions& opts) {
  Builder builder(T, f, &b, p, opts);
  CommutatorSparseResult r;
  r.family = builder.run();
  r.target = commutator_apply(b, T, f).abs();
  CommutatorForms forms = commutator_forms(r.family, b, f, p);
  r.sum1 = std::move(forms.sum1);
  r.sum2 = std::move(forms.sum2);
  r.check = check_domination(r.target, r.sum1 + r.sum2, r.family.C);
  return r;
}

SparsenessCertificate verify_sparseness(const SparseFamily& S) {
  SparsenessCertificate cert;
  std::vector<int> owner(S.geometry.cells(), -1);
  const std::int64_t N = S.geometry.side();
  for (std::size_t k = 0; k < S.cubes.size(); ++k) {
    const SparseCube& Q = S.cubes[k];
    for (std::uint32_t cell : Q.witness) {
      if (cell >= owner.size()) throw InvariantViolation("witness cell outside the grid");
      const std::int64_t i1 = static_cast<std::int64_t>(cell) / N, i2 = static_cast<std::int64_t>(cell) % N;
      if (!Q.S.contains(i1, i2)) throw InvariantViolation("witness cell outside its cube");
      if (owner[cell] != -1) throw InvariantViolation("witness sets overlap");
      owner[cell] = static_cast<int>(k);
    }
    const double frac = static_cast<double>(Q.witness.size()) / static_cast<double>(Q.S.rows() * Q.S.cols());
    cert.epsilon = std::min(cert.epsilon, frac);
    if (Q.side > 0)
      cert.max_selected_fraction = std::max(cert.max_selected_fraction, static_cast<double>(Q.selected_cells) /
                                                                              static_cast<double>(Q.side * Q.side));
    if (cert.depth_measure.size() <= static_cast<std::size_t>(Q.depth)) cert.depth_measure.resize(static_cast<std::size_t>(Q.depth) + 1, 0.0);
    cert.depth_measure[static_cast<std::size_t>(Q.depth)] += static_cast<double>(Q.side * Q.side) * S.geometry.cell_area();
  }
  return cert;
}

}  // namespace czx
