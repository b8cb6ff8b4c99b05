#include "czx/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "czx/errors.hpp"
#include "czx/parallel.hpp"

namespace czx {

Signal2D lattice_maximal(const Signal2D& f, int log2_lambda, const Lattice2D& lattice) {
  const GridGeometry& g = f.geometry();
  require(lattice.n() == g.n, "lattice depth differs from the grid");
  const int n = g.n;
  const std::int64_t N = g.side();
  const Signal2D a = f.abs();
  std::vector<double> out(g.cells(), 0.0);
  // Rectangle scales (j1, j2) with l(I^1) = 2^{log2_lambda} l(I^2): j1 = j2 - log2_lambda.
  for (int j2 = 0; j2 <= n; ++j2) {
    const int j1 = j2 - log2_lambda;
    if (j1 < 0 || j1 > n) continue;
    const std::int64_t c1 = std::int64_t{1} << j1, c2 = std::int64_t{1} << j2;
    std::vector<double> sum(static_cast<std::size_t>(c1 * c2), 0.0);
    for (std::int64_t i1 = 0; i1 < N; ++i1) {
      const std::int64_t m1 = lattice.first().index_of_cell(j1, i1);
      for (std::int64_t i2 = 0; i2 < N; ++i2)
        sum[static_cast<std::size_t>(m1 * c2 + lattice.second().index_of_cell(j2, i2))] += a(i1, i2);
    }
    const double cells_per = static_cast<double>((N / c1) * (N / c2));
    for (std::int64_t i1 = 0; i1 < N; ++i1) {
      const std::int64_t m1 = lattice.first().index_of_cell(j1, i1);
      for (std::int64_t i2 = 0; i2 < N; ++i2) {
        const double v = sum[static_cast<std::size_t>(m1 * c2 + lattice.second().index_of_cell(j2, i2))] / cells_per;
        double& o = out[g.flat(i1, i2)];
        o = std::max(o, v);
      }
    }
  }
  return Signal2D(g, std::move(out));
}

namespace {

// h[x] = max over intervals [c0, c1) containing x of val(c0, c1), for a
// function given on all 0 <= c0 < c1 <= N. O(N^2).
template <class Val>
void interval_sup(std::int64_t N, Val&& val, std::vector<double>& h, std::vector<double>& scratch) {
  // scratch[c0 * N + x] = max over c1 > x of val(c0, c1), for x >= c0.
  h.assign(static_cast<std::size_t>(N), 0.0);
  scratch.assign(static_cast<std::size_t>(N), 0.0);
  for (std::int64_t c0 = 0; c0 < N; ++c0) {
    double run = -std::numeric_limits<double>::infinity();
    for (std::int64_t c1 = N; c1 > c0; --c1) {
      run = std::max(run, val(c0, c1));
      // c1 - 1 is the largest x covered by [c0, c1); all c1' >= c1 cover it too.
      scratch[static_cast<std::size_t>(c1 - 1)] = run;
    }
    for (std::int64_t x = c0; x < N; ++x) h[static_cast<std::size_t>(x)] = std::max(h[static_cast<std::size_t>(x)], scratch[static_cast<std::size_t>(x)]);
  }
}

}  // namespace

Signal2D strong_maximal(const Signal2D& f) {
  const GridGeometry& g = f.geometry();
  const std::int64_t N = g.side();
  const std::size_t NN = static_cast<std::size_t>(N);
  // Column prefix sums of |f| over the first coordinate: S[r][c] = sum_{i1 < r} |f(i1, c)|.
  std::vector<double> S((NN + 1) * NN, 0.0);
  for (std::int64_t r = 0; r < N; ++r)
    for (std::int64_t c = 0; c < N; ++c)
      S[static_cast<std::size_t>(r + 1) * NN + static_cast<std::size_t>(c)] =
          S[static_cast<std::size_t>(r) * NN + static_cast<std::size_t>(c)] + std::abs(f(r, c));
  // Contiguous blocks of starting rows, one running maximum per block.
  const std::size_t blocks = std::min<std::size_t>(NN, static_cast<std::size_t>(std::max(1, thread_count())));
  std::vector<std::vector<double>> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> M(static_cast<std::size_t>(N * N), 0.0);
    std::vector<double> suffix(NN), colsum(NN), pre(NN + 1), h, scratch;
    for (std::size_t r0s = NN * b / blocks; r0s < NN * (b + 1) / blocks; ++r0s) {
      const auto r0 = static_cast<std::int64_t>(r0s);
      std::fill(suffix.begin(), suffix.end(), 0.0);
      for (std::int64_t r1 = N; r1 > r0; --r1) {
        const double rows = static_cast<double>(r1 - r0);
        for (std::size_t c = 0; c < NN; ++c) colsum[c] = S[static_cast<std::size_t>(r1) * NN + c] - S[r0s * NN + c];
        pre[0] = 0.0;
        for (std::size_t c = 0; c < NN; ++c) pre[c + 1] = pre[c] + colsum[c];
        interval_sup(
            N,
            [&](std::int64_t c0, std::int64_t c1) {
              return (pre[static_cast<std::size_t>(c1)] - pre[static_cast<std::size_t>(c0)]) /
                     (rows * static_cast<double>(c1 - c0));
            },
            h, scratch);
        for (std::size_t c = 0; c < NN; ++c) suffix[c] = std::max(suffix[c], h[c]);
        // Row r1 - 1 is covered by every [r0, r1') with r1' >= r1.
        double* dst = M.data() + static_cast<std::size_t>(r1 - 1) * NN;
        for (std::size_t c = 0; c < NN; ++c) dst[c] = std::max(dst[c], suffix[c]);
      }
    }
    partial[b] = std::move(M);
  });
  std::vector<double> out(g.cells(), 0.0);
  for (const auto& M : partial)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::max(out[k], M[k]);
  return Signal2D(g, std::move(out));
}

Signal2D directional_maximal(const Signal2D& f, int axis) {
  require(axis == 0 || axis == 1, "axis must be 0 or 1");
  const GridGeometry& g = f.geometry();
  const std::int64_t N = g.side();
  std::vector<double> out(g.cells(), 0.0);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t line) {
    const auto L = static_cast<std::int64_t>(line);
    auto at = [&](std::int64_t i) { return axis == 0 ? std::abs(f(i, L)) : std::abs(f(L, i)); };
    std::vector<double> pre(static_cast<std::size_t>(N) + 1, 0.0), h, scratch;
    for (std::int64_t i = 0; i < N; ++i) pre[static_cast<std::size_t>(i + 1)] = pre[static_cast<std::size_t>(i)] + at(i);
    interval_sup(
        N,
        [&](std::int64_t c0, std::int64_t c1) {
          return (pre[static_cast<std::size_t>(c1)] - pre[static_cast<std::size_t>(c0)]) / static_cast<double>(c1 - c0);
        },
        h, scratch);
    for (std::int64_t i = 0; i < N; ++i) out[axis == 0 ? g.flat(i, L) : g.flat(L, i)] = h[static_cast<std::size_t>(i)];
  });
  return Signal2D(g, std::move(out));
}

Signal2D iterated_maximal(const Signal2D& f) { return directional_maximal(directional_maximal(f, 0), 1); }

namespace {

// out(x) = max over square positions a (side s, 0 <= a <= N - s per axis) with
// x in the square of osc[a]; osc is (N-s+1)^2 row-major.
void spread_max(const std::vector<double>& osc, std::int64_t N, std::int64_t s, std::vector<double>& out) {
  const std::int64_t P = N - s + 1;
  std::vector<double> rowmax(static_cast<std::size_t>(P * N), 0.0);
  for (std::int64_t a1 = 0; a1 < P; ++a1)
    for (std::int64_t x2 = 0; x2 < N; ++x2) {
      double m = 0.0;
      for (std::int64_t a2 = std::max<std::int64_t>(0, x2 - s + 1); a2 <= std::min(x2, P - 1); ++a2)
        m = std::max(m, osc[static_cast<std::size_t>(a1 * P + a2)]);
      rowmax[static_cast<std::size_t>(a1 * N + x2)] = m;
    }
  for (std::int64_t x1 = 0; x1 < N; ++x1)
    for (std::int64_t x2 = 0; x2 < N; ++x2) {
      double m = 0.0;
      for (std::int64_t a1 = std::max<std::int64_t>(0, x1 - s + 1); a1 <= std::min(x1, P - 1); ++a1)
        m = std::max(m, rowmax[static_cast<std::size_t>(a1 * N + x2)]);
      double& o = out[static_cast<std::size_t>(x1 * N + x2)];
      o = std::max(o, m);
    }
}

}  // namespace

Signal2D sharp_maximal(const BumpConvolution& T, const Signal2D& f) {
  const GridGeometry& g = f.geometry();
  require(g == T.geometry(), "signal grid differs from the operator grid");
  require(g.domain == Domain::box, "the sharp maximal function is evaluated in box mode");
  const std::int64_t N = g.side();
  const std::int64_t W1 = T.half_width(0), W2 = T.half_width(1);
  const Signal2D Tf = T.apply(f);
  std::vector<double> out(g.cells(), 0.0);
  for (std::int64_t s = 1; s <= N; s *= 2) {
    // T(f 1_{3J}) = Tf on J once both supports fit inside the 3J margin.
    if (W1 <= s && W2 <= s) continue;
    const std::int64_t P = N - s + 1;
    std::vector<double> osc(static_cast<std::size_t>(P * P), 0.0);
    parallel_for(static_cast<std::size_t>(P), [&](std::size_t a2s) {
      const auto a2 = static_cast<std::int64_t>(a2s);
      const std::int64_t clo = std::max<std::int64_t>(0, a2 - s), chi = std::min(N, a2 + 2 * s);
      // R[u1 * s + y] = sum over window columns u2 of w2[(a2 + y) - u2] f(u1, u2).
      std::vector<double> R(static_cast<std::size_t>(N * s), 0.0);
      for (std::int64_t u1 = 0; u1 < N; ++u1)
        for (std::int64_t y = 0; y < s; ++y) {
          const std::int64_t y2 = a2 + y;
          const std::int64_t lo = std::max(clo, y2 - W2), hi = std::min(chi, y2 + W2 + 1);
          double acc = 0.0;
          for (std::int64_t u2 = lo; u2 < hi; ++u2) acc += T.weight(1, y2 - u2) * f(u1, u2);
          R[static_cast<std::size_t>(u1 * s + y)] = acc;
        }
      std::vector<double> mx(static_cast<std::size_t>(P), -std::numeric_limits<double>::infinity());
      std::vector<double> mn(static_cast<std::size_t>(P), std::numeric_limits<double>::infinity());
      std::vector<double> pre(static_cast<std::size_t>(4 * s + 1));
      for (std::int64_t y1 = 0; y1 < N; ++y1) {
        const std::int64_t a1lo = std::max<std::int64_t>(0, y1 - s + 1), a1hi = std::min(y1, P - 1);
        if (a1lo > a1hi) continue;
        // Prefix over u1 in [base, base + 4s) of w1[y1 - u1] R[u1][y].
        const std::int64_t base = y1 - 2 * s + 1;
        for (std::int64_t y = 0; y < s; ++y) {
          pre[0] = 0.0;
          for (std::int64_t k = 0; k < 4 * s; ++k) {
            const std::int64_t u1 = base + k;
            double term = 0.0;
            if (u1 >= 0 && u1 < N && std::abs(y1 - u1) <= W1)
              term = T.weight(0, y1 - u1) * R[static_cast<std::size_t>(u1 * s + y)];
            pre[static_cast<std::size_t>(k + 1)] = pre[static_cast<std::size_t>(k)] + term;
          }
          const double tf = Tf(y1, a2 + y);
          for (std::int64_t a1 = a1lo; a1 <= a1hi; ++a1) {
            // Window [a1 - s, a1 + 2s) relative to base.
            const std::int64_t lo = a1 - s - base, hi = a1 + 2 * s - base;
            const double local = pre[static_cast<std::size_t>(hi)] - pre[static_cast<std::size_t>(lo)];
            const double v = tf - local;
            mx[static_cast<std::size_t>(a1)] = std::max(mx[static_cast<std::size_t>(a1)], v);
            mn[static_cast<std::size_t>(a1)] = std::min(mn[static_cast<std::size_t>(a1)], v);
          }
        }
      }
      for (std::int64_t a1 = 0; a1 < P; ++a1)
        osc[static_cast<std::size_t>(a1 * P + a2)] = mx[static_cast<std::size_t>(a1)] - mn[static_cast<std::size_t>(a1)];
    });
    spread_max(osc, N, s, out);
  }
  return Signal2D(g, std::move(out));
}

Signal2D sharp_maximal_reference(const LinearOperator& T, const Signal2D& f) {
  const GridGeometry& g = f.geometry();
  require(g == T.geometry(), "signal grid differs from the operator grid");
  require(g.domain == Domain::box, "the sharp maximal function is evaluated in box mode");
  const std::int64_t N = g.side();
  const Signal2D Tf = T.apply(f);
  std::vector<double> out(g.cells(), 0.0);
  for (std::int64_t s = 1; s <= N; s *= 2) {
    const std::int64_t P = N - s + 1;
    std::vector<double> osc(static_cast<std::size_t>(P * P), 0.0);
    parallel_for(static_cast<std::size_t>(P * P), [&](std::size_t idx) {
      const auto a1 = static_cast<std::int64_t>(idx) / P, a2 = static_cast<std::int64_t>(idx) % P;
      const CellBox J{a1, a1 + s, a2, a2 + s};
      const CellBox J3{a1 - s, a1 + 2 * s, a2 - s, a2 + 2 * s};
      const std::vector<double> local = T.apply_local(f, J3, J);
      double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity();
      for (std::int64_t y1 = 0; y1 < s; ++y1)
        for (std::int64_t y2 = 0; y2 < s; ++y2) {
          const double v = Tf(a1 + y1, a2 + y2) - local[static_cast<std::size_t>(y1 * s + y2)];
          mx = std::max(mx, v);
          mn = std::min(mn, v);
        }
      osc[idx] = mx - mn;
    });
    spread_max(osc, N, s, out);
  }
  return Signal2D(g, std::move(out));
}

MaximalReport sharp_maximal_sweep(int n, double theta2, bool log_flag, const std::vector<int>& log2_widths,
                                  int samples, std::uint64_t seed, double constant) {
  require(samples >= 1, "need at least one sample");
  require(!log2_widths.empty(), "need at least one width");
  const GridGeometry g(n, Domain::box);
  MaximalReport rep;
  rep.operator_tag = "bump theta2=" + std::to_string(theta2) + (log_flag ? " log" : "");
  rep.n = n;
  rep.samples = samples;
  rep.seed = seed;
  rep.domination_constant = constant;
  std::vector<Signal2D> fs;
  std::vector<Signal2D> strong;
  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    fs.push_back(random_signal(g, rng));
    strong.push_back(strong_maximal(fs.back()));
  }
  for (int e1 : log2_widths)
    for (int e2 : log2_widths) {
      MaximalRow row;
      row.t1 = std::ldexp(1.0, -e1);
      row.t2 = std::ldexp(1.0, -e2);
      const BumpConvolution T(KernelSpec::bump(row.t1, row.t2, theta2, log_flag), g);
      for (int k = 0; k < samples; ++k) {
        const Signal2D sh = sharp_maximal(T, fs[static_cast<std::size_t>(k)]);
        const Signal2D& ms = strong[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < sh.size(); ++c)
          if (ms[c] > 0) row.max_ratio = std::max(row.max_ratio, sh[c] / ms[c]);
      }
      rep.max_ratio = std::max(rep.max_ratio, row.max_ratio);
      rep.rows.push_back(row);
    }
  if (constant > 0.0) rep.dominated = rep.max_ratio <= constant;
  return rep;
}

}  // namespace czx
