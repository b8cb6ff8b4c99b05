#include "czx/form.hpp"

#include <algorithm>
#include <cmath>

#include "czx/errors.hpp"
#include "czx/parallel.hpp"
#include "czx/simd.hpp"
#include "czx/stats.hpp"
#include "czx/weights.hpp"

namespace czx {
namespace {

DiagonalConvention default_convention(const KernelSpec& spec) {
  return spec.kind == KernelKind::pure ? DiagonalConvention::zero : DiagonalConvention::kernel_defined;
}

}  // namespace

FormMatrix::FormMatrix(const KernelSpec& spec, GridGeometry g)
    : FormMatrix(spec, g, default_convention(spec)) {}

FormMatrix::FormMatrix(const KernelSpec& spec, GridGeometry g, DiagonalConvention conv)
    : geometry_(g), convention_(conv), storage_(Storage::difference_table) {
  spec.validate();
  require(spec.kind != KernelKind::pure || conv == DiagonalConvention::zero,
          "pure kernels are singular on coordinate lines and need the zero diagonal convention");
  const std::int64_t N = g.side();
  const bool torus = g.domain == Domain::torus;
  table_side_ = torus ? N : 2 * N - 1;
  table_.assign(static_cast<std::size_t>(table_side_ * table_side_), 0.0);
  const std::int64_t lo = torus ? 0 : -(N - 1);
  for (std::int64_t d1 = lo; d1 < lo + table_side_; ++d1)
    for (std::int64_t d2 = lo; d2 < lo + table_side_; ++d2) {
      const bool on_line = (torus ? (d1 % N == 0 || d2 % N == 0) : (d1 == 0 || d2 == 0));
      double v = 0.0;
      if (!(on_line && conv == DiagonalConvention::zero))
        v = kernel_eval_diff(spec, continuum_offset(d1), continuum_offset(d2));
      table_[static_cast<std::size_t>(table_index(d1, d2))] = v;
    }
  kernel_ = [spec](Point2 x, Point2 y) { return kernel_eval(spec, x, y); };
}

FormMatrix::FormMatrix(KernelFunction kernel, GridGeometry g, DiagonalConvention conv, int dense_limit)
    : geometry_(g), convention_(conv), kernel_(std::move(kernel)) {
  require(static_cast<bool>(kernel_), "kernel function is empty");
  // Rows are evaluated from the kernel (lazy path) before the table is published.
  storage_ = Storage::lazy;
  if (g.n <= dense_limit) {
    const std::size_t C = g.cells();
    try {
      table_.assign(C * C, 0.0);
    } catch (const std::bad_alloc&) {
      throw ResourceError("dense form matrix does not fit in memory");
    }
    parallel_for(C, [&](std::size_t x) { fill_row(x, table_.data() + x * C); });
    storage_ = Storage::dense;
  }
}

double FormMatrix::continuum_offset(std::int64_t d) const {
  const std::int64_t N = geometry_.side();
  if (geometry_.domain == Domain::torus) {
    d = ((d % N) + N) % N;
    if (d >= N / 2) d -= N;  // nearest periodic image
  }
  return static_cast<double>(d) * geometry_.cell_size();
}

std::int64_t FormMatrix::table_index(std::int64_t d1, std::int64_t d2) const {
  const std::int64_t N = geometry_.side();
  if (geometry_.domain == Domain::torus) {
    d1 = ((d1 % N) + N) % N;
    d2 = ((d2 % N) + N) % N;
    return d1 * N + d2;
  }
  return (d1 + N - 1) * table_side_ + (d2 + N - 1);
}

double FormMatrix::entry(std::size_t x, std::size_t y) const {
  const std::int64_t N = geometry_.side();
  const auto x1 = static_cast<std::int64_t>(x) / N, x2 = static_cast<std::int64_t>(x) % N;
  const auto y1 = static_cast<std::int64_t>(y) / N, y2 = static_cast<std::int64_t>(y) % N;
  switch (storage_) {
    case Storage::difference_table:
      return table_[static_cast<std::size_t>(table_index(x1 - y1, x2 - y2))];
    case Storage::dense:
      return table_[x * geometry_.cells() + y];
    case Storage::lazy:
      break;
  }
  if (convention_ == DiagonalConvention::zero && (x1 == y1 || x2 == y2)) return 0.0;
  return kernel_({geometry_.center(x1), geometry_.center(x2)}, {geometry_.center(y1), geometry_.center(y2)});
}

void FormMatrix::fill_row(std::size_t x, double* row) const {
  const std::int64_t N = geometry_.side();
  const auto x1 = static_cast<std::int64_t>(x) / N, x2 = static_cast<std::int64_t>(x) % N;
  if (storage_ == Storage::dense) {
    std::copy_n(table_.data() + x * geometry_.cells(), geometry_.cells(), row);
    return;
  }
  if (storage_ == Storage::difference_table) {
    for (std::int64_t y = 0; y < N * N; ++y)
      row[y] = table_[static_cast<std::size_t>(table_index(x1 - y / N, x2 - y % N))];
    return;
  }
  const Point2 px{geometry_.center(x1), geometry_.center(x2)};
  for (std::int64_t y1 = 0; y1 < N; ++y1)
    for (std::int64_t y2 = 0; y2 < N; ++y2) {
      double v = 0.0;
      if (!(convention_ == DiagonalConvention::zero && (x1 == y1 || x2 == y2)))
        v = kernel_(px, {geometry_.center(y1), geometry_.center(y2)});
      row[y1 * N + y2] = v;
    }
}

double FormMatrix::form(const Signal2D& f, const Signal2D& g) const { return inner(apply(f), g); }

Signal2D FormMatrix::apply(const Signal2D& f) const {
  require(f.geometry() == geometry_, "signal grid differs from the form grid");
  const std::int64_t N = geometry_.side();
  const std::size_t C = geometry_.cells();
  const double area = geometry_.cell_area();
  std::vector<double> out(C, 0.0);
  const double* fv = f.values().data();
  if (storage_ == Storage::difference_table) {
    const bool torus = geometry_.domain == Domain::torus;
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t r) {
      const auto x1 = static_cast<std::int64_t>(r);
      double* o = out.data() + r * static_cast<std::size_t>(N);
      for (std::int64_t y1 = 0; y1 < N; ++y1) {
        const double* in = fv + y1 * N;
        if (torus) {
          const double* row = table_.data() + table_index(x1 - y1, 0);
          for (std::int64_t d = 0; d < N; ++d) {
            const double a = row[d] * area;
            if (a == 0.0) continue;
            simd::active().axpy(a, in, o + d, static_cast<std::size_t>(N - d));
            if (d > 0) simd::active().axpy(a, in + (N - d), o, static_cast<std::size_t>(d));
          }
        } else {
          for (std::int64_t d = -(N - 1); d <= N - 1; ++d) {
            const double a = table_[static_cast<std::size_t>(table_index(x1 - y1, d))] * area;
            if (a == 0.0) continue;
            const std::int64_t lo = std::max<std::int64_t>(0, d), hi = std::min(N, N + d);
            simd::active().axpy(a, in + (lo - d), o + lo, static_cast<std::size_t>(hi - lo));
          }
        }
      }
    });
  } else if (storage_ == Storage::dense) {
    simd::active().matvec(table_.data(), C, C, fv, out.data());
    for (double& v : out) v *= area;
  } else {
    parallel_for(C, [&](std::size_t x) {
      std::vector<double> row(C);
      fill_row(x, row.data());
      out[x] = area * simd::active().dot(row.data(), fv, C);
    });
  }
  return Signal2D(geometry_, std::move(out));
}

Signal2D FormMatrix::apply_adjoint(const Signal2D& g) const {
  require(g.geometry() == geometry_, "signal grid differs from the form grid");
  const std::size_t C = geometry_.cells();
  const double area = geometry_.cell_area();
  std::vector<double> out(C, 0.0);
  const double* gv = g.values().data();
  if (storage_ == Storage::dense) {
    for (std::size_t x = 0; x < C; ++x)
      if (gv[x] != 0.0) simd::active().axpy(gv[x] * area, table_.data() + x * C, out.data(), C);
  } else {
    std::vector<double> row(C);
    for (std::size_t x = 0; x < C; ++x) {
      if (gv[x] == 0.0) continue;
      fill_row(x, row.data());
      simd::active().axpy(gv[x] * area, row.data(), out.data(), C);
    }
  }
  return Signal2D(geometry_, std::move(out));
}

std::vector<double> FormMatrix::block_sums(const HaarSystem& hs, int scale) const {
  require(hs.geometry() == geometry_, "Haar system grid differs from the form grid");
  require<RangeError>(scale >= 0 && scale <= geometry_.n, "block scale outside 0..n");
  const std::int64_t N = geometry_.side();
  const std::size_t Q = std::size_t{1} << (2 * scale);
  std::vector<std::vector<std::size_t>> cells_of(Q);
  std::vector<std::size_t> square_of(geometry_.cells());
  for (std::int64_t i1 = 0; i1 < N; ++i1)
    for (std::int64_t i2 = 0; i2 < N; ++i2) {
      const auto q = static_cast<std::size_t>(hs.square_of_cell(scale, i1, i2));
      cells_of[q].push_back(geometry_.flat(i1, i2));
      square_of[geometry_.flat(i1, i2)] = q;
    }
  const double area2 = geometry_.cell_area() * geometry_.cell_area();
  std::vector<double> out(Q * Q, 0.0);
  parallel_for(Q, [&](std::size_t X) {
    std::vector<double> row(geometry_.cells());
    double* dst = out.data() + X * Q;
    for (std::size_t x : cells_of[X]) {
      fill_row(x, row.data());
      for (std::size_t y = 0; y < row.size(); ++y) dst[square_of[y]] += row[y];
    }
    for (std::size_t Y = 0; Y < Q; ++Y) dst[Y] *= area2;
  });
  return out;
}

double haar_coefficient(const FormMatrix& B, const HaarSystem& hs, const HaarIndex& I, const HaarIndex& J) {
  hs.validate_square(I.rect);
  hs.validate_square(J.rect);
  require(I.rect.first.scale == J.rect.first.scale, "Haar coefficients need squares of equal side");
  const Signal2D f = hs.haar_function(I);
  const Signal2D g = hs.haar_function(J);
  std::vector<std::size_t> fs, gs;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] != 0.0) fs.push_back(k);
    if (g[k] != 0.0) gs.push_back(k);
  }
  double s = 0.0;
  for (std::size_t x : gs) {
    double r = 0.0;
    for (std::size_t y : fs) r += B.entry(x, y) * f[y];
    s += r * g[x];
  }
  return s * B.geometry().cell_area() * B.geometry().cell_area();
}

double wbp_check(const FormMatrix& B, const HaarSystem& hs, const DyadicRect& I) {
  hs.validate_square(I);
  const Signal2D one = Signal2D::indicator(B.geometry(), hs.lattice(), I);
  return std::abs(B.form(one, one)) / hs.lattice().area(I);
}

T1Data t1_functions(const FormMatrix& B) {
  require(B.geometry().domain == Domain::torus, "T1 data is defined in torus mode");
  const Signal2D one = Signal2D::constant(B.geometry(), 1.0);
  T1Data d{B.apply_adjoint(one), B.apply(one), 0.0, 0.0};
  d.bmo_b1 = bmo_norm(d.b1);
  d.bmo_b2 = bmo_norm(d.b2);
  return d;
}

std::string to_string(PairCase c) {
  switch (c) {
    case PairCase::equal: return "equal";
    case PairCase::adjacent: return "adjacent";
    case PairCase::separated_one: return "separated_one";
    case PairCase::separated_both: return "separated_both";
  }
  return "unknown";
}

PairCase classify_pair(std::int64_t m1, std::int64_t m2) {
  const std::int64_t a = std::abs(m1), b = std::abs(m2);
  if (a == 0 && b == 0) return PairCase::equal;
  if (a <= 1 && b <= 1) return PairCase::adjacent;
  if (a >= 2 && b >= 2) return PairCase::separated_both;
  return PairCase::separated_one;
}

std::array<std::int64_t, 2> square_offset(const GridGeometry& g, const DyadicRect& I, const DyadicRect& J) {
  const int j = I.first.scale;
  std::array<std::int64_t, 2> m{J.first.index - I.first.index, J.second.index - I.second.index};
  if (g.domain == Domain::torus) {
    const std::int64_t P = std::int64_t{1} << j;
    for (auto& v : m) {
      v = ((v % P) + P) % P;
      if (v >= (P + 1) / 2 && P > 1) v -= P;
    }
  }
  return m;
}

DecayReport decay_report(const FormMatrix& B, const HaarSystem& hs, double theta1, double theta2, int scale) {
  const GridGeometry& g = B.geometry();
  require<ResolutionError>(scale >= 0 && scale < g.n, "decay scale must lie below the grid resolution");
  require(g.domain == Domain::torus || hs.lattice().is_standard(),
          "box-mode decay reports need the standard lattice");
  const int child = scale + 1;
  const std::vector<double> C = B.block_sums(hs, child);
  const std::size_t Qc = std::size_t{1} << (2 * child);
  const std::int64_t Q = std::int64_t{1} << (2 * scale);
  const double norm = std::ldexp(1.0, 2 * scale);  // |I|^{-1/2} |J|^{-1/2}

  DecayReport rep;
  rep.scale = scale;
  rep.theta1 = theta1;
  rep.theta2 = theta2;
  for (std::size_t c = 0; c < 4; ++c) rep.cases[c].kind = static_cast<PairCase>(c);
  const std::int64_t side = std::int64_t{1} << scale;
  std::vector<double> diag(static_cast<std::size_t>(side) + 1, 0.0);

  for (std::int64_t qi = 0; qi < Q; ++qi) {
    const DyadicRect I = hs.square(scale, qi);
    std::array<std::int64_t, 4> ci{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) ci[static_cast<std::size_t>(2 * a + b)] = hs.child(scale, qi, a, b);
    for (std::int64_t qj = 0; qj < Q; ++qj) {
      const DyadicRect J = hs.square(scale, qj);
      const auto m = square_offset(g, I, J);
      const PairCase kind = classify_pair(m[0], m[1]);
      double S[4][4];  // S[child of J][child of I]
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const auto cj = static_cast<std::size_t>(hs.child(scale, qj, a, b));
          for (std::size_t k = 0; k < 4; ++k) S[2 * a + b][k] = C[cj * Qc + static_cast<std::size_t>(ci[k])];
        }
      double best = 0.0;
      for (int beta = 0; beta < 4; ++beta)
        for (int gamma = 0; gamma < 4; ++gamma) {
          if (beta == 0 && gamma == 0) continue;
          double s = 0.0;
          for (int cj = 0; cj < 4; ++cj)
            for (int cI = 0; cI < 4; ++cI)
              s += haar_sign(gamma >> 1, cj >> 1) * haar_sign(gamma & 1, cj & 1) * haar_sign(beta >> 1, cI >> 1) *
                   haar_sign(beta & 1, cI & 1) * S[cj][cI];
          best = std::max(best, std::abs(s) * norm);
        }
      CaseResult& cr = rep.cases[static_cast<std::size_t>(kind)];
      ++cr.pairs;
      const double ratio = best / haar_pair_bound(m[0], m[1], theta1, theta2);
      if (ratio > cr.max_ratio) {
        cr.max_ratio = ratio;
        cr.max_coefficient = best;
        cr.argmax_I = I;
        cr.argmax_J = J;
      }
      if (std::abs(m[0]) == std::abs(m[1]) && std::abs(m[0]) >= 2) {
        auto& d = diag[static_cast<std::size_t>(std::abs(m[0]))];
        d = std::max(d, best);
      }
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t m = 2; m < diag.size(); ++m)
    if (diag[m] > 0) {
      rep.diagonal_offsets.push_back(static_cast<std::int64_t>(m));
      rep.diagonal_max.push_back(diag[m]);
      lx.push_back(std::log2(static_cast<double>(m)));
      ly.push_back(std::log2(diag[m]));
    }
  if (lx.size() >= 2) rep.decay_slope_per_parameter = -0.5 * least_squares(lx, ly).slope;
  return rep;
}

}  // namespace czx
