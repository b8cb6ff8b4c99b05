#include "czx/operator.hpp"

#include <algorithm>
#include <cmath>

#include "czx/errors.hpp"
#include "czx/parallel.hpp"
#include "czx/quadrature.hpp"
#include "czx/simd.hpp"

namespace czx {

CellBox CellBox::clipped(std::int64_t side) const {
  return {std::max<std::int64_t>(r0, 0), std::min(r1, side), std::max<std::int64_t>(c0, 0),
          std::min(c1, side)};
}

std::vector<double> LinearOperator::apply_local(const Signal2D& f, const CellBox& src,
                                                const CellBox& dst) const {
  const GridGeometry& g = geometry();
  const Signal2D masked = Signal2D::generate(g, [&](std::int64_t i1, std::int64_t i2) {
    return src.contains(i1, i2) ? f(i1, i2) : 0.0;
  });
  const Signal2D out = apply(masked);
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(dst.rows() * dst.cols()));
  for (std::int64_t i1 = dst.r0; i1 < dst.r1; ++i1)
    for (std::int64_t i2 = dst.c0; i2 < dst.c1; ++i2) v.push_back(out(i1, i2));
  return v;
}

std::vector<double> bump_galerkin_weights(double t, double h) {
  require(t > 0 && h > 0, "bump width and cell size must be positive");
  const auto W = static_cast<std::int64_t>(std::ceil(t / h));
  std::vector<double> w(static_cast<std::size_t>(2 * W + 1), 0.0);
  for (std::int64_t d = -W; d <= W; ++d) {
    const double lo = std::max((static_cast<double>(d) - 1.0) * h, -t);
    const double hi = std::min((static_cast<double>(d) + 1.0) * h, t);
    if (!(lo < hi)) continue;
    const double centre = static_cast<double>(d) * h;
    auto f = [&](double base, double off) {
      const double u = base + off;
      const double tri = 1.0 - std::abs(u / h - static_cast<double>(d));
      return tri > 0 ? bump_phi(u / t) / t * tri : 0.0;
    };
    w[static_cast<std::size_t>(d + W)] = integrate_piecewise(f, lo, hi, {centre}, 1e-12).value;
  }
  return w;
}

BumpConvolution::BumpConvolution(KernelSpec spec, GridGeometry g) : spec_(spec), geometry_(g) {
  spec_.validate();
  require(spec_.kind == KernelKind::bump, "BumpConvolution needs a bump kernel");
  const double h = g.cell_size();
  const double ts[2] = {spec_.t1, spec_.t2};
  for (int a = 0; a < 2; ++a) {
    w_[a] = bump_galerkin_weights(ts[a], h);
    half_width_[a] = static_cast<std::int64_t>(w_[a].size() / 2);
  }
  const double pre = spec_.bump_prefactor();
  for (double& v : w_[0]) v *= pre;
  if (g.domain == Domain::torus) {
    const std::int64_t N = g.side();
    for (int a = 0; a < 2; ++a) {
      circular_[a].assign(static_cast<std::size_t>(N), 0.0);
      for (std::int64_t d = -half_width_[a]; d <= half_width_[a]; ++d) {
        const std::int64_t r = ((d % N) + N) % N;
        circular_[a][static_cast<std::size_t>(r)] += w_[a][static_cast<std::size_t>(d + half_width_[a])];
      }
    }
  }
}

double BumpConvolution::weight(int axis, std::int64_t d) const {
  const std::int64_t W = half_width_[axis];
  if (d < -W || d > W) return 0.0;
  return w_[axis][static_cast<std::size_t>(d + W)];
}

double BumpConvolution::mass() const {
  double s0 = 0, s1 = 0;
  for (double v : w_[0]) s0 += v;
  for (double v : w_[1]) s1 += v;
  return s0 * s1;
}

namespace {

// out[i] += sum_d w[d + W] in[i - d] for a row of length N with zero extension.
void conv_row_box(const std::vector<double>& w, std::int64_t W, const double* in, double* out, std::int64_t N) {
  for (std::int64_t d = -W; d <= W; ++d) {
    const double a = w[static_cast<std::size_t>(d + W)];
    if (a == 0.0) continue;
    const std::int64_t lo = std::max<std::int64_t>(0, d), hi = std::min(N, N + d);
    if (lo < hi) simd::active().axpy(a, in + (lo - d), out + lo, static_cast<std::size_t>(hi - lo));
  }
}

void conv_row_circular(const std::vector<double>& c, const double* in, double* out, std::int64_t N) {
  for (std::int64_t d = 0; d < N; ++d) {
    const double a = c[static_cast<std::size_t>(d)];
    if (a == 0.0) continue;
    // out[i] += a in[i - d]: i in [d, N) reads in[0, N-d); i in [0, d) reads in[N-d, N).
    simd::active().axpy(a, in, out + d, static_cast<std::size_t>(N - d));
    if (d > 0) simd::active().axpy(a, in + (N - d), out, static_cast<std::size_t>(d));
  }
}

}  // namespace

Signal2D BumpConvolution::apply(const Signal2D& f) const {
  require(f.geometry() == geometry_, "signal grid differs from the operator grid");
  const std::int64_t N = geometry_.side();
  const bool torus = geometry_.domain == Domain::torus;
  const double* src = f.values().data();
  std::vector<double> tmp(geometry_.cells(), 0.0);
  // Second coordinate: independent rows.
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t r) {
    const double* in = src + r * static_cast<std::size_t>(N);
    double* out = tmp.data() + r * static_cast<std::size_t>(N);
    if (torus)
      conv_row_circular(circular_[1], in, out, N);
    else
      conv_row_box(w_[1], half_width_[1], in, out, N);
  });
  // First coordinate: combinations of whole rows.
  std::vector<double> res(geometry_.cells(), 0.0);
  const std::int64_t W = half_width_[0];
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t r) {
    const auto i1 = static_cast<std::int64_t>(r);
    double* out = res.data() + r * static_cast<std::size_t>(N);
    if (torus) {
      for (std::int64_t d = 0; d < N; ++d) {
        const double a = circular_[0][static_cast<std::size_t>(d)];
        if (a == 0.0) continue;
        const std::int64_t u = ((i1 - d) % N + N) % N;
        simd::active().axpy(a, tmp.data() + u * N, out, static_cast<std::size_t>(N));
      }
    } else {
      for (std::int64_t d = -W; d <= W; ++d) {
        const std::int64_t u = i1 - d;
        if (u < 0 || u >= N) continue;
        const double a = w_[0][static_cast<std::size_t>(d + W)];
        if (a == 0.0) continue;
        simd::active().axpy(a, tmp.data() + u * N, out, static_cast<std::size_t>(N));
      }
    }
  });
  return Signal2D(geometry_, std::move(res));
}

std::vector<double> BumpConvolution::apply_local(const Signal2D& f, const CellBox& src_in,
                                                 const CellBox& dst_in) const {
  require(geometry_.domain == Domain::box, "local evaluation is provided in box mode");
  const std::int64_t N = geometry_.side();
  const CellBox src = src_in.clipped(N);
  const CellBox dst = dst_in;
  std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(dst.rows(), 0) *
                                                   std::max<std::int64_t>(dst.cols(), 0)),
                          0.0);
  if (src.empty() || dst.empty()) return out;
  const std::int64_t W1 = half_width_[0], W2 = half_width_[1];
  // tmp[u1][i2] = sum over source columns of w2[i2 - u2] f(u1, u2), for i2 in dst columns.
  const std::int64_t R = src.rows(), C = dst.cols();
  std::vector<double> tmp(static_cast<std::size_t>(R * C), 0.0);
  for (std::int64_t u1 = src.r0; u1 < src.r1; ++u1) {
    double* row = tmp.data() + (u1 - src.r0) * C;
    for (std::int64_t i2 = dst.c0; i2 < dst.c1; ++i2) {
      const std::int64_t lo = std::max(src.c0, i2 - W2), hi = std::min(src.c1, i2 + W2 + 1);
      double s = 0.0;
      for (std::int64_t u2 = lo; u2 < hi; ++u2) s += w_[1][static_cast<std::size_t>(i2 - u2 + W2)] * f(u1, u2);
      row[i2 - dst.c0] = s;
    }
  }
  for (std::int64_t y1 = dst.r0; y1 < dst.r1; ++y1) {
    double* o = out.data() + (y1 - dst.r0) * C;
    const std::int64_t lo = std::max(src.r0, y1 - W1), hi = std::min(src.r1, y1 + W1 + 1);
    for (std::int64_t u1 = lo; u1 < hi; ++u1)
      simd::active().axpy(w_[0][static_cast<std::size_t>(y1 - u1 + W1)], tmp.data() + (u1 - src.r0) * C, o,
                          static_cast<std::size_t>(C));
  }
  return out;
}

Signal2D commutator_apply(const Signal2D& b, const LinearOperator& T, const Signal2D& f) {
  return b * T.apply(f) - T.apply(b * f);
}

}  // namespace czx
