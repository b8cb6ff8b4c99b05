#include <complex>

#include <fftw3.h>

#include "common.hpp"
#include "czx/form.hpp"

using namespace czx;

namespace {

// Circular convolution by FFT: (k * f)(x) = sum_d k(d) f(x - d) on an N x N torus.
std::vector<double> fft_convolve(const std::vector<double>& k, const std::vector<double>& f, int N) {
  const int H = N / 2 + 1;
  std::vector<double> in(static_cast<std::size_t>(N * N));
  std::vector<std::complex<double>> K(static_cast<std::size_t>(N * H)), F(K.size());
  auto forward = [&](const std::vector<double>& src, std::vector<std::complex<double>>& dst) {
    in = src;
    fftw_plan p = fftw_plan_dft_r2c_2d(N, N, in.data(), reinterpret_cast<fftw_complex*>(dst.data()), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  };
  forward(k, K);
  forward(f, F);
  for (std::size_t i = 0; i < K.size(); ++i) K[i] *= F[i];
  std::vector<double> out(in.size());
  fftw_plan p = fftw_plan_dft_c2r_2d(N, N, reinterpret_cast<fftw_complex*>(K.data()), out.data(), FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  for (double& v : out) v /= static_cast<double>(N * N);
  return out;
}

// Kernel table at periodic offsets, nearest image in [-N/2, N/2).
std::vector<double> kernel_table(const KernelSpec& s, int N) {
  std::vector<double> k(static_cast<std::size_t>(N * N));
  auto wrap = [N](int d) { return (d >= N / 2 ? d - N : d) / static_cast<double>(N); };
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) k[static_cast<std::size_t>(a * N + b)] = kernel_eval_diff(s, wrap(a), wrap(b));
  return k;
}

}  // namespace

TEST_CASE("bump form against an FFT convolution oracle") {
  Rng rng(3);
  for (int n : {4, 5, 6}) {
    const GridGeometry g(n);
    const int N = static_cast<int>(g.side());
    for (const KernelSpec& s : {KernelSpec::bump(0.25, 0.125, 1.0), KernelSpec::bump(0.0625, 0.25, 0.3, false),
                                KernelSpec::bump(0.125, 0.125, 1.0, true)}) {
      const FormMatrix B(s, g);
      const Signal2D f = random_signal(g, rng, n), h = random_signal(g, rng, n);
      const std::vector<double> fv(f.values().begin(), f.values().end());
      const std::vector<double> Tf = fft_convolve(kernel_table(s, N), fv, N);
      double oracle = 0.0;
      for (std::size_t i = 0; i < Tf.size(); ++i) oracle += Tf[i] * h[i];
      oracle *= g.cell_area() * g.cell_area();
      CHECK(B.form(f, h) == doctest::Approx(oracle).epsilon(1e-10));
      const Signal2D applied = B.apply(f);
      for (std::size_t i = 0; i < Tf.size(); ++i) CHECK(applied[i] == doctest::Approx(Tf[i] * g.cell_area()).epsilon(1e-10));
    }
  }
}

TEST_CASE("Fourier multiplier of the sampled bump is bounded by its mass") {
  // phi >= 0, so |K^(xi)| <= K^(0) = sum of the samples.
  const int N = 32;
  const KernelSpec s = KernelSpec::bump(0.25, 0.0625, 1.0);
  std::vector<double> k = kernel_table(s, N);
  double mass = 0.0;
  for (double v : k) mass += v;
  std::vector<std::complex<double>> K(static_cast<std::size_t>(N * (N / 2 + 1)));
  fftw_plan p = fftw_plan_dft_r2c_2d(N, N, k.data(), reinterpret_cast<fftw_complex*>(K.data()), FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  for (const auto& z : K) CHECK(std::abs(z) <= mass * (1 + 1e-12));
  CHECK(std::abs(K[0].real() - mass) < 1e-9 * mass);
}

TEST_CASE("form is bilinear and its transpose swaps the arguments") {
  Rng rng(5);
  const GridGeometry g(4);
  const FormMatrix B(KernelSpec::pure(1.0, 0.5), g);
  const Signal2D f1 = random_signal(g, rng, 4), f2 = random_signal(g, rng, 4), h = random_signal(g, rng, 4);
  const double a = 2.5;
  CHECK(B.form(a * f1 + f2, h) == doctest::Approx(a * B.form(f1, h) + B.form(f2, h)).epsilon(1e-12));
  CHECK(inner(B.apply(f1), h) == doctest::Approx(B.form(f1, h)).epsilon(1e-12));
  CHECK(inner(f1, B.apply_adjoint(h)) == doctest::Approx(B.form(f1, h)).epsilon(1e-12));

  // An asymmetric kernel: the transpose pairing is the form of K(y, x).
  auto k = [](Point2 x, Point2 y) { return std::sin(3 * x.x1 + y.x2) + x.x2 * y.x1; };
  auto kt = [&](Point2 x, Point2 y) { return k(y, x); };
  const FormMatrix A(k, g, DiagonalConvention::kernel_defined), At(kt, g, DiagonalConvention::kernel_defined);
  CHECK(A.form(f1, h) == doctest::Approx(At.form(h, f1)).epsilon(1e-12));
}

TEST_CASE("disjoint supports: form equals the direct double sum") {
  const GridGeometry g(4, Domain::box);
  const FormMatrix B(KernelSpec::pure(1.0, 1.0), g);
  const Signal2D f = Signal2D::generate(g, [](auto i1, auto i2) { return i1 < 4 && i2 < 4 ? 1.0 + i1 : 0.0; });
  const Signal2D h = Signal2D::generate(g, [](auto i1, auto i2) { return i1 >= 8 && i2 >= 9 ? 2.0 - 0.1 * i2 : 0.0; });
  double direct = 0.0;
  for (std::int64_t x1 = 0; x1 < 16; ++x1)
    for (std::int64_t x2 = 0; x2 < 16; ++x2)
      for (std::int64_t y1 = 0; y1 < 16; ++y1)
        for (std::int64_t y2 = 0; y2 < 16; ++y2) {
          const double d1 = static_cast<double>(x1 - y1) / 16, d2 = static_cast<double>(x2 - y2) / 16;
          if (f(y1, y2) == 0.0 || h(x1, x2) == 0.0) continue;
          direct += kernel_eval_diff(KernelSpec::pure(1.0, 1.0), d1, d2) * f(y1, y2) * h(x1, x2);
        }
  direct *= g.cell_area() * g.cell_area();
  CHECK(B.form(f, h) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("Haar coefficients of far apart squares vanish for a narrow bump") {
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::standard(5));
  const FormMatrix B(KernelSpec::bump(0.0625, 0.0625, 1.0), g);
  const HaarIndex I{hs.square(3, hs.flat({{3, 0}, {3, 0}})), {1, 1}};
  const HaarIndex J{hs.square(3, hs.flat({{3, 4}, {3, 4}})), {1, 0}};
  CHECK(haar_coefficient(B, hs, I, J) == 0.0);
}

TEST_CASE("separated squares obey the closed-form Haar-pair bound") {
  // The coefficient over the bound, at scale 2 and 3 with n = 5, stays below 1/2.
  const GridGeometry g(5);
  const HaarSystem hs(g, Lattice2D::standard(5));
  for (double th2 : {0.5, 1.0}) {
    const FormMatrix B(KernelSpec::pure(1.0, th2), g);
    for (int scale : {2, 3}) {
      const DecayReport r = decay_report(B, hs, 1.0, th2, scale);
      CHECK(r.get(PairCase::separated_both).max_ratio <= 0.5);
      CHECK(r.get(PairCase::separated_both).max_ratio > 0.0);
      for (const auto& c : r.cases) CHECK(std::isfinite(c.max_ratio));
    }
  }
}

TEST_CASE("weak boundedness") {
  Rng rng(2);
  const GridGeometry g(5);
  const KernelSpec s = KernelSpec::bump(0.25, 0.125, 1.0);
  const FormMatrix B(s, g);
  const HaarSystem hs(g, Lattice2D::standard(5));
  // Discrete Young bound: |B(1,1)| <= sum of |K| over offsets times the cell area.
  double l1 = 0.0;
  for (std::size_t y = 0; y < g.cells(); ++y) l1 += std::abs(B.entry(0, y)) * g.cell_area();
  CHECK(wbp_check(B, hs, hs.square(0, 0)) <= l1 * (1 + 1e-12));
  // The discrete norm is a Riemann sum of the continuous one.
  CHECK(l1 == doctest::Approx(s.bump_prefactor() * bump_phi_integral() * bump_phi_integral()).epsilon(0.01));

  // Translation invariance on the torus.
  const HaarSystem shifted(g, Lattice2D::random(5, rng));
  for (int scale = 1; scale <= 4; ++scale)
    CHECK(wbp_check(B, shifted, shifted.square(scale, 3)) == doctest::Approx(wbp_check(B, hs, hs.square(scale, 0))).epsilon(1e-12));

  // Exhaustive sweep; constants frozen after the first run (pure about 7.9, bump about 0.45).
  const FormMatrix P(KernelSpec::pure(1.0, 1.0), g);
  double worst_pure = 0.0, worst_bump = 0.0;
  for (int scale = 1; scale <= 5; ++scale)
    for (const auto& Q : hs.lattice().squares(scale)) {
      worst_pure = std::max(worst_pure, wbp_check(P, hs, Q));
      worst_bump = std::max(worst_bump, wbp_check(B, hs, Q));
    }
  CHECK(worst_pure <= 10.0);
  CHECK(worst_bump <= 1.0);
}

TEST_CASE("T1 of a bump kernel is constant") {
  const KernelSpec s = KernelSpec::bump(0.25, 0.125, 1.0);
  const double exact = s.bump_prefactor() * bump_phi_integral() * bump_phi_integral();
  double prev_err = 1.0;
  for (int n : {5, 6}) {
    const T1Data t = t1_functions(FormMatrix(s, GridGeometry(n)));
    for (std::size_t i = 0; i < t.b1.size(); ++i) {
      CHECK(t.b1[i] == doctest::Approx(t.b1[0]).epsilon(1e-12));
      CHECK(t.b2[i] == doctest::Approx(t.b2[0]).epsilon(1e-12));
    }
    CHECK(t.bmo_b1 < 1e-10);
    CHECK(t.bmo_b2 < 1e-10);
    const double err = std::abs(t.b2[0] - exact) / exact;
    CHECK(err < 0.01);
    CHECK(err < prev_err / 4);
    prev_err = err;
  }
  // The Galerkin operator integrates K exactly up to quadrature error.
  const BumpConvolution T(s, GridGeometry(5));
  CHECK(T.mass() == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("T1 detects an asymmetric perturbation") {
  const GridGeometry g(4);
  const KernelSpec s = KernelSpec::bump(0.25, 0.25, 1.0);
  auto k = [s](Point2 x, Point2 y) { return kernel_eval(s, x, y) + std::cos(2 * M_PI * x.x1); };
  const T1Data t = t1_functions(FormMatrix(k, g, DiagonalConvention::kernel_defined));
  CHECK(max_abs_difference(t.b1, t.b2) > 0.1);
  CHECK(t.bmo_b2 > 0.1);

  Rng rng(4);
  const FormMatrix B(k, g, DiagonalConvention::kernel_defined);
  for (int i = 0; i < 10; ++i) {
    const Signal2D h = random_mean_zero_signal(g, rng, 4);
    CHECK(B.form(Signal2D::constant(g, 1.0), h) == doctest::Approx(inner(t.b2, h)).epsilon(1e-12));
  }
}

TEST_CASE("finer grids change a smooth bump form by little") {
  const KernelSpec s = KernelSpec::bump(0.5, 0.25, 1.0);
  auto f = [](double x, double y) { return std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y); };
  auto h = [](double x, double y) { return std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y) + 0.3 * std::sin(2 * M_PI * y); };
  double prev = 0.0, prev_diff = 1.0;
  for (int n : {4, 5, 6}) {
    const GridGeometry g(n);
    const double v = FormMatrix(s, g).form(Signal2D::sample(g, f), Signal2D::sample(g, h));
    if (n > 4) {
      const double diff = std::abs(v - prev);
      CHECK(diff < prev_diff);
      prev_diff = diff;
    }
    prev = v;
  }
}
