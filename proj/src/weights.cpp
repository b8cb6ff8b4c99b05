#include "czx/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "czx/errors.hpp"
#include "czx/operator.hpp"
#include "czx/parallel.hpp"
#include "czx/stats.hpp"

namespace czx {

Weight Weight::from_signal(Signal2D s, std::string tag) {
  for (double v : s.values()) require(v > 0.0 && std::isfinite(v), "weights must be positive and finite");
  Weight w{std::move(s), std::move(tag), 0.0};
  return w;
}

Weight power_weight(GridGeometry g, double alpha) {
  Weight w = Weight::from_signal(
      Signal2D::sample(g, [alpha](double x1, double x2) { return std::pow(std::hypot(x1, x2), alpha); }), "power");
  w.alpha = alpha;
  return w;
}

Weight constant_weight(GridGeometry g, double c) {
  require(c > 0.0, "constant weight must be positive");
  return Weight::from_signal(Signal2D::constant(g, c), "constant");
}

Weight checkerboard_weight(GridGeometry g, int scale, double lo, double hi) {
  require(scale >= 0 && scale <= g.n, "checkerboard scale out of range");
  const int shift = g.n - scale;
  return Weight::from_signal(Signal2D::generate(g,
                                                [&](std::int64_t i1, std::int64_t i2) {
                                                  return (((i1 >> shift) + (i2 >> shift)) & 1) ? hi : lo;
                                                }),
                             "checkerboard");
}

Signal2D dual_weight(const Signal2D& w, double p) {
  require(p > 1.0, "dual weight needs p > 1");
  const double e = -1.0 / (p - 1.0);
  return w.map([e](double v) { return std::pow(v, e); });
}

namespace {

// Summed-area table with a zero border: S[(i1) * (N+1) + i2] = sum over [0,i1) x [0,i2).
class Prefix2D {
 public:
  explicit Prefix2D(const Signal2D& f) : N_(f.side()), s_(static_cast<std::size_t>((N_ + 1) * (N_ + 1)), 0.0) {
    for (std::int64_t i1 = 0; i1 < N_; ++i1) {
      double row = 0.0;
      for (std::int64_t i2 = 0; i2 < N_; ++i2) {
        row += f(i1, i2);
        at(i1 + 1, i2 + 1) = at(i1, i2 + 1) + row;
      }
    }
  }
  double box_sum(std::int64_t r0, std::int64_t c0, std::int64_t rows, std::int64_t cols) const {
    return get(r0 + rows, c0 + cols) - get(r0, c0 + cols) - get(r0 + rows, c0) + get(r0, c0);
  }

 private:
  double& at(std::int64_t a, std::int64_t b) { return s_[static_cast<std::size_t>(a * (N_ + 1) + b)]; }
  double get(std::int64_t a, std::int64_t b) const { return s_[static_cast<std::size_t>(a * (N_ + 1) + b)]; }
  std::int64_t N_;
  std::vector<double> s_;
};

}  // namespace

ApResult ap_constant(const Signal2D& w, double p, ApFamily family) {
  require(p > 1.0, "A_p needs p > 1");
  for (double v : w.values()) require(v > 0.0, "weights must be positive");
  const Signal2D sigma = dual_weight(w, p);
  const Prefix2D pw(w), ps(sigma);
  const std::int64_t N = w.side();
  const int n = w.n();
  struct Shape {
    std::int64_t rows, cols;
  };
  std::vector<Shape> shapes;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      if (family == ApFamily::rectangles || a == b) shapes.push_back({std::int64_t{1} << a, std::int64_t{1} << b});
  std::vector<ApResult> best(shapes.size());
  parallel_for(shapes.size(), [&](std::size_t k) {
    const auto [rows, cols] = shapes[k];
    const double area = static_cast<double>(rows * cols);
    ApResult r;
    r.value = 0.0;
    for (std::int64_t r0 = 0; r0 + rows <= N; ++r0)
      for (std::int64_t c0 = 0; c0 + cols <= N; ++c0) {
        const double aw = pw.box_sum(r0, c0, rows, cols) / area;
        const double as = ps.box_sum(r0, c0, rows, cols) / area;
        const double v = aw * std::pow(as, p - 1.0);
        if (v > r.value) r = {v, r0, c0, rows, cols};
      }
    best[k] = r;
  });
  ApResult out = best.front();
  for (const ApResult& r : best)
    if (r.value > out.value) out = r;
  // Jensen gives >= 1; clamp rounding on constant weights.
  out.value = std::max(out.value, 1.0);
  return out;
}

double bmo_norm(const Signal2D& b) { return bmo_norms(b).plain; }

BmoNorms bmo_norms(const Signal2D& b, const std::optional<Signal2D>& nu) {
  if (nu) {
    require(nu->geometry() == b.geometry(), "weight grid differs from the function grid");
    for (double v : nu->values()) require(v > 0.0, "BMO weight must be positive");
  }
  const std::int64_t N = b.side();
  const Prefix2D pb(b);
  std::optional<Prefix2D> pn;
  if (nu) pn.emplace(*nu);
  const int n = b.n();
  struct Task {
    std::int64_t side, r0;
  };
  std::vector<Task> tasks;
  for (int s = 0; s <= n; ++s)
    for (std::int64_t r0 = 0; r0 + (std::int64_t{1} << s) <= N; ++r0) tasks.push_back({std::int64_t{1} << s, r0});
  std::vector<BmoNorms> best(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t k) {
    const auto [side, r0] = tasks[k];
    const double area = static_cast<double>(side * side);
    BmoNorms r;
    for (std::int64_t c0 = 0; c0 + side <= N; ++c0) {
      const double avg = pb.box_sum(r0, c0, side, side) / area;
      double osc = 0.0;
      for (std::int64_t i1 = r0; i1 < r0 + side; ++i1)
        for (std::int64_t i2 = c0; i2 < c0 + side; ++i2) osc += std::abs(b(i1, i2) - avg);
      r.plain = std::max(r.plain, osc / area);
      if (pn) r.weighted = std::max(r.weighted, osc / pn->box_sum(r0, c0, side, side));
    }
    best[k] = r;
  });
  BmoNorms out;
  for (const BmoNorms& r : best) {
    out.plain = std::max(out.plain, r.plain);
    out.weighted = std::max(out.weighted, r.weighted);
  }
  if (!nu) out.weighted = out.plain;
  return out;
}

double weighted_norm(const Signal2D& f, const Signal2D& w, double p) {
  require(p >= 1.0, "weighted norm needs p >= 1");
  require(f.geometry() == w.geometry(), "weight grid differs from the function grid");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += std::pow(std::abs(f[k]), p) * w[k];
  return std::pow(s * f.geometry().cell_area(), 1.0 / p);
}

double power_weight_integral(double alpha) {
  require(alpha > -2.0, "|x|^alpha is integrable near 0 only for alpha > -2");
  // Polar coordinates over the two symmetric triangles.
  auto g = [alpha](double phi) { return std::pow(1.0 / std::cos(phi), alpha + 2.0); };
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, std::numbers::pi / 4.0, 15, 1e-14);
  return 2.0 / (alpha + 2.0) * I;
}

EpsRect eps_rect(GridGeometry g, double eps) {
  require(eps > 0.0 && eps <= 0.5, "eps must lie in (0, 1/2]");
  const double cells = eps * static_cast<double>(g.side());
  const auto rows = static_cast<std::int64_t>(std::llround(cells));
  require<ResolutionError>(rows >= 1 && std::abs(cells - static_cast<double>(rows)) < 1e-9,
                           "R_eps is not aligned with the grid");
  return {eps, rows, rows};
}

std::vector<double> dyadic_eps_sweep(int n) {
  std::vector<double> out;
  for (int k = 2; k <= n - 1; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

namespace {

double mean_over(const Signal2D& f, const EpsRect& R) {
  const std::int64_t N = f.side();
  double s = 0.0;
  for (std::int64_t i1 = 0; i1 < R.rows; ++i1)
    for (std::int64_t i2 = R.col0; i2 < N; ++i2) s += f(i1, i2);
  return s / static_cast<double>(R.rows * (N - R.col0));
}

// Continuum average of |x|^beta over (0,eps) x (eps,1).
double power_average_exact(double beta, double eps) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto inner = [beta, eps](double x1) {
    auto g = [beta, x1](double x2) { return std::pow(std::hypot(x1, x2), beta); };
    return GK::integrate(g, eps, 1.0, 15, 1e-13);
  };
  return GK::integrate(inner, 0.0, eps, 15, 1e-12) / (eps * (1.0 - eps));
}

}  // namespace

CounterexampleReport counterexample_experiment(double p, double alpha, double theta2, int n,
                                               std::vector<double> eps_list) {
  require(p > 1.0, "p must exceed 1");
  require(alpha > p - 1.0 && alpha < 2.0 * (p - 1.0), "alpha must lie in (p-1, 2(p-1))");
  require(theta2 > 0.0 && theta2 <= 1.0, "theta2 must lie in (0, 1]");
  require(n >= 4, "the counterexample needs n >= 4");
  if (eps_list.empty()) eps_list = dyadic_eps_sweep(n);
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());  // increasing eccentricity
  const GridGeometry g(n, Domain::box);
  const Weight w = power_weight(g, alpha);
  const Signal2D sigma = dual_weight(w.values, p);
  const double pp = p / (p - 1.0);
  const std::int64_t N = g.side();

  CounterexampleReport rep;
  rep.p = p;
  rep.alpha = alpha;
  rep.theta2 = theta2;
  rep.n = n;
  rep.rows.resize(eps_list.size());
  // The operator applications are internally parallel; run the sweep serially.
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const EpsRect R = eps_rect(g, eps_list[k]);
    CounterexampleRow& row = rep.rows[k];
    row.eps = R.eps;
    row.ecc = R.eccentricity();
    row.avg_w = mean_over(w.values, R);
    row.avg_sigma = mean_over(sigma, R);
    row.avg_w_exact = power_average_exact(alpha, R.eps);
    row.avg_sigma_exact = power_average_exact(-alpha / (p - 1.0), R.eps);
    row.lower_bound = std::pow(row.ecc, -theta2) * std::pow(row.avg_w, 1.0 / p) * std::pow(row.avg_sigma, 1.0 / pp);
    const Signal2D f = Signal2D::generate(g, [&](std::int64_t i1, std::int64_t i2) {
      return (i1 < R.rows && i2 >= R.col0) ? sigma(i1, i2) : 0.0;
    });
    const BumpConvolution T(KernelSpec::bump(R.eps, 1.0 - R.eps, theta2), g);
    row.measured_ratio = weighted_norm(T.apply(f), w.values, p) / weighted_norm(f, w.values, p);
    // Pointwise lower bound with widths twice the sides of R, where phi >= e^{-1/3}.
    const BumpConvolution T2(KernelSpec::bump(2.0 * R.eps, 2.0 * (1.0 - R.eps), theta2), g);
    const Signal2D Tf2 = T2.apply(f);
    const double base = std::pow(row.ecc, -theta2) * mean_over(f, R);
    double c = std::numeric_limits<double>::infinity();
    for (std::int64_t i1 = 0; i1 < R.rows; ++i1)
      for (std::int64_t i2 = R.col0; i2 < N; ++i2) c = std::min(c, Tf2(i1, i2) / base);
    row.pointwise_constant = c;
  }

  std::vector<double> eps, ecc, aw, as, ratio, lower;
  for (const auto& r : rep.rows) {
    eps.push_back(r.eps);
    ecc.push_back(r.ecc);
    aw.push_back(r.avg_w);
    as.push_back(r.avg_sigma);
    ratio.push_back(r.measured_ratio);
    lower.push_back(r.lower_bound);
  }
  const std::size_t trim = eps.size() >= 5 ? 1 : 0;
  rep.slope_sigma = loglog_slope(eps, as, trim);
  rep.slope_w = loglog_slope(eps, aw, trim);
  rep.slope_ratio_ecc = loglog_slope(ecc, ratio, trim);
  rep.slope_lower_ecc = loglog_slope(ecc, lower, trim);
  if (eps.size() >= 2) {
    const std::size_t m = eps.size();
    rep.slope_sigma_tail = std::log(as[m - 1] / as[m - 2]) / std::log(eps[m - 1] / eps[m - 2]);
  }
  const std::size_t m = ratio.size();
  rep.ratio_monotone_tail = m >= 5;
  for (std::size_t k = m >= 5 ? m - 4 : 1; k < m; ++k)
    if (!(ratio[k] > ratio[k - 1])) rep.ratio_monotone_tail = false;
  rep.growth_over_baseline = m ? ratio.back() / ratio.front() : 0.0;

  // Fit C on the low-eccentricity half, then look for a violation in the rest.
  std::vector<double> q(m);
  for (std::size_t k = 0; k < m; ++k) q[k] = std::pow(aw[k], pp / p) * as[k] / std::pow(ecc[k], theta2 * pp);
  const std::size_t half = m / 2;
  double C = 0.0;
  for (std::size_t k = 0; k < half; ++k) C = std::max(C, q[k]);
  rep.eq4_violated = false;
  for (std::size_t k = half; k < m; ++k)
    if (q[k] > C) rep.eq4_violated = true;
  return rep;
}

WeightedCheckReport weighted_boundedness_check(const KernelSpec& base, double p, const Weight& w, int trials,
                                               std::uint64_t seed, int max_log2_ecc) {
  require(base.theta2 == 1.0, "the weighted check is for theta2 = 1");
  require(p > 1.0, "p must exceed 1");
  require(trials >= 0, "trials must be nonnegative");
  require(max_log2_ecc >= 0, "eccentricity range must be nonnegative");
  const GridGeometry g = w.values.geometry();
  const std::int64_t N = g.side();
  WeightedCheckReport rep;
  rep.base = base;
  rep.p = p;
  rep.ap = ap_constant(w.values, p, ApFamily::cubes).value;
  const double pp = p / (p - 1.0);
  const Signal2D sigma = dual_weight(w.values, p);

  // Same test functions at every eccentricity.
  std::vector<Signal2D> randoms;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) randoms.push_back(random_positive_signal(g, rng));

  for (int e = 0; e <= max_log2_ecc; ++e) {
    WeightedCheckRow row;
    row.log2_ecc = e;
    row.t1 = std::ldexp(1.0, -e);
    row.t2 = 1.0;
    const BumpConvolution T(KernelSpec::bump(row.t1, row.t2, 1.0, base.log_flag), g);
    auto ratio = [&](const Signal2D& f) { return weighted_norm(T.apply(f), w.values, p) / weighted_norm(f, w.values, p); };
    const std::int64_t rows = std::clamp<std::int64_t>(std::llround(row.t1 * static_cast<double>(N)), 1, N - 1);
    const Signal2D ext = Signal2D::generate(g, [&](std::int64_t i1, std::int64_t i2) {
      return (i1 < rows && i2 >= rows) ? sigma(i1, i2) : 0.0;
    });
    row.max_ratio = ratio(ext);
    for (const Signal2D& f : randoms) row.max_ratio = std::max(row.max_ratio, ratio(f));
    row.normalized = row.max_ratio / std::pow(rep.ap, pp);
    rep.rows.push_back(row);
  }
  rep.baseline = rep.rows.front().max_ratio;
  for (const auto& r : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, r.max_ratio);
    rep.max_normalized = std::max(rep.max_normalized, r.normalized);
  }
  rep.max_over_baseline = rep.max_ratio / rep.baseline;
  return rep;
}

}  // namespace czx
