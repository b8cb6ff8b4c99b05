#include "czx/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <functional>
#include <limits>
#include <sstream>

#include "czx/errors.hpp"
#include "czx/quadrature.hpp"
#include "czx/rng.hpp"

namespace czx {

KernelSpec KernelSpec::pure(double theta1, double theta2, bool log_flag) {
  KernelSpec s;
  s.theta1 = theta1;
  s.theta2 = theta2;
  s.log_flag = log_flag;
  s.kind = KernelKind::pure;
  s.validate();
  return s;
}

KernelSpec KernelSpec::bump(double t1, double t2, double theta2, bool log_flag) {
  KernelSpec s;
  s.theta1 = 1.0;
  s.theta2 = theta2;
  s.log_flag = log_flag;
  s.kind = KernelKind::bump;
  s.t1 = t1;
  s.t2 = t2;
  s.validate();
  return s;
}

double KernelSpec::theta() const { return 0.5 * std::min(theta1, theta2); }

void KernelSpec::validate() const {
  require(theta1 > 0 && theta1 <= 1, "theta1 must lie in (0, 1]");
  require(theta2 > 0 && theta2 <= 1, "theta2 must lie in (0, 1]");
  require(!log_flag || theta2 == 1.0, "the logarithmic variant needs theta2 = 1");
  if (kind == KernelKind::bump) require(t1 > 0 && t2 > 0, "bump widths must be positive");
}

double KernelSpec::bump_eccentricity() const { return std::max(t1 / t2, t2 / t1); }

double KernelSpec::bump_prefactor() const {
  const double s = t1 / t2 + t2 / t1;
  double p = std::pow(s, -theta2);
  if (log_flag) p *= std::log(s);
  return p;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  if (kind == KernelKind::pure) {
    os << "pure(theta1=" << theta1 << ",theta2=" << theta2;
  } else {
    os << "bump(t1=" << t1 << ",t2=" << t2 << ",theta2=" << theta2;
  }
  os << (log_flag ? ",log)" : ")");
  return os.str();
}

double bump_phi(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

double bump_phi_integral() {
  static const double value =
      2.0 * integrate_from_zero([](double u) { return bump_phi(1.0 - u); }, 1.0, 1e-14).value;
  return value;
}

double decay_factor_gaps(double a, double b, double theta2, bool log_flag) {
  if (!(a > 0) || !(b > 0)) throw SingularityError("decay factor undefined on a coordinate line");
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double q = lo / hi;
  // log(q + 1/q) without overflow for extreme ratios.
  const double log_s = std::log(hi) - std::log(lo) + std::log1p(q * q);
  double d = std::exp(-theta2 * log_s);
  if (log_flag) d *= log_s;
  return d;
}

double decay_factor_ratio(double r, double theta2, bool log_flag) {
  return decay_factor_gaps(r, 1.0, theta2, log_flag);
}

double decay_factor(Point2 x, Point2 y, double theta2, bool log_flag) {
  return decay_factor_gaps(std::abs(x.x1 - y.x1), std::abs(x.x2 - y.x2), theta2, log_flag);
}

namespace {

double pure_kernel(const KernelSpec& s, double d1, double d2) {
  const double a = std::abs(d1), b = std::abs(d2);
  if (!(a > 0) || !(b > 0)) throw SingularityError("pure kernel evaluated on a coordinate line");
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double q = lo / hi;
  const double log_s = std::log(hi) - std::log(lo) + std::log1p(q * q);
  double lk = -std::log(a) - std::log(b) - s.theta2 * log_s;
  double k = std::exp(lk);
  if (s.log_flag) k *= log_s;
  return k;
}

}  // namespace

double kernel_eval_diff(const KernelSpec& spec, double d1, double d2) {
  if (spec.kind == KernelKind::pure) return pure_kernel(spec, d1, d2);
  const double p1 = bump_phi(d1 / spec.t1);
  if (p1 == 0.0) return 0.0;
  const double p2 = bump_phi(d2 / spec.t2);
  return spec.bump_prefactor() * (p1 / spec.t1) * (p2 / spec.t2);
}

double kernel_eval(const KernelSpec& spec, Point2 x, Point2 y) {
  return kernel_eval_diff(spec, x.x1 - y.x1, x.x2 - y.x2);
}

double size_bound(const KernelSpec& spec, double d1, double d2) {
  const double a = std::abs(d1), b = std::abs(d2);
  return decay_factor_gaps(a, b, spec.theta2, spec.log_flag) / a / b;
}

double BoundReport::max_ratio() const {
  double m = 0.0;
  for (const auto& e : estimates) m = std::max(m, e.max_ratio);
  return m;
}

const EstimateResult& BoundReport::find(const std::string& name) const {
  for (const auto& e : estimates)
    if (e.name == name) return e;
  throw ParameterError("no estimate named " + name);
}

BoundReport verify_kernel_estimates(const KernelSpec& spec, std::int64_t samples, std::uint64_t seed) {
  spec.validate();
  require(samples >= 1, "sample count must be positive");
  BoundReport rep;
  rep.spec = spec;
  rep.seed = seed;
  rep.samples = samples;
  const bool bump = spec.kind == KernelKind::bump;
  rep.log2_scale_min = bump ? -12.0 : -10.0;
  rep.log2_scale_max = bump ? 0.25 : 10.0;

  const char* names[5] = {"size", "holder_x1", "holder_x2", "holder_y1", "holder_y2"};
  for (int e = 0; e < 5; ++e) {
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(e)));
    EstimateResult res;
    res.name = names[e];
    res.samples = samples;
    for (std::int64_t s = 0; s < samples; ++s) {
      KernelSpec k = spec;
      double s1 = 1.0, s2 = 1.0;  // natural gap scales
      if (bump) {
        // Uniformity in (t1, t2): t2 = 1 and t1 / t2 in 2^{-6..6}.
        k.t1 = std::ldexp(1.0, static_cast<int>(rng.integer(-6, 6)));
        k.t2 = 1.0;
        s1 = k.t1;
        s2 = k.t2;
      }
      const double a = s1 * std::exp2(rng.uniform(rep.log2_scale_min, rep.log2_scale_max));
      const double b = s2 * std::exp2(rng.uniform(rep.log2_scale_min, rep.log2_scale_max));
      const Point2 x{rng.uniform(), rng.uniform()};
      const Point2 y{x.x1 - rng.sign() * a, x.x2 - rng.sign() * b};
      const double base = size_bound(k, a, b);
      double lhs = 0.0, rhs = base;
      double w = 0.0;
      if (e == 0) {
        lhs = std::abs(kernel_eval(k, x, y));
      } else {
        const bool first_axis = (e == 1 || e == 3);
        const bool move_x = (e == 1 || e == 2);
        const double gap = first_axis ? a : b;
        const double delta = rng.sign() * gap * std::exp2(rng.uniform(-20.0, -1.0));
        Point2 x2 = x, y2 = y;
        if (move_x) {
          (first_axis ? x2.x1 : x2.x2) += delta;
          w = first_axis ? x2.x1 : x2.x2;
        } else {
          (first_axis ? y2.x1 : y2.x2) += delta;
          w = first_axis ? y2.x1 : y2.x2;
        }
        lhs = std::abs(kernel_eval(k, x, y) - kernel_eval(k, x2, y2));
        rhs = base * std::pow(std::abs(delta) / gap, k.theta1);
      }
      const double ratio = lhs / rhs;
      if (ratio > res.max_ratio) {
        res.max_ratio = ratio;
        res.location = {x.x1, x.x2, y.x1, y.x2};
        if (e > 0) res.location.push_back(w);
        if (bump) res.location.push_back(k.t1 / k.t2);
      }
    }
    rep.estimates.push_back(std::move(res));
  }
  return rep;
}

double slice_integral(const KernelSpec& spec, Point2 x, double y2, double L) {
  spec.validate();
  const double b = std::abs(x.x2 - y2);
  require<SingularityError>(b > 0, "slice integral needs x2 != y2");
  auto f = [&](double base, double off) {
    const double d1 = (x.x1 - base) - off;
    if (d1 == 0.0) return 0.0;
    return std::abs(kernel_eval_diff(spec, d1, x.x2 - y2));
  };
  std::vector<double> bp{x.x1, x.x1 - b, x.x1 + b};
  if (spec.kind == KernelKind::bump) {
    bp.push_back(x.x1 - spec.t1);
    bp.push_back(x.x1 + spec.t1);
  }
  if (L > 0) return integrate_piecewise(f, x.x1 - L, x.x1 + L, bp).value;
  return integrate_piecewise(f, -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), bp)
      .value;
}

namespace {

// Sign changes of fn located on a geometric grid of offsets around each centre
// (from 2^-12 to 2^24 times the scale, four per octave) and refined by bisection.
std::vector<double> sign_changes(const std::function<double(double)>& fn, std::vector<double> centres, double scale) {
  std::vector<double> pts;
  for (double c : centres)
    for (int k = -48; k <= 96; ++k) {
      const double d = scale * std::exp2(k / 4.0);
      pts.push_back(c - d);
      pts.push_back(c + d);
    }
  std::sort(pts.begin(), pts.end());
  std::vector<double> roots;
  double prev_x = pts.front(), prev_v = fn(prev_x);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double xi = pts[i], vi = fn(xi);
    bool skip = false;
    for (double c : centres)
      if ((prev_x - c) * (xi - c) <= 0) skip = true;  // singular line between samples
    if (vi == 0.0 && std::find(centres.begin(), centres.end(), xi) == centres.end()) roots.push_back(xi);
    if (!skip && prev_v != 0.0 && vi != 0.0 && std::signbit(prev_v) != std::signbit(vi)) {
      double lo = prev_x, hi = xi, vlo = prev_v;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi), vm = fn(mid);
        if (std::signbit(vm) == std::signbit(vlo)) {
          lo = mid;
          vlo = vm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = xi;
    prev_v = vi;
  }
  return roots;
}

}  // namespace

double hormander_integral(const KernelSpec& spec, const Square& J, Point2 x) {
  spec.validate();
  const Point2 c = J.center();
  require(x.x1 >= J.corner.x1 && x.x1 <= J.corner.x1 + J.side && x.x2 >= J.corner.x2 &&
              x.x2 <= J.corner.x2 + J.side,
          "hormander_integral needs x in J");
  if (x.x1 == c.x1 && x.x2 == c.x2) return 0.0;
  const double h = 1.5 * J.side;
  const double inf = std::numeric_limits<double>::infinity();
  const bool bump = spec.kind == KernelKind::bump;

  auto signed_diff = [&](double d1x, double d2x, double d1c, double d2c) {
    const double kx = (d1x == 0.0 || d2x == 0.0) && !bump ? 0.0 : kernel_eval_diff(spec, d1x, d2x);
    const double kc = (d1c == 0.0 || d2c == 0.0) && !bump ? 0.0 : kernel_eval_diff(spec, d1c, d2c);
    return kx - kc;
  };
  auto diff = [&](double d1x, double d2x, double d1c, double d2c) {
    return std::abs(signed_diff(d1x, d2x, d1c, d2c));
  };

  std::vector<double> bp2{x.x2, c.x2};
  if (bump)
    for (double p : {x.x2, c.x2}) {
      bp2.push_back(p - spec.t2);
      bp2.push_back(p + spec.t2);
    }

  const double tol_inner = 1e-9;
  // The whole integral is O(1) and inner values are at most O(1/side).
  const double abs_inner = 1e-9 / J.side;
  auto inner = [&](double y1, bool inside_strip) {
    const double d1x = x.x1 - y1, d1c = c.x1 - y1;
    auto g = [&](double base, double off) {
      const double dx = (x.x2 - base) - off;
      const double dc = (c.x2 - base) - off;
      return diff(d1x, dx, d1c, dc);
    };
    // |K(x,y) - K(c,y)| has kinks where the difference changes sign; splitting
    // there keeps the double-exponential rules at full speed.
    std::vector<double> bp = bp2;
    for (double r : sign_changes([&](double y2) { return signed_diff(d1x, x.x2 - y2, d1c, c.x2 - y2); },
                                 {x.x2, c.x2}, J.side))
      bp.push_back(r);
    if (inside_strip) {
      std::vector<double> lower = bp, upper = bp;
      lower.push_back(c.x2 - h - 1.0);
      upper.push_back(c.x2 + h + 1.0);
      return integrate_piecewise(g, -inf, c.x2 - h, lower, tol_inner, abs_inner).value +
             integrate_piecewise(g, c.x2 + h, inf, upper, tol_inner, abs_inner).value;
    }
    return integrate_piecewise(g, -inf, inf, bp, tol_inner, abs_inner).value;
  };

  std::vector<double> bp1{x.x1, c.x1};
  if (bump)
    for (double p : {x.x1, c.x1}) {
      bp1.push_back(p - spec.t1);
      bp1.push_back(p + spec.t1);
    }
  const double tol_outer = 1e-8;
  auto outer_out = [&](double base, double off) { return inner(base + off, false); };
  auto outer_in = [&](double base, double off) { return inner(base + off, true); };
  std::vector<double> left = bp1, right = bp1;
  left.push_back(c.x1 - h - 1.0);
  right.push_back(c.x1 + h + 1.0);
  const double abs_outer = 1e-8;
  try {
    return integrate_piecewise(outer_out, -inf, c.x1 - h, left, tol_outer, abs_outer).value +
           integrate_piecewise(outer_in, c.x1 - h, c.x1 + h, bp1, tol_outer, abs_outer).value +
           integrate_piecewise(outer_out, c.x1 + h, inf, right, tol_outer, abs_outer).value;
  } catch (const NumericError&) {
    // The tails decay like |y|^(-1 - theta2); below theta2 of about 0.3 the
    // half-line rule stalls near 1e-4 relative accuracy.
    throw NumericError("hormander_integral: quadrature did not converge (slow tails, theta2 = " +
                       std::to_string(spec.theta2) + ")");
  }
}

namespace {
double interval_distance(double y, double lo, double hi) {
  if (y < lo) return lo - y;
  if (y > hi) return y - hi;
  return 0.0;
}
}  // namespace

AwayRatios away_ratios(const KernelSpec& spec, const Square& J, Point2 x, Point2 y) {
  const Point2 c = J.center();
  const double d1 = interval_distance(y.x1, J.corner.x1, J.corner.x1 + J.side);
  const double d2 = interval_distance(y.x2, J.corner.x2, J.corner.x2 + J.side);
  require(d1 >= J.side && d2 >= J.side, "away_ratios needs y outside 3J in both coordinates");
  const double lhs = std::abs(kernel_eval(spec, x, y) - kernel_eval(spec, c, y));
  const double th = spec.theta();
  const double basic = std::pow(J.side, 2 * th) / std::pow(d1, 1 + th) / std::pow(d2, 1 + th);
  const double dmin = std::min(d1, d2), dmax = std::max(d1, d2);
  const double sharp = (1.0 / (d1 * d2)) * std::pow(J.side, spec.theta1) *
                       std::pow(dmin, spec.theta2 - spec.theta1) / std::pow(dmax, spec.theta2);
  return {lhs / basic, lhs / sharp};
}

double haar_pair_bound(std::int64_t m1, std::int64_t m2, double theta1, double theta2) {
  const double g1 = static_cast<double>(std::max<std::int64_t>(std::abs(m1) - 1, 0));
  const double g2 = static_cast<double>(std::max<std::int64_t>(std::abs(m2) - 1, 0));
  const double lo = 1.0 + std::min(g1, g2), hi = 1.0 + std::max(g1, g2);
  return (1.0 / ((1.0 + g1) * (1.0 + g2))) * std::pow(lo, theta2 - theta1) / std::pow(hi, theta2);
}

}  // namespace czx
