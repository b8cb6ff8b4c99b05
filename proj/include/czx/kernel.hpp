#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace czx {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

enum class KernelKind { pure, bump };

// theta_1, theta_2 in (0,1]; log_flag only with theta_2 = 1.
struct KernelSpec {
  double theta1 = 1.0;
  double theta2 = 1.0;
  bool log_flag = false;
  KernelKind kind = KernelKind::pure;
  double t1 = 1.0;  // bump widths
  double t2 = 1.0;

  static KernelSpec pure(double theta1, double theta2, bool log_flag = false);
  // The bump family is CZX with theta_1 = 1.
  static KernelSpec bump(double t1, double t2, double theta2, bool log_flag = false);

  double theta() const;  // min(theta1, theta2) / 2
  void validate() const;
  // (t1/t2 + t2/t1)^{-theta2}, times log(t1/t2 + t2/t1) with the log flag.
  double bump_prefactor() const;
  double bump_eccentricity() const;  // max(t1/t2, t2/t1)
  bool translation_invariant() const { return true; }
  std::string describe() const;
};

// phi(t) = exp(1 - 1/(1 - t^2)) on |t| < 1, zero elsewhere; phi(0) = 1.
double bump_phi(double t);
// Integral of phi over the real line.
double bump_phi_integral();

// Decay factor as a function of r = |x^1-y^1| / |x^2-y^2|.
double decay_factor_ratio(double r, double theta2, bool log_flag);
double decay_factor(Point2 x, Point2 y, double theta2, bool log_flag);
// The same factor from the absolute coordinate gaps a = |x^1-y^1|, b = |x^2-y^2|.
double decay_factor_gaps(double a, double b, double theta2, bool log_flag);

// K as a function of d = x - y (both kernel kinds are of convolution type).
double kernel_eval_diff(const KernelSpec& spec, double d1, double d2);
double kernel_eval(const KernelSpec& spec, Point2 x, Point2 y);
// Right-hand side of the size estimate with constant one.
double size_bound(const KernelSpec& spec, double d1, double d2);

struct EstimateResult {
  std::string name;
  double max_ratio = 0.0;
  std::vector<double> location;  // x1, x2, y1, y2 and, for Hoelder checks, w
  std::int64_t samples = 0;
};

struct BoundReport {
  KernelSpec spec;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  double log2_scale_min = 0.0;  // sampled gap range, log2 units
  double log2_scale_max = 0.0;
  std::vector<EstimateResult> estimates;  // size, holder_x1, holder_x2, holder_y1, holder_y2
  double max_ratio() const;
  const EstimateResult& find(const std::string& name) const;
};

// Samples the size estimate and the four mixed Hoelder/size estimates and
// reports max(LHS / RHS) with the constant set to one.
BoundReport verify_kernel_estimates(const KernelSpec& spec, std::int64_t samples, std::uint64_t seed);

// Integral over y^1 of |K(x, y)| for fixed x and y^2; restricted to
// |x^1 - y^1| <= L when L > 0.
double slice_integral(const KernelSpec& spec, Point2 x, double y2, double L = -1.0);

struct Square {
  Point2 corner;  // lower-left
  double side = 1.0;
  Point2 center() const { return {corner.x1 + 0.5 * side, corner.x2 + 0.5 * side}; }
};

// Integral over the complement of 3J of |K(x,y) - K(c_J,y)| dy, computed on the
// whole plane by nested quadrature split at the singular lines.
double hormander_integral(const KernelSpec& spec, const Square& J, Point2 x);

struct AwayRatios {
  double basic = 0.0;   // against prod l^theta / dist^{1+theta}
  double sharp = 0.0;   // against the mixed min/max form
};
// Regularity-difference ratios for x in J and y with both coordinates outside 3J.
AwayRatios away_ratios(const KernelSpec& spec, const Square& J, Point2 x, Point2 y);

// Bound of the Haar-pair estimate for equal-size squares at offset m (units
// of the side), normalised to side 1.
double haar_pair_bound(std::int64_t m1, std::int64_t m2, double theta1, double theta2);

}  // namespace czx
