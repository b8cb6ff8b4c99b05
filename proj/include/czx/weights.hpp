#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czx/kernel.hpp"
#include "czx/signal.hpp"

namespace czx {

struct Weight {
  Signal2D values;  // strictly positive
  std::string tag;  // "power", "constant", "checkerboard", "custom"
  double alpha = 0.0;  // exponent when tag == "power"

  static Weight from_signal(Signal2D s, std::string tag = "custom");
};

// |x|^alpha at cell centres, origin at the lower-left corner of the box.
Weight power_weight(GridGeometry g, double alpha);
Weight constant_weight(GridGeometry g, double c = 1.0);
// Alternates lo/hi on squares of side 2^-scale.
Weight checkerboard_weight(GridGeometry g, int scale, double lo, double hi);
// w^{-1/(p-1)}
Signal2D dual_weight(const Signal2D& w, double p);

enum class ApFamily {
  cubes,       // squares of every dyadic side at every cell position
  rectangles,  // rectangles with every pair of dyadic sides at every cell position
};

struct ApResult {
  double value = 1.0;
  // Extremal box in cells: rows [r0, r0 + rows), columns [c0, c0 + cols).
  std::int64_t r0 = 0, c0 = 0, rows = 0, cols = 0;
};

ApResult ap_constant(const Signal2D& w, double p, ApFamily family = ApFamily::cubes);

struct BmoNorms {
  double plain = 0.0;
  double weighted = 0.0;  // equals plain when no weight is given
};

// Sup over squares of dyadic side at every cell position inside the grid.
double bmo_norm(const Signal2D& b);
BmoNorms bmo_norms(const Signal2D& b, const std::optional<Signal2D>& nu = std::nullopt);

// (sum over cells of |f|^p w times the cell area)^(1/p)
double weighted_norm(const Signal2D& f, const Signal2D& w, double p);

// Exact integral of |x|^alpha over the unit square.
double power_weight_integral(double alpha);

// Rectangle R_eps = (0, eps) x (eps, 1) in cells.
struct EpsRect {
  double eps = 0.5;
  std::int64_t rows = 0;  // first-coordinate extent [0, rows)
  std::int64_t col0 = 0;  // second-coordinate extent [col0, N)
  double eccentricity() const { return (1.0 - eps) / eps; }
};
EpsRect eps_rect(GridGeometry g, double eps);
// eps in {2^-2, ..., 2^-(n-1)}
std::vector<double> dyadic_eps_sweep(int n);

struct CounterexampleRow {
  double eps = 0.0;
  double ecc = 0.0;
  double avg_w = 0.0;
  double avg_sigma = 0.0;
  double avg_w_exact = 0.0;      // high-precision quadrature of the continuum averages
  double avg_sigma_exact = 0.0;
  double lower_bound = 0.0;      // ecc^-theta2 <w>^{1/p} <sigma>^{1/p'}
  double measured_ratio = 0.0;   // ||K*f||_{L^p(w)} / ||f||_{L^p(w)}, f = 1_R sigma
  double pointwise_constant = 0.0;  // min over R of (K*f) / (ecc^-theta2 <f>_R)
};

struct CounterexampleReport {
  double p = 2.0, alpha = 1.5, theta2 = 0.1;
  int n = 9;
  std::vector<CounterexampleRow> rows;
  double slope_sigma = 0.0;      // log-log slopes against eps, two extreme points dropped
  double slope_w = 0.0;
  double slope_ratio_ecc = 0.0;  // measured ratio against ecc
  double slope_lower_ecc = 0.0;
  double slope_sigma_tail = 0.0;  // diagnostic: slope over the last two points
  bool ratio_monotone_tail = false;  // increasing over the last five points
  double growth_over_baseline = 0.0;  // ratio at the largest ecc over the smallest
  bool eq4_violated = false;
};

CounterexampleReport counterexample_experiment(double p, double alpha, double theta2, int n,
                                               std::vector<double> eps_list = {});

struct WeightedCheckRow {
  int log2_ecc = 0;
  double t1 = 0.0, t2 = 0.0;
  double max_ratio = 0.0;       // max over trials of ||Tf||_{L^p(w)} / ||f||_{L^p(w)}
  double normalized = 0.0;      // max_ratio / [w]_{A_p}^{p'}
};

struct WeightedCheckReport {
  KernelSpec base;
  double p = 2.0;
  double ap = 1.0;
  std::vector<WeightedCheckRow> rows;
  double baseline = 0.0;   // ratio at eccentricity 2^0
  double max_ratio = 0.0;
  double max_over_baseline = 0.0;
  double max_normalized = 0.0;
};

// Sweeps t2 = 1, t1 = 2^-e for e in [0, max_log2_ecc]. Test functions: the
// extremal 1_R sigma for the matching rectangle plus random positive signals.
WeightedCheckReport weighted_boundedness_check(const KernelSpec& base, double p, const Weight& w, int trials,
                                               std::uint64_t seed, int max_log2_ecc = 10);

}  // namespace czx
