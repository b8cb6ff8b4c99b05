#include <algorithm>
#include <cmath>
#include <memory>
#include <iostream>

#include "cli.hpp"
#include "czx/errors.hpp"
#include "czx/kernel.hpp"
#include "czx/stats.hpp"

namespace czx::cli {
namespace {

struct KernelOptions {
  std::string kind = "pure";
  double theta1 = 1.0;
  double theta2 = 1.0;
  bool log_flag = false;
  double t1 = 0.25;
  double t2 = 0.25;

  void add(CLI::App* sub, bool with_bump) {
    if (with_bump) sub->add_option("--kernel", kind, "pure or bump")->check(CLI::IsMember({"pure", "bump"}));
    sub->add_option("--theta1", theta1, "theta_1 in (0,1] (pure kernel)");
    sub->add_option("--theta2", theta2, "theta_2 in (0,1]");
    sub->add_flag("--log", log_flag, "Logarithmic decay factor (theta_2 = 1 only)");
    if (with_bump) {
      sub->add_option("--t1", t1, "Bump width along the first axis");
      sub->add_option("--t2", t2, "Bump width along the second axis");
    }
  }
  KernelSpec spec() const {
    KernelSpec s = kind == "bump" ? KernelSpec::bump(t1, t2, theta2, log_flag) : KernelSpec::pure(theta1, theta2, log_flag);
    s.validate();
    return s;
  }
};

void verify_kernel(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("verify-kernel", "Sample the size and mixed Hoelder estimates");
  auto opt = std::make_shared<KernelOptions>();
  auto samples = std::make_shared<std::int64_t>(10000);
  auto sweep = std::make_shared<int>(0);
  opt->add(sub, true);
  sub->add_option("--samples", *samples, "Samples per estimate")->check(CLI::PositiveNumber);
  sub->add_option("--sweep", *sweep, "Bump only: also sweep log2(t1/t2) over [-s, s] with t2 fixed")
      ->check(CLI::Range(0, 12));
  bind(sub, ctx, {"kernel"}, [&ctx, opt, samples, sweep] {
    const KernelSpec spec = opt->spec();
    json cfg = base_config(ctx, "verify-kernel");
    cfg["kernel"] = io::to_json(spec);
    cfg["samples"] = *samples;
    cfg["sweep"] = *sweep;
    json result = io::to_json(verify_kernel_estimates(spec, *samples, ctx.seed));
    if (*sweep > 0) {
      require(spec.kind == KernelKind::bump, "--sweep needs --kernel bump");
      json rows = json::array();
      double worst = 0.0;
      for (int e = -*sweep; e <= *sweep; ++e) {
        const KernelSpec s = KernelSpec::bump(spec.t2 * std::exp2(e), spec.t2, spec.theta2, spec.log_flag);
        const BoundReport r = verify_kernel_estimates(s, *samples, ctx.seed + static_cast<std::uint64_t>(e + 64));
        worst = std::max(worst, r.max_ratio());
        rows.push_back({{"log2_t1_over_t2", e}, {"max_ratio", r.max_ratio()}});
      }
      result["sweep"] = rows;
      result["sweep_max_ratio"] = worst;
    }
    emit(ctx, render_json(cfg, result));
    return 0;
  });
}

void slice_integrals(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("slice-integrals", "Integrals of |K| along the first coordinate at several gaps");
  auto opt = std::make_shared<KernelOptions>();
  auto kmax = std::make_shared<int>(8);
  opt->add(sub, true);
  sub->add_option("--kmax", *kmax, "Gaps h = 2^-1 .. 2^-kmax")->check(CLI::Range(1, 20));
  bind(sub, ctx, {"kernel"}, [&ctx, opt, kmax] {
    const KernelSpec spec = opt->spec();
    json cfg = base_config(ctx, "slice-integrals");
    cfg["kernel"] = io::to_json(spec);
    cfg["kmax"] = *kmax;
    io::CsvTable t({"h", "integral", "integral_times_h", "restricted", "restricted_times_h"}, cfg);
    const Point2 x{0.5, 0.5};
    std::vector<double> hs, full, restricted;
    for (int k = 1; k <= *kmax; ++k) {
      const double h = std::exp2(-k);
      const double a = slice_integral(spec, x, x.x2 - h);
      const double b = slice_integral(spec, x, x.x2 - h, h);
      t.add_row(std::vector<double>{h, a, a * h, b, b * h});
      hs.push_back(h);
      full.push_back(a * h);
      restricted.push_back(b * h);
    }
    // Restricted integrals for L << h: doubling L should multiply by about 2^theta2.
    json doubling = json::array();
    const double h = 0.5;
    for (int m = 14; m >= 6; m -= 2) {
      const double L = h * std::exp2(-m);
      const double r = slice_integral(spec, x, x.x2 - h, 2 * L) / slice_integral(spec, x, x.x2 - h, L);
      doubling.push_back({{"L_over_h", std::exp2(-m)}, {"ratio", r}});
    }
    json summary;
    summary["spread_integral_times_h"] = max_of(full) / *std::min_element(full.begin(), full.end());
    summary["spread_restricted_times_h"] = max_of(restricted) / *std::min_element(restricted.begin(), restricted.end());
    summary["doubling_L"] = doubling;
    summary["doubling_bound"] = std::exp2(spec.theta2);
    emit(ctx, render_csv(t, summary));
    maybe_plot(ctx, cfg, "slice integrals times h", "h", "value",
               {{"full", hs, full}, {"restricted to L = h", hs, restricted}});
    return 0;
  });
}

void hormander(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("hormander", "Hoermander integral over side lengths and positions of x");
  auto opt = std::make_shared<KernelOptions>();
  auto scales = std::make_shared<int>(6);
  auto constant = std::make_shared<double>(32.0);
  opt->add(sub, false);
  sub->add_option("--scales", *scales, "Sides 2^-1 .. 2^-scales")->check(CLI::Range(1, 12));
  sub->add_option("--constant", *constant, "Uniform bound to test against");
  bind(sub, ctx, {"kernel"}, [&ctx, opt, scales, constant] {
    const KernelSpec spec = opt->spec();
    json cfg = base_config(ctx, "hormander");
    cfg["kernel"] = io::to_json(spec);
    cfg["scales"] = *scales;
    cfg["constant"] = *constant;
    io::CsvTable t({"side", "position", "x1", "x2", "value"}, cfg);
    const char* names[] = {"corner", "centre_column", "interior"};
    std::vector<io::PlotSeries> series(3);
    double lo = INFINITY, hi = 0.0;
    for (int pos = 0; pos < 3; ++pos) series[static_cast<std::size_t>(pos)].label = names[pos];
    for (int k = 1; k <= *scales; ++k) {
      const double l = std::exp2(-k);
      const Square J{{0.25, 0.25}, l};
      const Point2 xs[] = {{0.25, 0.25}, {0.25 + 0.5 * l, 0.25 + 0.1 * l}, {0.25 + 0.9 * l, 0.25 + 0.3 * l}};
      for (int pos = 0; pos < 3; ++pos) {
        const Point2 x = xs[pos];
        const double v = hormander_integral(spec, J, x);
        t.add_row({io::format_double(l), names[pos], io::format_double(x.x1), io::format_double(x.x2),
                   io::format_double(v)});
        series[static_cast<std::size_t>(pos)].x.push_back(l);
        series[static_cast<std::size_t>(pos)].y.push_back(v);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    json summary;
    summary["min"] = lo;
    summary["max"] = hi;
    summary["within_constant"] = hi <= *constant;
    emit(ctx, render_csv(t, summary));
    maybe_plot(ctx, cfg, "Hoermander integral", "side of J", "integral", series);
    return hi <= *constant ? 0 : 3;
  });
}

}  // namespace

void register_kernel_commands(CLI::App& app, Context& ctx) {
  verify_kernel(app, ctx);
  slice_integrals(app, ctx);
  hormander(app, ctx);
}

}  // namespace czx::cli
