#include <cmath>
#include <memory>

#include "cli.hpp"
#include "czx/errors.hpp"
#include "czx/weights.hpp"

namespace czx::cli {
namespace {

struct WeightOptions {
  std::string kind = "power";
  double alpha = 1.5;
  int scale = 2;
  double lo = 0.1;
  double hi = 10.0;

  void add(CLI::App* sub) {
    sub->add_option("--weight", kind, "power, checkerboard or constant")
        ->check(CLI::IsMember({"power", "checkerboard", "constant"}));
    sub->add_option("--alpha", alpha, "Exponent of the power weight |x|^alpha");
    sub->add_option("--board-scale", scale, "Checkerboard squares have side 2^-scale");
    sub->add_option("--board-lo", lo, "Checkerboard low value");
    sub->add_option("--board-hi", hi, "Checkerboard high value");
  }
  Weight make(GridGeometry g) const {
    if (kind == "power") return power_weight(g, alpha);
    if (kind == "checkerboard") return checkerboard_weight(g, scale, lo, hi);
    return constant_weight(g);
  }
  json describe() const {
    json j;
    j["kind"] = kind;
    if (kind == "power") j["alpha"] = alpha;
    if (kind == "checkerboard") j["board"] = {{"scale", scale}, {"lo", lo}, {"hi", hi}};
    return j;
  }
};

void ap(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("ap", "A_p constants over squares and rectangles at several resolutions");
  struct Opts {
    int nmin = 4;
    int n = 8;
    double p = 2.0;
    std::string family = "both";
    WeightOptions w;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Finest resolution exponent")->check(CLI::Range(1, 10));
  sub->add_option("--nmin", o->nmin, "Coarsest resolution exponent of the sweep")->check(CLI::Range(1, 10));
  sub->add_option("--p", o->p, "Exponent p > 1");
  sub->add_option("--family", o->family, "cubes, rectangles or both")
      ->check(CLI::IsMember({"cubes", "rectangles", "both"}));
  o->w.add(sub);
  bind(sub, ctx, {"weights"}, [&ctx, o] {
    require(o->p > 1.0, "--p must exceed 1");
    require(o->nmin <= o->n, "--nmin must not exceed --n");
    json cfg = base_config(ctx, "ap");
    cfg["n"] = o->n;
    cfg["nmin"] = o->nmin;
    cfg["p"] = o->p;
    cfg["family"] = o->family;
    cfg["weight"] = o->w.describe();
    io::CsvTable t({"n", "family", "value", "r0", "c0", "rows", "cols"}, cfg);
    std::vector<io::PlotSeries> series;
    for (int fam = 0; fam < 2; ++fam) {
      const char* name = fam == 0 ? "cubes" : "rectangles";
      if (o->family != "both" && o->family != name) continue;
      io::PlotSeries s{name, {}, {}};
      for (int n = o->nmin; n <= o->n; ++n) {
        const Weight w = o->w.make(GridGeometry(n, Domain::box));
        const ApResult r = ap_constant(w.values, o->p, fam == 0 ? ApFamily::cubes : ApFamily::rectangles);
        t.add_row({std::to_string(n), name, io::format_double(r.value), std::to_string(r.r0), std::to_string(r.c0),
                   std::to_string(r.rows), std::to_string(r.cols)});
        s.x.push_back(std::exp2(n));
        s.y.push_back(r.value);
      }
      series.push_back(std::move(s));
    }
    emit(ctx, render_csv(t));
    maybe_plot(ctx, cfg, "A_p constants", "cells per side", "constant", series);
    return 0;
  });
}

void counterexample(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("counterexample", "Eccentric rectangles against power weights for theta_2 < 1");
  struct Opts {
    double p = 2.0;
    double alpha = 1.5;
    double theta2 = 0.1;
    int n = 9;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--p", o->p, "Exponent p > 1");
  sub->add_option("--alpha", o->alpha, "Power weight exponent in (p - 1, 2(p - 1))");
  sub->add_option("--theta2", o->theta2, "theta_2 of the bump kernels");
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(4, 11));
  bind(sub, ctx, {"weights"}, [&ctx, o] {
    json cfg = base_config(ctx, "counterexample");
    cfg["p"] = o->p;
    cfg["alpha"] = o->alpha;
    cfg["theta2"] = o->theta2;
    cfg["n"] = o->n;
    const CounterexampleReport rep = counterexample_experiment(o->p, o->alpha, o->theta2, o->n);
    io::CsvTable t({"eps", "ecc", "avg_w", "avg_sigma", "avg_w_exact", "avg_sigma_exact", "lower_bound",
                    "measured_ratio", "pointwise_constant"},
                   cfg);
    io::PlotSeries ratio{"measured ratio", {}, {}}, lower{"lower bound", {}, {}}, sigma{"<sigma>_R", {}, {}};
    for (const auto& r : rep.rows) {
      t.add_row(std::vector<double>{r.eps, r.ecc, r.avg_w, r.avg_sigma, r.avg_w_exact, r.avg_sigma_exact,
                                    r.lower_bound, r.measured_ratio, r.pointwise_constant});
      ratio.x.push_back(r.ecc);
      ratio.y.push_back(r.measured_ratio);
      lower.x.push_back(r.ecc);
      lower.y.push_back(r.lower_bound);
      sigma.x.push_back(r.ecc);
      sigma.y.push_back(r.avg_sigma);
    }
    emit(ctx, render_csv(t, io::to_json(rep)));
    maybe_plot(ctx, cfg, "eccentric rectangles", "ecc(R)", "value", {ratio, lower, sigma});
    return 0;
  });
}

void weighted_check(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("weighted-check", "Weighted L^p ratios of bump kernels across eccentricities");
  struct Opts {
    int n = 8;
    double p = 2.0;
    double theta2 = 1.0;
    bool log_flag = false;
    int trials = 5;
    int max_log2_ecc = 10;
    WeightOptions w;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(2, 10));
  sub->add_option("--p", o->p, "Exponent p > 1");
  sub->add_option("--theta2", o->theta2, "theta_2 (must be 1)");
  sub->add_flag("--log", o->log_flag, "Logarithmic decay factor");
  sub->add_option("--trials", o->trials, "Random positive test functions")->check(CLI::NonNegativeNumber);
  sub->add_option("--max-log2-ecc", o->max_log2_ecc, "Eccentricities 2^0 .. 2^max")->check(CLI::NonNegativeNumber);
  o->w.add(sub);
  bind(sub, ctx, {"weights"}, [&ctx, o] {
    const KernelSpec base = KernelSpec::bump(1.0, 1.0, o->theta2, o->log_flag);
    base.validate();
    const GridGeometry g(o->n, Domain::box);
    json cfg = base_config(ctx, "weighted-check");
    cfg["n"] = o->n;
    cfg["p"] = o->p;
    cfg["kernel"] = io::to_json(base);
    cfg["trials"] = o->trials;
    cfg["max_log2_ecc"] = o->max_log2_ecc;
    cfg["weight"] = o->w.describe();
    const WeightedCheckReport rep =
        weighted_boundedness_check(base, o->p, o->w.make(g), o->trials, ctx.seed, o->max_log2_ecc);
    io::CsvTable t({"log2_ecc", "t1", "t2", "max_ratio", "normalized"}, cfg);
    io::PlotSeries s{"max ratio", {}, {}};
    for (const auto& r : rep.rows) {
      t.add_row(std::vector<double>{static_cast<double>(r.log2_ecc), r.t1, r.t2, r.max_ratio, r.normalized});
      s.x.push_back(std::exp2(r.log2_ecc));
      s.y.push_back(r.max_ratio);
    }
    json summary = io::to_json(rep);
    summary.erase("rows");
    summary["uniform_within_2"] = rep.max_over_baseline <= 2.0;
    emit(ctx, render_csv(t, summary));
    maybe_plot(ctx, cfg, "weighted ratios", "eccentricity", "ratio", {s});
    return 0;
  });
}

}  // namespace

void register_weight_commands(CLI::App& app, Context& ctx) {
  ap(app, ctx);
  counterexample(app, ctx);
  weighted_check(app, ctx);
}

}  // namespace czx::cli
