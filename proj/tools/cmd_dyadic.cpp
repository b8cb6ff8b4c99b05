#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>

#include "cli.hpp"
#include "czx/errors.hpp"
#include "czx/form.hpp"
#include "czx/lattice.hpp"
#include "czx/rep.hpp"
#include "czx/rng.hpp"
#include "czx/stats.hpp"
#include "czx/weights.hpp"

namespace czx::cli {
namespace {

std::string rect_tag(const DyadicRect& R) {
  return std::to_string(R.first.scale) + ":" + std::to_string(R.first.index) + ":" + std::to_string(R.second.index);
}

KernelSpec form_kernel(const std::string& kind, double theta1, double theta2, bool log_flag, double t1, double t2) {
  KernelSpec s = kind == "bump" ? KernelSpec::bump(t1, t2, theta2, log_flag) : KernelSpec::pure(theta1, theta2, log_flag);
  s.validate();
  return s;
}

void haar_decay(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("haar-decay", "Haar coefficients of a form against the pair bound, per position case");
  struct Opts {
    int n = 5;
    int scale = -1;
    std::string kind = "pure";
    double theta1 = 1.0, theta2 = 1.0, t1 = 0.25, t2 = 0.25;
    bool log_flag = false;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(2, 7));
  sub->add_option("--scale", o->scale, "Scale of the squares (default n - 2)");
  sub->add_option("--kernel", o->kind, "pure or bump")->check(CLI::IsMember({"pure", "bump"}));
  sub->add_option("--theta1", o->theta1, "theta_1");
  sub->add_option("--theta2", o->theta2, "theta_2");
  sub->add_option("--t1", o->t1, "Bump width, first axis");
  sub->add_option("--t2", o->t2, "Bump width, second axis");
  sub->add_flag("--log", o->log_flag, "Logarithmic decay factor");
  bind(sub, ctx, {"signal", "form"}, [&ctx, o] {
    const int scale = o->scale < 0 ? o->n - 2 : o->scale;
    require(scale >= 1 && scale < o->n, "--scale must lie in [1, n - 1]");
    const KernelSpec spec = form_kernel(o->kind, o->theta1, o->theta2, o->log_flag, o->t1, o->t2);
    const GridGeometry g(o->n);
    const FormMatrix B(spec, g);
    const HaarSystem hs(g, Lattice2D::standard(o->n));
    const DecayReport rep = decay_report(B, hs, spec.theta1, spec.theta2, scale);
    json cfg = base_config(ctx, "haar-decay");
    cfg["n"] = o->n;
    cfg["scale"] = scale;
    cfg["kernel"] = io::to_json(spec);
    io::CsvTable t({"case", "scale", "theta1", "theta2", "max_ratio", "argmax_I", "argmax_J"}, cfg);
    for (const auto& c : rep.cases)
      t.add_row({to_string(c.kind), std::to_string(scale), io::format_double(spec.theta1),
                 io::format_double(spec.theta2), io::format_double(c.max_ratio), rect_tag(c.argmax_I),
                 rect_tag(c.argmax_J)});
    json summary;
    summary["decay_slope_per_parameter"] = rep.decay_slope_per_parameter;
    summary["required_slope"] = 1.0 + spec.theta() - 0.15;
    summary["diagonal_offsets"] = rep.diagonal_offsets;
    summary["diagonal_max"] = rep.diagonal_max;
    emit(ctx, render_csv(t, summary));
    std::vector<double> m(rep.diagonal_offsets.begin(), rep.diagonal_offsets.end());
    maybe_plot(ctx, cfg, "diagonal Haar coefficients", "offset m", "max coefficient", {{"(m, m)", m, rep.diagonal_max}});
    return 0;
  });
}

void kgood(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("kgood", "Monte Carlo frequency of k-good intervals over random shifts");
  struct Opts {
    int jmax = 8;
    int trials = 10000;
    std::int64_t base = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--jmax", o->jmax, "Largest scale j (all 2 <= k <= j <= jmax)")->check(CLI::Range(2, 20));
  sub->add_option("--trials", o->trials, "Random shifts per (j, k)")->check(CLI::PositiveNumber);
  sub->add_option("--base", o->base, "Index of the base interval (taken modulo 2^j)")->check(CLI::NonNegativeNumber);
  bind(sub, ctx, {"lattice"}, [&ctx, o] {
    json cfg = base_config(ctx, "kgood");
    cfg["jmax"] = o->jmax;
    cfg["trials"] = o->trials;
    cfg["base"] = o->base;
    io::CsvTable t({"j", "k", "probability"}, cfg);
    double lo = 1.0, hi = 0.0;
    for (int j = 2; j <= o->jmax; ++j)
      for (int k = 2; k <= j; ++k) {
        const std::uint64_t s = hash_combine(hash_combine(ctx.seed, static_cast<std::uint64_t>(j)), static_cast<std::uint64_t>(k));
        const double p = kgood_probability(j, k, o->trials, s, o->base % (std::int64_t{1} << j));
        t.add_row(std::vector<double>{static_cast<double>(j), static_cast<double>(k), p});
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    json summary;
    summary["min"] = lo;
    summary["max"] = hi;
    emit(ctx, render_csv(t, summary));
    return 0;
  });
}

void rep_check(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("rep-check", "Exact representation identity on random lattices");
  struct Opts {
    int n = 5;
    std::string kind = "bump";
    double theta1 = 1.0, theta2 = 1.0, t1 = 0.25, t2 = 0.25;
    bool log_flag = false;
    int trials = 20;
    int lattices = 1;
    std::string ledger;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(1, 6));
  sub->add_option("--kernel", o->kind, "pure or bump")->check(CLI::IsMember({"pure", "bump"}));
  sub->add_option("--theta1", o->theta1, "theta_1");
  sub->add_option("--theta2", o->theta2, "theta_2");
  sub->add_option("--t1", o->t1, "Bump width, first axis");
  sub->add_option("--t2", o->t2, "Bump width, second axis");
  sub->add_flag("--log", o->log_flag, "Logarithmic decay factor");
  sub->add_option("--trials", o->trials, "Random (f, g) pairs per lattice")->check(CLI::PositiveNumber);
  sub->add_option("--lattices", o->lattices, "Random lattices")->check(CLI::PositiveNumber);
  sub->add_option("--ledger", o->ledger, "Also write the band ledger of the first pair, averaged over lattices");
  bind(sub, ctx, {"rep"}, [&ctx, o] {
    const KernelSpec spec = form_kernel(o->kind, o->theta1, o->theta2, o->log_flag, o->t1, o->t2);
    const GridGeometry g(o->n);
    const FormMatrix B(spec, g);
    json cfg = base_config(ctx, "rep-check");
    cfg["n"] = o->n;
    cfg["kernel"] = io::to_json(spec);
    cfg["trials"] = o->trials;
    cfg["lattices"] = o->lattices;
    io::CsvTable t({"lattice", "trial", "mean_f", "mean_g", "form", "sigma1", "sigma2", "sigma3", "residual"}, cfg);
    Rng rng(ctx.seed);
    std::vector<Lattice2D> lats;
    for (int l = 0; l < o->lattices; ++l) lats.push_back(Lattice2D::random(o->n, rng));
    // Pairs are drawn once and reused on every lattice.
    std::vector<std::pair<Signal2D, Signal2D>> pairs;
    std::vector<std::pair<double, double>> means;
    for (int k = 0; k < o->trials; ++k) {
      Signal2D f = random_signal(g, rng, o->n), h = random_signal(g, rng, o->n);
      const double mf = f.mean(), mg = h.mean();
      means.emplace_back(mf, mg);
      pairs.emplace_back(f - Signal2D::constant(g, mf), h - Signal2D::constant(g, mg));
    }
    double worst = 0.0;
    for (int l = 0; l < o->lattices; ++l) {
      const HaarSystem hs(g, lats[static_cast<std::size_t>(l)]);
      const RepresentationEngine eng(B, hs);
      for (int k = 0; k < o->trials; ++k) {
        const auto& [f, h] = pairs[static_cast<std::size_t>(k)];
        const RepDecomposition d = eng.decompose(f, h, spec.theta1, spec.theta2);
        worst = std::max(worst, d.identity_error());
        t.add_row(std::vector<double>{static_cast<double>(l), static_cast<double>(k), means[static_cast<std::size_t>(k)].first,
                                      means[static_cast<std::size_t>(k)].second, d.form_value, d.sigma1, d.sigma2,
                                      d.sigma3, d.identity_error()});
      }
    }
    json summary;
    summary["max_residual"] = worst;
    summary["tolerance"] = 1e-10;
    summary["passed"] = worst <= 1e-10;
    emit(ctx, render_csv(t, summary));
    if (!o->ledger.empty()) {
      const RepDecomposition avg = decompose_averaged(B, lats, pairs[0].first, pairs[0].second, spec.theta1, spec.theta2);
      io::CsvTable lt({"k1", "k2", "m1", "m2", "band_sum", "coefficient_max"}, cfg);
      for (const auto& e : avg.ledger)
        lt.add_row(std::vector<double>{static_cast<double>(e.k1), static_cast<double>(e.k2), static_cast<double>(e.m1),
                                       static_cast<double>(e.m2), e.band_sum, e.coefficient_max});
      std::ofstream os(o->ledger, std::ios::binary);
      require<ResourceError>(static_cast<bool>(os), "cannot open " + o->ledger);
      lt.write(os);
    }
    return worst <= 1e-10 ? 0 : 3;
  });
}

void shift_norms(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("shift-norms", "Power-iteration norms of random-sign dyadic shifts");
  struct Opts {
    int n = 7;
    int kmax = 6;
    std::string flavor = "balanced";
    std::string mode = "both";
    int draws = 1;
    int iterations = 200;
    double tol = 1e-6;
    std::optional<double> weight_alpha;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(1, 9));
  sub->add_option("--kmax", o->kmax, "Largest k")->check(CLI::NonNegativeNumber);
  sub->add_option("--flavor", o->flavor, "balanced or symmetric")->check(CLI::IsMember({"balanced", "symmetric"}));
  sub->add_option("--mode", o->mode, "diagonal (k,k), first (k,0) or both")
      ->check(CLI::IsMember({"diagonal", "first", "both"}));
  sub->add_option("--draws", o->draws, "Independent sign draws per k")->check(CLI::PositiveNumber);
  sub->add_option("--iterations", o->iterations, "Power iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o->tol, "Relative tolerance of the power iteration");
  sub->add_option("--weight-alpha", o->weight_alpha, "Also measure the norm on L^2(|x|^alpha)");
  bind(sub, ctx, {"rep"}, [&ctx, o] {
    require(o->kmax < o->n, "--kmax must be below n");
    const GridGeometry g(o->n);
    const HaarSystem hs(g, Lattice2D::standard(o->n));
    const ShiftFlavor flavor = o->flavor == "balanced" ? ShiftFlavor::balanced : ShiftFlavor::symmetric;
    json cfg = base_config(ctx, "shift-norms");
    cfg["n"] = o->n;
    cfg["kmax"] = o->kmax;
    cfg["flavor"] = o->flavor;
    cfg["mode"] = o->mode;
    cfg["draws"] = o->draws;
    cfg["iterations"] = o->iterations;
    cfg["tol"] = o->tol;
    if (o->weight_alpha) cfg["weight_alpha"] = *o->weight_alpha;
    std::optional<Weight> w;
    if (o->weight_alpha) w = power_weight(g, *o->weight_alpha);
    io::CsvTable t({"k1", "k2", "draw", "norm", "iterations", "converged", "weighted_norm"}, cfg);
    std::vector<io::PlotSeries> series;
    std::vector<double> diag_x, diag_y;
    double envelope = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      const bool diagonal = pass == 0;
      if ((diagonal && o->mode == "first") || (!diagonal && o->mode == "diagonal")) continue;
      io::PlotSeries s{diagonal ? "k = (k, k)" : "k = (k, 0)", {}, {}};
      for (int k = 0; k <= o->kmax; ++k) {
        double best = 0.0;
        for (int dr = 0; dr < o->draws; ++dr) {
          const std::uint64_t cs = hash_combine(ctx.seed, static_cast<std::uint64_t>(dr));
          const ShiftOperator Q(hs, {k, diagonal ? k : 0}, ShiftCoefficients::random_sign(cs), flavor);
          const NormEstimate e = operator_norm(Q, o->iterations, cs + 1, o->tol);
          double wn = NAN;
          if (w) wn = weighted_operator_norm(Q, w->values, o->iterations, cs + 1, o->tol).norm;
          t.add_row(std::vector<double>{static_cast<double>(k), static_cast<double>(diagonal ? k : 0),
                                        static_cast<double>(dr), e.norm, static_cast<double>(e.iterations),
                                        e.converged ? 1.0 : 0.0, wn});
          best = std::max(best, e.norm);
        }
        s.x.push_back(1.0 + k);
        s.y.push_back(best);
        if (diagonal && k >= 1) {
          diag_x.push_back(1.0 + k);
          diag_y.push_back(best);
        }
        if (!diagonal) envelope = std::max(envelope, best / (std::sqrt(1.0 + k) * std::exp2(k)));
      }
      series.push_back(std::move(s));
    }
    json summary;
    if (diag_x.size() >= 2) summary["diagonal_loglog_slope"] = loglog_slope(diag_x, diag_y);
    if (o->mode != "diagonal") summary["first_axis_envelope_constant"] = envelope;
    emit(ctx, render_csv(t, summary));
    maybe_plot(ctx, cfg, "dyadic shift norms", "1 + k", "norm", series);
    return 0;
  });
}

void commutator(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("commutator", "L^p ratios of [b, T] f against BMO norm times L^p norm");
  struct Opts {
    int n = 5;
    std::vector<double> p{1.5, 2.0, 3.0};
    int trials = 20;
    double theta2 = 1.0;
    bool log_flag = false;
    double constant = 0.2;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(2, 8));
  sub->add_option("--p", o->p, "Exponents, comma separated")->delimiter(',');
  sub->add_option("--trials", o->trials, "Random (b, f) pairs per exponent")->check(CLI::PositiveNumber);
  sub->add_option("--theta2", o->theta2, "theta_2 of the bump kernels");
  sub->add_flag("--log", o->log_flag, "Logarithmic decay factor");
  sub->add_option("--constant", o->constant, "Bound to test the ratios against");
  bind(sub, ctx, {"rep"}, [&ctx, o] {
    const GridGeometry g(o->n, Domain::box);
    json cfg = base_config(ctx, "commutator");
    cfg["n"] = o->n;
    cfg["p"] = o->p;
    cfg["trials"] = o->trials;
    cfg["theta2"] = o->theta2;
    cfg["log_flag"] = o->log_flag;
    cfg["constant"] = o->constant;
    io::CsvTable t({"p", "trial", "t1", "t2", "bmo", "ratio"}, cfg);
    json per_p = json::array();
    double worst = 0.0;
    for (double p : o->p) {
      require(p >= 1.0, "--p values must be at least 1");
      double mx = 0.0;
      for (int k = 0; k < o->trials; ++k) {
        // Same (b, f, t) for every p so the exponents are comparable.
        Rng rng(hash_combine(ctx.seed, static_cast<std::uint64_t>(k)));
        const double t1 = std::exp2(-1 - (k % 4)), t2 = std::exp2(-1 - (k / 4) % 4);
        const BumpConvolution T(KernelSpec::bump(t1, t2, o->theta2, o->log_flag), g);
        const Signal2D b = random_signal(g, rng), f = random_signal(g, rng);
        const double bmo = bmo_norm(b);
        const double r = commutator_apply(b, T, f).norm(p) / (bmo * f.norm(p));
        t.add_row(std::vector<double>{p, static_cast<double>(k), t1, t2, bmo, r});
        mx = std::max(mx, r);
      }
      per_p.push_back({{"p", p}, {"max_ratio", mx}});
      worst = std::max(worst, mx);
    }
    json summary;
    summary["per_p"] = per_p;
    summary["max_ratio"] = worst;
    summary["within_constant"] = worst <= o->constant;
    emit(ctx, render_csv(t, summary));
    return worst <= o->constant ? 0 : 3;
  });
}

}  // namespace

void register_dyadic_commands(CLI::App& app, Context& ctx) {
  haar_decay(app, ctx);
  kgood(app, ctx);
  rep_check(app, ctx);
  shift_norms(app, ctx);
  commutator(app, ctx);
}

}  // namespace czx::cli
