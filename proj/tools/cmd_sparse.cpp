#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "cli.hpp"
#include "czx/errors.hpp"
#include "czx/maximal.hpp"
#include "czx/rng.hpp"
#include "czx/sparse.hpp"

namespace czx::cli {
namespace {

Signal2D load_signal(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
    std::ifstream is(path);
    require<ResourceError>(static_cast<bool>(is), "cannot open " + path);
    return io::read_signal_csv(is);
  }
  return io::read_signal_binary(path);
}

void sparse(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("sparse", "Sparse domination of |Tf| or |[b,T]f| for bump kernels");
  struct Opts {
    int n = 6;
    double p = 1.1;
    int trials = 10;
    double theta2 = 1.0;
    bool log_flag = false;
    bool commutator = false;
    std::string input;
    std::string family;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(2, 8));
  sub->add_option("--p", o->p, "Exponent of the sparse averages (>= 1)");
  sub->add_option("--trials", o->trials, "Random inputs")->check(CLI::PositiveNumber);
  sub->add_option("--theta2", o->theta2, "theta_2 of the bump kernels");
  sub->add_flag("--log", o->log_flag, "Logarithmic decay factor");
  sub->add_flag("--commutator", o->commutator, "Dominate [b, T] f with a random symbol b");
  sub->add_option("--input", o->input, "Use this signal as f (binary, or CSV by extension); one trial");
  sub->add_option("--family", o->family, "Write the family of the first trial as JSON");
  bind(sub, ctx, {"sparse"}, [&ctx, o] {
    require(o->p >= 1.0, "--p must be at least 1");
    std::optional<Signal2D> given;
    if (!o->input.empty()) {
      given = load_signal(o->input);
      require(given->geometry().domain == Domain::box, "the input signal must be in box mode");
    }
    const GridGeometry g = given ? given->geometry() : GridGeometry(o->n, Domain::box);
    const int trials = given ? 1 : o->trials;
    json cfg = base_config(ctx, "sparse");
    cfg["n"] = g.n;
    cfg["p"] = o->p;
    cfg["trials"] = trials;
    cfg["theta2"] = o->theta2;
    cfg["log_flag"] = o->log_flag;
    cfg["commutator"] = o->commutator;
    if (given) cfg["input"] = o->input;
    io::CsvTable t({"trial", "t1", "t2", "cubes", "c", "A", "C", "restarts", "max_ratio", "dominated", "epsilon",
                    "max_selected_fraction"},
                   cfg);
    bool all = true;
    double eps = 1.0, sel = 0.0, Cmax = 0.0;
    for (int k = 0; k < trials; ++k) {
      Rng rng(hash_combine(ctx.seed, static_cast<std::uint64_t>(k)));
      const double t1 = std::exp2(-1 - k % 5), t2 = std::exp2(-1 - (k / 2) % 5);
      const BumpConvolution T(KernelSpec::bump(t1, t2, o->theta2, o->log_flag), g);
      const Signal2D f = given ? *given : random_signal(g, rng, g.n);
      SparseFamily fam;
      DominationCheck chk;
      if (o->commutator) {
        const Signal2D b = random_signal(g, rng, g.n);
        CommutatorSparseResult r = commutator_sparse(T, b, f, o->p);
        fam = std::move(r.family);
        chk = r.check;
      } else {
        SparseResult r = sparse_dominate(T, f, o->p);
        fam = std::move(r.family);
        chk = r.check;
      }
      const SparsenessCertificate cert = verify_sparseness(fam);
      t.add_row(std::vector<double>{static_cast<double>(k), t1, t2, static_cast<double>(fam.cubes.size()), fam.c, fam.A,
                                    fam.C, static_cast<double>(fam.restarts), chk.max_ratio, chk.dominated ? 1.0 : 0.0,
                                    cert.epsilon, cert.max_selected_fraction});
      all = all && chk.dominated;
      eps = std::min(eps, cert.epsilon);
      sel = std::max(sel, cert.max_selected_fraction);
      Cmax = std::max(Cmax, fam.C);
      if (k == 0 && !o->family.empty()) {
        json doc;
        doc["config"] = cfg;
        doc["family"] = io::to_json(fam, cert, ctx.seed);
        std::ofstream os(o->family, std::ios::binary);
        require<ResourceError>(static_cast<bool>(os), "cannot open " + o->family);
        os << doc.dump(2) << "\n";
      }
    }
    json summary;
    summary["all_dominated"] = all;
    summary["min_epsilon"] = eps;
    summary["max_selected_fraction"] = sel;
    summary["max_C"] = Cmax;
    summary["p_prime"] = o->p > 1.0 ? o->p / (o->p - 1.0) : INFINITY;
    emit(ctx, render_csv(t, summary));
    return all && eps >= 1.0 / 16.0 && sel <= 0.5 ? 0 : 3;
  });
}

void sharp_maximal_cmd(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("sharp-maximal", "Sharp maximal function against the strong maximal function");
  struct Opts {
    int n = 6;
    double theta2 = 1.0;
    bool log_flag = false;
    std::vector<int> widths{1, 2, 3, 4, 5, 6};
    int samples = 10;
    double constant = 0.4;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--n", o->n, "Grid resolution exponent")->check(CLI::Range(2, 7));
  sub->add_option("--theta2", o->theta2, "theta_2 of the bump kernels");
  sub->add_flag("--log", o->log_flag, "Logarithmic decay factor");
  sub->add_option("--widths", o->widths, "Exponents k of the widths 2^-k, comma separated")->delimiter(',');
  sub->add_option("--samples", o->samples, "Random f")->check(CLI::PositiveNumber);
  sub->add_option("--constant", o->constant, "Domination constant to test (0: report only)");
  bind(sub, ctx, {"maximal"}, [&ctx, o] {
    json cfg = base_config(ctx, "sharp-maximal");
    cfg["n"] = o->n;
    cfg["theta2"] = o->theta2;
    cfg["log_flag"] = o->log_flag;
    cfg["widths"] = o->widths;
    cfg["samples"] = o->samples;
    cfg["constant"] = o->constant;
    const MaximalReport rep =
        sharp_maximal_sweep(o->n, o->theta2, o->log_flag, o->widths, o->samples, ctx.seed, o->constant);
    emit(ctx, render_json(cfg, io::to_json(rep)));
    std::vector<io::PlotSeries> series;
    for (const auto& row : rep.rows) {
      const std::string label = "t2 = " + io::format_double(row.t2);
      auto it = std::find_if(series.begin(), series.end(), [&](const io::PlotSeries& s) { return s.label == label; });
      if (it == series.end()) {
        series.push_back({label, {}, {}});
        it = series.end() - 1;
      }
      it->x.push_back(row.t1);
      it->y.push_back(row.max_ratio);
    }
    maybe_plot(ctx, cfg, "sharp maximal over strong maximal", "t1", "max ratio", series);
    return rep.dominated ? 0 : 3;
  });
}

}  // namespace

void register_sparse_commands(CLI::App& app, Context& ctx) {
  sparse(app, ctx);
  sharp_maximal_cmd(app, ctx);
}

}  // namespace czx::cli
