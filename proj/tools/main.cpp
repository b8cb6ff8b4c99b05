#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "czx/errors.hpp"
#include "czx/parallel.hpp"
#include "czx/selftest.hpp"

namespace czx::cli {

json base_config(const Context& ctx, const std::string& subcommand) {
  json j;
  j["tool"] = "czx-lab";
  j["version"] = czx::version();
  j["subcommand"] = subcommand;
  j["seed"] = ctx.seed;
  return j;
}

void emit(const Context& ctx, const std::string& text) {
  if (ctx.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(ctx.out, std::ios::binary);
  require<ResourceError>(static_cast<bool>(os), "cannot open " + ctx.out);
  os << text;
  require<ResourceError>(static_cast<bool>(os), "failed writing " + ctx.out);
  std::cerr << "wrote " << ctx.out << "\n";
}

std::string render_json(const json& config, const json& result) {
  json doc;
  doc["config"] = config;
  doc["result"] = result;
  return doc.dump(2) + "\n";
}

std::string render_csv(const io::CsvTable& table, const json& summary) {
  std::ostringstream os;
  table.write(os);
  if (!summary.is_null()) os << "# summary " << summary.dump() << "\n";
  return os.str();
}

void maybe_plot(const Context& ctx, const json& config, const std::string& title, const std::string& xlabel,
                const std::string& ylabel, const std::vector<io::PlotSeries>& series) {
  if (ctx.plot.empty()) return;
  io::write_loglog_svg(ctx.plot, title, xlabel, ylabel, series, config.dump());
  std::cerr << "wrote " << ctx.plot << "\n";
}

int run_selftests(const std::vector<std::string>& modules) {
  int failed = 0, total = 0;
  for (const auto& m : modules) {
    const SelftestReport rep = run_selftest(m);
    for (const auto& c : rep.cases) {
      ++total;
      if (!c.passed) ++failed;
      std::cout << (c.passed ? "PASS " : "FAIL ") << m << ": " << c.name;
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }
  }
  std::cout << (failed ? "selftest FAILED: " : "selftest passed: ") << total - failed << "/" << total << "\n";
  return failed ? 1 : 0;
}

void bind(CLI::App* sub, Context& ctx, std::vector<std::string> modules, std::function<int()> run) {
  auto flag = std::make_shared<bool>(false);
  sub->add_flag("--selftest", *flag, "Run the structural self-checks of the underlying modules and exit");
  sub->callback([&ctx, flag, modules = std::move(modules), run = std::move(run)] {
    ctx.action = [flag, modules, run] { return *flag ? run_selftests(modules) : run(); };
  });
}

}  // namespace czx::cli

int main(int argc, char** argv) {
  using namespace czx::cli;
  Context ctx;
  ctx.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  CLI::App app{"czx-lab: numerical experiments on dyadic models of CZX kernels"};
  app.set_version_flag("--version", std::string(czx::version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", ctx.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--seed", ctx.seed, "Seed for every random draw");
  app.add_option("--out", ctx.out, "Write the artifact here instead of stdout");
  app.add_option("--plot", ctx.plot, "Write an SVG plot of the sweep (commands with a sweep)");

  register_kernel_commands(app, ctx);
  register_dyadic_commands(app, ctx);
  register_sparse_commands(app, ctx);
  register_weight_commands(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  czx::set_thread_count(ctx.threads);
  try {
    return ctx.action ? ctx.action() : 0;
  } catch (const czx::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const czx::RangeError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const czx::ResolutionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
