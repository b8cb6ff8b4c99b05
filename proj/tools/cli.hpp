#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "czx/io.hpp"

namespace czx::cli {

using json = io::json;

// Process-wide flags plus the action chosen by the parsed subcommand.
struct Context {
  int threads = 1;
  std::uint64_t seed = 1;
  std::string out;   // artifact path; stdout when empty
  std::string plot;  // SVG path; no plot when empty
  std::function<int()> action;
};

// Config header shared by every artifact: tool, library version, subcommand, seed.
// The thread count is left out on purpose since results never depend on it.
json base_config(const Context& ctx, const std::string& subcommand);

// Writes the artifact to --out or stdout.
void emit(const Context& ctx, const std::string& text);
std::string render_json(const json& config, const json& result);
// CSV with the config line first and an optional trailing "# summary" line.
std::string render_csv(const io::CsvTable& table, const json& summary = json());

void maybe_plot(const Context& ctx, const json& config, const std::string& title, const std::string& xlabel,
                const std::string& ylabel, const std::vector<io::PlotSeries>& series);

// Prints one line per case and returns the exit status.
int run_selftests(const std::vector<std::string>& modules);

// Adds --selftest and installs the action: selftests when the flag is set,
// otherwise run().
void bind(CLI::App* sub, Context& ctx, std::vector<std::string> modules, std::function<int()> run);

void register_kernel_commands(CLI::App& app, Context& ctx);
void register_dyadic_commands(CLI::App& app, Context& ctx);
void register_sparse_commands(CLI::App& app, Context& ctx);
void register_weight_commands(CLI::App& app, Context& ctx);

}  // namespace czx::cli
