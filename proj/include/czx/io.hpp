#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "czx/form.hpp"
#include "czx/kernel.hpp"
#include "czx/maximal.hpp"
#include "czx/rep.hpp"
#include "czx/signal.hpp"
#include "czx/sparse.hpp"
#include "czx/weights.hpp"

namespace czx::io {

using json = nlohmann::ordered_json;

// Binary signal file: "CZXS", u32 version (1), i32 n, u8 domain (0 torus,
// 1 box), then 4^n little-endian binary64 values in row-major order.
void write_signal_binary(const std::string& path, const Signal2D& s);
Signal2D read_signal_binary(const std::string& path);

// CSV signal: one grid row per line; the first line is "# n=<n> domain=<box|torus>".
void write_signal_csv(std::ostream& os, const Signal2D& s);
Signal2D read_signal_csv(std::istream& is);

json to_json(const KernelSpec& spec);
json to_json(const BoundReport& r);
json to_json(const MaximalReport& r);
json to_json(const SparseFamily& S, const SparsenessCertificate& cert, std::uint64_t seed);
json to_json(const CounterexampleReport& r);
json to_json(const WeightedCheckReport& r);
json to_json(const DecayReport& r);

// Doubles print with 17 significant digits so reruns are byte-identical.
std::string format_double(double v);

// CSV table whose first line records the generating configuration.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header, json config);
  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& cells);
  void write(std::ostream& os) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  json config_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Static SVG with log2 axes; non-positive values are skipped. The description
// (typically the generating configuration) is stored in a <desc> element.
void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<PlotSeries>& series,
                      const std::string& description = "");

}  // namespace czx::io
