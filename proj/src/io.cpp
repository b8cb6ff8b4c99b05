#include "czx/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "czx/errors.hpp"

namespace czx::io {

namespace {

constexpr char kMagic[4] = {'C', 'Z', 'X', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  require<ResourceError>(static_cast<bool>(is), "truncated signal file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::string domain_name(Domain d) { return d == Domain::box ? "box" : "torus"; }

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_signal_binary(const std::string& path, const Signal2D& s) {
  std::ofstream os(path, std::ios::binary);
  require<ResourceError>(static_cast<bool>(os), "cannot open " + path);
  os.write(kMagic, 4);
  put_le<std::uint32_t>(os, kVersion);
  put_le<std::int32_t>(os, s.n());
  put_le<std::uint8_t>(os, s.geometry().domain == Domain::box ? 1 : 0);
  for (double v : s.values()) put_le<double>(os, v);
  require<ResourceError>(static_cast<bool>(os), "write failed for " + path);
}

Signal2D read_signal_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require<ResourceError>(static_cast<bool>(is), "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  require<ParameterError>(is && std::memcmp(magic, kMagic, 4) == 0, path + " is not a signal file");
  require<ParameterError>(get_le<std::uint32_t>(is) == kVersion, "unsupported signal file version");
  const auto n = get_le<std::int32_t>(is);
  require<ResolutionError>(n >= 1 && n <= 14, "signal resolution out of range");
  const auto d = get_le<std::uint8_t>(is);
  require<ParameterError>(d <= 1, "unknown domain flag");
  GridGeometry g(n, d == 1 ? Domain::box : Domain::torus);
  std::vector<double> v(g.cells());
  for (double& x : v) x = get_le<double>(is);
  return Signal2D(g, std::move(v));
}

void write_signal_csv(std::ostream& os, const Signal2D& s) {
  os << "# n=" << s.n() << " domain=" << domain_name(s.geometry().domain) << "\n";
  const std::int64_t N = s.side();
  for (std::int64_t i1 = 0; i1 < N; ++i1) {
    for (std::int64_t i2 = 0; i2 < N; ++i2) os << (i2 ? "," : "") << format_double(s(i1, i2));
    os << "\n";
  }
}

Signal2D read_signal_csv(std::istream& is) {
  std::string line;
  require<ParameterError>(static_cast<bool>(std::getline(is, line)), "empty signal CSV");
  int n = 0;
  char dom[16] = {0};
  require<ParameterError>(std::sscanf(line.c_str(), "# n=%d domain=%15s", &n, dom) == 2, "bad signal CSV header");
  require<ResolutionError>(n >= 1 && n <= 14, "signal resolution out of range");
  const std::string d(dom);
  require<ParameterError>(d == "box" || d == "torus", "unknown domain " + d);
  GridGeometry g(n, d == "box" ? Domain::box : Domain::torus);
  std::vector<double> v;
  v.reserve(g.cells());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(row, cell, ',')) {
      v.push_back(std::stod(cell));
      ++count;
    }
    require<ParameterError>(count == static_cast<std::size_t>(g.side()), "signal CSV row has the wrong length");
  }
  require<ParameterError>(v.size() == g.cells(), "signal CSV has the wrong number of rows");
  return Signal2D(g, std::move(v));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json to_json(const KernelSpec& s) {
  json j;
  j["kind"] = s.kind == KernelKind::bump ? "bump" : "pure";
  j["theta1"] = s.theta1;
  j["theta2"] = s.theta2;
  j["log_flag"] = s.log_flag;
  if (s.kind == KernelKind::bump) {
    j["t1"] = s.t1;
    j["t2"] = s.t2;
  }
  return j;
}

json to_json(const BoundReport& r) {
  json j;
  j["kernel"] = to_json(r.spec);
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["log2_scale_min"] = r.log2_scale_min;
  j["log2_scale_max"] = r.log2_scale_max;
  j["max_ratio"] = number(r.max_ratio());
  json est = json::array();
  for (const auto& e : r.estimates) {
    json x;
    x["name"] = e.name;
    x["max_ratio"] = number(e.max_ratio);
    x["location"] = e.location;
    x["samples"] = e.samples;
    est.push_back(x);
  }
  j["estimates"] = est;
  return j;
}

json to_json(const MaximalReport& r) {
  json j;
  j["operator"] = r.operator_tag;
  j["n"] = r.n;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["max_ratio"] = number(r.max_ratio);
  j["domination_constant"] = r.domination_constant;
  j["dominated"] = r.dominated;
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"t1", row.t1}, {"t2", row.t2}, {"max_ratio", number(row.max_ratio)}});
  j["rows"] = rows;
  return j;
}

json to_json(const SparseFamily& S, const SparsenessCertificate& cert, std::uint64_t seed) {
  json j;
  j["n"] = S.geometry.n;
  j["p"] = S.p;
  j["commutator"] = S.commutator;
  j["seed"] = seed;
  j["c"] = S.c;
  j["A"] = S.A;
  j["C"] = S.C;
  j["restarts"] = S.restarts;
  j["epsilon"] = cert.epsilon;
  j["max_selected_fraction"] = cert.max_selected_fraction;
  j["depth_measure"] = cert.depth_measure;
  json cubes = json::array();
  for (const auto& Q : S.cubes) {
    json q;
    q["r0"] = Q.r0;
    q["c0"] = Q.c0;
    q["side"] = Q.side;
    q["S"] = {Q.S.r0, Q.S.r1, Q.S.c0, Q.S.c1};
    q["depth"] = Q.depth;
    q["average"] = Q.average;
    if (S.commutator) q["b_mean"] = Q.b_mean;
    q["witness_cells"] = Q.witness.size();
    cubes.push_back(q);
  }
  j["cubes"] = cubes;
  return j;
}

json to_json(const CounterexampleReport& r) {
  json j;
  j["p"] = r.p;
  j["alpha"] = r.alpha;
  j["theta2"] = r.theta2;
  j["n"] = r.n;
  j["slope_sigma"] = r.slope_sigma;
  j["slope_w"] = r.slope_w;
  j["slope_sigma_tail"] = r.slope_sigma_tail;
  j["slope_ratio_ecc"] = r.slope_ratio_ecc;
  j["slope_lower_ecc"] = r.slope_lower_ecc;
  j["ratio_monotone_tail"] = r.ratio_monotone_tail;
  j["growth_over_baseline"] = r.growth_over_baseline;
  j["eq4_violated"] = r.eq4_violated;
  return j;
}

json to_json(const WeightedCheckReport& r) {
  json j;
  j["kernel"] = to_json(r.base);
  j["p"] = r.p;
  j["ap"] = r.ap;
  j["baseline"] = r.baseline;
  j["max_ratio"] = r.max_ratio;
  j["max_over_baseline"] = r.max_over_baseline;
  j["max_normalized"] = r.max_normalized;
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"log2_ecc", row.log2_ecc}, {"t1", row.t1}, {"t2", row.t2}, {"max_ratio", row.max_ratio},
                    {"normalized", row.normalized}});
  j["rows"] = rows;
  return j;
}

json to_json(const DecayReport& r) {
  json j;
  j["scale"] = r.scale;
  j["theta1"] = r.theta1;
  j["theta2"] = r.theta2;
  json cases = json::array();
  for (const auto& c : r.cases)
    cases.push_back({{"case", to_string(c.kind)}, {"max_ratio", number(c.max_ratio)},
                     {"max_coefficient", c.max_coefficient}, {"pairs", c.pairs}});
  j["cases"] = cases;
  j["diagonal_offsets"] = r.diagonal_offsets;
  j["diagonal_max"] = r.diagonal_max;
  j["decay_slope_per_parameter"] = r.decay_slope_per_parameter;
  return j;
}

CsvTable::CsvTable(std::vector<std::string> header, json config)
    : header_(std::move(header)), config_(std::move(config)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  require<InvariantViolation>(cells.size() == header_.size(), "CSV row width differs from the header");
  rows_.push_back(cells);
}

void CsvTable::add_row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_double(v));
  add_row(s);
}

void CsvTable::write(std::ostream& os) const {
  os << "# config " << config_.dump() << "\n";
  for (std::size_t k = 0; k < header_.size(); ++k) os << (k ? "," : "") << csv_escape(header_[k]);
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_escape(row[k]);
    os << "\n";
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<PlotSeries>& series,
                      const std::string& description) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!(s.x[k] > 0 && s.y[k] > 0) || !std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, std::log2(s.x[k]));
      xmax = std::max(xmax, std::log2(s.x[k]));
      ymin = std::min(ymin, std::log2(s.y[k]));
      ymax = std::max(ymax, std::log2(s.y[k]));
    }
  require<ParameterError>(std::isfinite(xmin), "nothing to plot");
  if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto px = [&](double v) { return L + (std::log2(v) - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (std::log2(v) - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  std::ofstream os(path);
  require<ResourceError>(static_cast<bool>(os), "cannot open " + path);
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  if (!description.empty()) os << "<desc>" << xml_escape(description) << "</desc>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
    const double x = px(std::exp2(e));
    os << "<text x=\"" << x << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">2^" << e
       << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); ++e) {
    const double y = py(std::exp2(e));
    os << "<text x=\"" << L - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-size=\"11\">2^" << e
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(series[s].x.size(), series[s].y.size()); ++k)
      if (series[s].x[k] > 0 && series[s].y[k] > 0 && std::isfinite(series[s].y[k]))
        os << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << col << "\">" << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace czx::io
