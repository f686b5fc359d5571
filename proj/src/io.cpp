#include "levyspec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyspec/errors.hpp"

namespace levyspec::io {

std::string format_double(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view token, const std::filesystem::path& path) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\r')) token.remove_suffix(1);
  double value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ConfigError("malformed numeric field '" + std::string(token) + "' in " + path.string());
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string strip_eol(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

struct CsvTable {
  std::string header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV file " + path.string());
  table.header = strip_eol(line);
  const std::size_t columns = split_csv_line(table.header).size();
  while (std::getline(in, line)) {
    line = strip_eol(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw ConfigError("ragged CSV row in " + path.string());
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto f : fields) row.push_back(parse_double(f, path));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

std::string measure_csv(const SpectralMeasure& mu) {
  std::string out;
  if (mu.atomic()) {
    out = "atom,weight\n";
    const auto& xs = mu.support();
    const auto& ws = mu.weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out += format_double(xs[i]);
      out += ',';
      out += format_double(ws[i]);
      out += '\n';
    }
  } else {
    out = "bin_left,bin_right,mass\n";
    const auto& edges = mu.edges();
    const auto& ms = mu.masses();
    for (std::size_t i = 0; i < ms.size(); ++i) {
      out += format_double(edges[i]);
      out += ',';
      out += format_double(edges[i + 1]);
      out += ',';
      out += format_double(ms[i]);
      out += '\n';
    }
  }
  return out;
}

SpectralMeasure read_measure_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header == "atom,weight") {
    std::vector<double> xs, ws;
    for (const auto& row : table.rows) {
      xs.push_back(row[0]);
      ws.push_back(row[1]);
    }
    return SpectralMeasure::from_atoms(std::move(xs), std::move(ws));
  }
  if (table.header == "bin_left,bin_right,mass") {
    if (table.rows.empty()) throw ConfigError("histogram CSV with no bins: " + path.string());
    std::vector<double> edges, masses;
    edges.push_back(table.rows.front()[0]);
    for (const auto& row : table.rows) {
      if (row[0] != edges.back()) {
        throw ConfigError("histogram bins not contiguous in " + path.string());
      }
      edges.push_back(row[1]);
      masses.push_back(row[2]);
    }
    return SpectralMeasure::from_histogram(std::move(edges), std::move(masses));
  }
  throw ConfigError("unrecognised measure CSV header '" + table.header + "' in " + path.string());
}

std::string stieltjes_csv(const std::vector<double>& xs, double y,
                          const std::vector<std::complex<double>>& values) {
  if (xs.size() != values.size()) throw ConfigError("stieltjes_csv: size mismatch");
  std::string out = "x,y,re_S,im_S\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += format_double(xs[i]);
    out += ',';
    out += format_double(y);
    out += ',';
    out += format_double(values[i].real());
    out += ',';
    out += format_double(values[i].imag());
    out += '\n';
  }
  return out;
}

std::string density_csv(const std::vector<DensityPoint>& points) {
  std::string out = "x,density,mc_err\n";
  for (const auto& p : points) {
    out += format_double(p.x);
    out += ',';
    out += format_double(p.density);
    out += ',';
    out += format_double(p.mc_err);
    out += '\n';
  }
  return out;
}

std::string moment_table_csv(const std::vector<MomentRow>& rows) {
  std::string out = "order,exact,mc_estimate,mc_stderr,bound\n";
  for (const auto& r : rows) {
    out += std::to_string(r.order);
    out += ',';
    out += format_double(r.exact);
    out += ',';
    out += format_double(r.mc_estimate);
    out += ',';
    out += format_double(r.mc_stderr);
    out += ',';
    out += format_double(r.bound);
    out += '\n';
  }
  return out;
}

nlohmann::json population_json(const ResolventPopulation& pop) {
  nlohmann::json j;
  j["z"] = {{"re", pop.z.real()}, {"im", pop.z.imag()}};
  j["epsilon"] = pop.epsilon;
  j["sigma2_eff"] = pop.sigma2_eff;
  j["sweeps_run"] = pop.sweeps_run;
  j["converged"] = pop.converged;
  j["last_shift"] = pop.last_shift;
  j["mean"] = {{"re", pop.mean().real()}, {"im", pop.mean().imag()}};
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : pop.samples) {
    samples.push_back({s.real(), s.imag()});
  }
  j["samples"] = std::move(samples);
  return j;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : data) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  return fnv1a64(read_text_file(path));
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

Curve read_curve_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  Curve curve;
  curve.label = path.stem().string();
  if (table.header == "bin_left,bin_right,mass") {
    // Histogram outline: two points per bin at the bin's density height.
    for (const auto& row : table.rows) {
      const double width = row[1] - row[0];
      if (!(width > 0)) throw ConfigError("empty histogram bin in " + path.string());
      const double density = row[2] / width;
      curve.xs.push_back(row[0]);
      curve.ys.push_back(density);
      curve.xs.push_back(row[1]);
      curve.ys.push_back(density);
    }
    return curve;
  }
  if (table.header == "atom,weight") {
    for (const auto& row : table.rows) {
      curve.xs.push_back(row[0]);
      curve.ys.push_back(row[1]);
    }
    return curve;
  }
  if (table.header == "x,density,mc_err") {
    for (const auto& row : table.rows) {
      curve.xs.push_back(row[0]);
      curve.ys.push_back(row[1]);
    }
    return curve;
  }
  if (table.header == "x,y,re_S,im_S") {
    // Plot the density proxy Im S / pi.
    for (const auto& row : table.rows) {
      curve.xs.push_back(row[0]);
      curve.ys.push_back(row[3] / 3.14159265358979323846);
    }
    return curve;
  }
  throw ConfigError("unrecognised CSV header '" + table.header + "' in " + path.string());
}

}  // namespace levyspec::io
