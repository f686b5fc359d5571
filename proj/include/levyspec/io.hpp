#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "levyspec/rde.hpp"
#include "levyspec/spectral.hpp"

// Text artifact formatting. Every number is rendered with the shortest
// round-trip decimal form, so identical values give identical bytes and
// parsing the file back recovers the exact doubles.
namespace levyspec::io {

std::string format_double(double v);

// Histogram measures: header `bin_left,bin_right,mass`. Atomic measures:
// header `atom,weight`.
std::string measure_csv(const SpectralMeasure& mu);
SpectralMeasure read_measure_csv(const std::filesystem::path& path);

// Header `x,y,re_S,im_S`; y is the constant imaginary height of the scan.
std::string stieltjes_csv(const std::vector<double>& xs, double y,
                          const std::vector<std::complex<double>>& values);

// Header `x,density,mc_err`.
std::string density_csv(const std::vector<DensityPoint>& points);

struct MomentRow {
  int order = 0;        // moment order 2p
  double exact = 0;     // limiting value (may be +inf)
  double mc_estimate = 0;
  double mc_stderr = 0;
  double bound = 0;     // a priori upper bound (may be +inf)
};

// Header `order,exact,mc_estimate,mc_stderr,bound`.
std::string moment_table_csv(const std::vector<MomentRow>& rows);

// Full population snapshot, sufficient to audit a solve_rde run.
nlohmann::json population_json(const ResolventPopulation& pop);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a content hashes used by run manifests.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hash_hex(std::uint64_t h);

// Curve extracted from one of the CSV layouts above, for plotting.
// Histograms load as step outlines; density/stieltjes files as point series.
struct Curve {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};
Curve read_curve_csv(const std::filesystem::path& path);

}  // namespace levyspec::io
