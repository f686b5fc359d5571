#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyspec/levy.hpp"

namespace levyspec::cli {

struct GridSpec {
  double lo = -5.0;
  double hi = 5.0;
  int points = 101;
};

// Parsed experiment description. Exactly one of "preset" or
// "characteristics" selects the triple; "seed" is mandatory (no wall-clock
// fallback) so every run is reproducible by construction.
struct ExperimentConfig {
  LevyCharacteristics chars;
  nlohmann::json echo;  // the raw config object, replayed into the manifest

  int n = 500;
  int reps = 10;
  bool seed_set = false;
  std::uint64_t seed = 0;
  int pop_size = 4096;
  int sweeps = 400;
  int branch_cap = 50;
  int depth_cap = 6;
  double epsilon = -1.0;   // negative: per-module defaults
  double h_exponent = 0.25;
  double tau = 0.0;        // truncation level for moment bounds; 0 = derive
  int bins = 200;
  double y = 0.05;         // imaginary height for density scans
  GridSpec grid;
  int p_max = 5;
  std::string out_dir = "out";
  int threads = 1;
  std::vector<int> dg_sizes = {1000, 10000};
  double dg_h = 0.5;
  long dg_reps_per_n = 200;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

inline const std::vector<std::string>& mode_names() {
  static const std::vector<std::string> names = {"esd",     "rde",     "pwist",   "moments",
                                                 "compare", "wishart", "validate"};
  return names;
}

// Runs one mode, writing artifacts plus manifest.json into config.out_dir.
// On failure every partially written file is removed before the exception
// propagates. Returns the artifact file names (manifest last).
std::vector<std::string> run_mode(const std::string& mode, const ExperimentConfig& config);

// Overlay plot of 1-4 CSV artifacts.
void run_plot(const std::vector<std::filesystem::path>& inputs,
              const std::filesystem::path& out_path, const std::string& title);

// Command-line entry point. Never calls exit(); returns 0 on success, 2 on
// configuration/usage errors, 3 on numeric failure.
int run_main(int argc, const char* const* argv);

}  // namespace levyspec::cli
