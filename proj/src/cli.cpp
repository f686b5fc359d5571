#include "levyspec/cli.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "levyspec/dg.hpp"
#include "levyspec/ensemble.hpp"
#include "levyspec/errors.hpp"
#include "levyspec/io.hpp"
#include "levyspec/moments.hpp"
#include "levyspec/parallel.hpp"
#include "levyspec/pwist.hpp"
#include "levyspec/rde.hpp"
#include "levyspec/spectral.hpp"
#include "levyspec/svg.hpp"
#include "levyspec/version.hpp"
#include "levyspec/wishart.hpp"

namespace levyspec::cli {

namespace {

const char* kSchemaHint =
    "config schema: {\"preset\": \"wigner\" | \"sparse(<c>)\" | \"stable(<alpha>)\" OR "
    "\"characteristics\": {\"sigma2\": <num>, \"atoms\": [{\"x\",\"mass\"}], "
    "\"power_pieces\": [{\"alpha\",\"scale\",\"xmin\",\"xmax\"}]}, \"seed\": <u64>; "
    "optional: n, reps, pop_size, sweeps, branch_cap, depth_cap, epsilon, tau, "
    "h_exponent, bins, y, grid {lo, hi, points}, p_max, out_dir, threads, "
    "dg_sizes, dg_h, dg_reps_per_n}";

long long get_integer(const nlohmann::json& j, const std::string& key, long long fallback,
                      long long lo, long long hi) {
  if (!j.contains(key)) return fallback;
  const auto& v = j[key];
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError("config field \"" + key + "\" must be an integer");
  }
  const long long value = v.get<long long>();
  if (value < lo || value > hi) {
    throw ConfigError("config field \"" + key + "\" out of range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return value;
}

double get_number(const nlohmann::json& j, const std::string& key, double fallback, double lo,
                  double hi) {
  if (!j.contains(key)) return fallback;
  const auto& v = j[key];
  if (!v.is_number()) throw ConfigError("config field \"" + key + "\" must be a number");
  const double value = v.get<double>();
  if (std::isnan(value) || value < lo || value > hi) {
    throw ConfigError("config field \"" + key + "\" out of range");
  }
  return value;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> xs(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    xs[std::size_t(i)] = lo + (hi - lo) * double(i) / double(points - 1);
  }
  return xs;
}

// Tracks written artifacts so a failing run leaves no partial outputs.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, std::string_view text) {
    io::write_text_file(dir_ / name, text);
    names_.push_back(name);
    hashes_[name] = "fnv1a64:" + io::hash_hex(io::fnv1a64(text));
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::map<std::string, std::string>& hashes() const { return hashes_; }
  const std::filesystem::path& dir() const { return dir_; }

  void discard_all() {
    for (const auto& name : names_) {
      std::error_code ec;
      std::filesystem::remove(dir_ / name, ec);
    }
    names_.clear();
    hashes_.clear();
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
  std::map<std::string, std::string> hashes_;
};

struct RunContext {
  const ExperimentConfig& config;
  ArtifactSet& artifacts;
  nlohmann::json stage_seeds = nlohmann::json::object();

  std::uint64_t stage(const std::string& name) {
    const std::uint64_t s = rng::derive_key(config.seed, io::fnv1a64(name));
    stage_seeds[name] = s;
    return s;
  }
};

EntryLaw entry_law_for(const ExperimentConfig& config) {
  const double eps = config.epsilon >= 0.0 ? config.epsilon
                                           : default_epsilon(config.chars, config.n);
  return build_entry_law(config.chars, config.n, eps);
}

SpectralMeasure averaged_esd(const ExperimentConfig& config, std::uint64_t stage_seed) {
  const EntryLaw law = entry_law_for(config);
  std::vector<SpectralMeasure> measures;
  measures.reserve(std::size_t(config.reps));
  for (int r = 0; r < config.reps; ++r) {
    const SymmetricMatrixSample sample =
        sample_matrix(law, rng::derive_key(stage_seed, std::uint64_t(r)));
    measures.push_back(esd(sample));
  }
  return average_measures(measures);
}

SpectralMeasure averaged_root_measure(const ExperimentConfig& config, std::uint64_t stage_seed) {
  const double eps = config.epsilon >= 0.0 ? config.epsilon
                                           : pwist_default_epsilon(config.chars.levy);
  std::vector<SpectralMeasure> measures;
  measures.reserve(std::size_t(config.reps));
  for (int t = 0; t < config.reps; ++t) {
    const FiniteSkeletonTree tree =
        grow_pwist(config.chars, config.branch_cap, config.depth_cap, eps,
                   rng::derive_key(stage_seed, std::uint64_t(t)));
    measures.push_back(root_spectral_measure(tree));
  }
  return average_measures(measures);
}

// Grid density scan folded into a normalised histogram measure; the O(y)
// smoothing bias is inherited, so treat comparisons against it as coarse.
SpectralMeasure density_measure(const std::vector<DensityPoint>& points) {
  if (points.size() < 2) throw ConfigError("density grid too small");
  const double dx = points[1].x - points[0].x;
  std::vector<double> edges, masses;
  edges.push_back(points.front().x - 0.5 * dx);
  double total = 0;
  for (const auto& p : points) {
    edges.push_back(p.x + 0.5 * dx);
    const double mass = std::max(0.0, p.density) * dx;
    masses.push_back(mass);
    total += mass;
  }
  if (!(total > 0)) throw NumericError("density scan carries no mass");
  for (double& m : masses) m /= total;
  return SpectralMeasure::from_histogram(std::move(edges), std::move(masses));
}

io::Curve histogram_outline(const SpectralMeasure& mu, const std::string& label) {
  io::Curve curve;
  curve.label = label;
  const auto& edges = mu.edges();
  const auto& ms = mu.masses();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double density = ms[i] / (edges[i + 1] - edges[i]);
    curve.xs.push_back(edges[i]);
    curve.ys.push_back(density);
    curve.xs.push_back(edges[i + 1]);
    curve.ys.push_back(density);
  }
  return curve;
}

RdeParams rde_params_for(const ExperimentConfig& config, std::uint64_t seed) {
  RdeParams params;
  params.pop_size = config.pop_size;
  params.sweeps = config.sweeps;
  params.epsilon = config.epsilon;
  params.seed = seed;
  return params;
}

void mode_esd(RunContext& ctx) {
  const SpectralMeasure avg = averaged_esd(ctx.config, ctx.stage("matrix"));
  ctx.artifacts.write("esd.csv", io::measure_csv(avg.binned(ctx.config.bins)));
  const auto& chars = ctx.config.chars;
  if (chars.levy.trivial() && chars.sigma2 > 0) {
    const double sigma = std::sqrt(chars.sigma2);
    const double k = kolmogorov_to_cdf(avg, [sigma](double x) { return semicircle_cdf(sigma, x); });
    std::cout << "kolmogorov_to_semicircle " << io::format_double(k) << "\n";
  }
}

void mode_rde(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const RdeParams params = rde_params_for(c, ctx.stage("rde"));
  const std::vector<double> xs = linspace(c.grid.lo, c.grid.hi, c.grid.points);
  const std::vector<DensityPoint> points = rde_density(c.chars, xs, c.y, params);
  ctx.artifacts.write("density.csv", io::density_csv(points));
  const ResolventPopulation pop = solve_rde(c.chars, std::complex<double>(0.0, 1.0), params);
  ctx.artifacts.write("population.json", io::population_json(pop).dump(2) + "\n");
  std::cout << "resolvent_mean_at_i " << io::format_double(pop.mean().real()) << " "
            << io::format_double(pop.mean().imag()) << " converged "
            << (pop.converged ? "true" : "false") << " sweeps " << pop.sweeps_run << "\n";
}

void mode_pwist(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const std::uint64_t s = ctx.stage("tree");
  const SpectralMeasure avg = averaged_root_measure(c, s);
  ctx.artifacts.write("pwist_measure.csv", io::measure_csv(avg.binned(c.bins)));
  const double eps = c.epsilon >= 0.0 ? c.epsilon : pwist_default_epsilon(c.chars.levy);
  const FiniteSkeletonTree first =
      grow_pwist(c.chars, c.branch_cap, c.depth_cap, eps, rng::derive_key(s, 0));
  std::ostringstream tree_text;
  write_tree_jsonl(tree_text, first);
  ctx.artifacts.write("tree.jsonl", tree_text.str());
  std::cout << "tree_nodes " << first.size() << "\n";
}

void mode_moments(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const std::uint64_t s = ctx.stage("trace");
  const double sup = c.chars.levy.support_sup();
  const double tau_bound = c.tau > 0 ? std::max(c.tau, sup) : std::max(1.0, sup);
  std::vector<io::MomentRow> rows;
  for (int p = 1; p <= c.p_max; ++p) {
    io::MomentRow row;
    row.order = 2 * p;
    row.exact = lsd_moment(c.chars, p);
    const TraceMomentEstimate est =
        trace_moment_mc(c.chars, c.n, 2 * p, c.reps, rng::derive_key(s, std::uint64_t(p)));
    row.mc_estimate = est.estimate;
    row.mc_stderr = est.se;
    row.bound = moment_bound(tau_bound, c.chars, p);
    rows.push_back(row);
    std::cout << "moment order " << row.order << " exact " << io::format_double(row.exact)
              << " mc " << io::format_double(row.mc_estimate) << " se "
              << io::format_double(row.mc_stderr) << " bound " << io::format_double(row.bound)
              << "\n";
  }
  ctx.artifacts.write("moments.csv", io::moment_table_csv(rows));
}

void mode_compare(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const SpectralMeasure a = averaged_esd(c, ctx.stage("matrix"));
  const SpectralMeasure b = averaged_root_measure(c, ctx.stage("tree"));
  const RdeParams params = rde_params_for(c, ctx.stage("rde"));
  const std::vector<double> xs = linspace(c.grid.lo, c.grid.hi, c.grid.points);
  const std::vector<DensityPoint> points = rde_density(c.chars, xs, c.y, params);
  const SpectralMeasure d = density_measure(points);

  ctx.artifacts.write("esd.csv", io::measure_csv(a.binned(c.bins)));
  ctx.artifacts.write("pwist_measure.csv", io::measure_csv(b.binned(c.bins)));
  ctx.artifacts.write("density.csv", io::density_csv(points));

  const double k_ab = kolmogorov_distance(a, b);
  const double k_ad = kolmogorov_distance(a, d);
  const double k_bd = kolmogorov_distance(b, d);
  std::string cross = "a,b,kolmogorov\n";
  cross += "esd,pwist," + io::format_double(k_ab) + "\n";
  cross += "esd,rde," + io::format_double(k_ad) + "\n";
  cross += "pwist,rde," + io::format_double(k_bd) + "\n";
  ctx.artifacts.write("cross_kolmogorov.csv", cross);
  std::cout << "kolmogorov esd-pwist " << io::format_double(k_ab) << "\n";
  std::cout << "kolmogorov esd-rde " << io::format_double(k_ad) << "\n";
  std::cout << "kolmogorov pwist-rde " << io::format_double(k_bd) << "\n";

  std::string gaps = "source,order,value,exact,rel_gap\n";
  for (int p = 1; p <= 2; ++p) {
    const double exact = lsd_moment(c.chars, p);
    const int order = 2 * p;
    struct Entry {
      const char* name;
      const SpectralMeasure* mu;
    };
    const Entry entries[3] = {{"esd", &a}, {"pwist", &b}, {"rde", &d}};
    for (const auto& e : entries) {
      const double value = e.mu->moment(order);
      const double gap = std::isinf(exact) ? kInf : std::abs(value - exact) / std::max(std::abs(exact), 1e-12);
      gaps += std::string(e.name) + "," + std::to_string(order) + "," + io::format_double(value) +
              "," + io::format_double(exact) + "," + io::format_double(gap) + "\n";
      std::cout << "moment" << order << " " << e.name << " " << io::format_double(value)
                << " exact " << io::format_double(exact) << "\n";
    }
  }
  ctx.artifacts.write("cross_moments.csv", gaps);

  std::vector<io::Curve> curves;
  curves.push_back(histogram_outline(a.binned(c.bins), "esd"));
  curves.push_back(histogram_outline(b.binned(c.bins), "pwist"));
  io::Curve rde_curve;
  rde_curve.label = "rde";
  for (const auto& p : points) {
    rde_curve.xs.push_back(p.x);
    rde_curve.ys.push_back(p.density);
  }
  curves.push_back(std::move(rde_curve));
  if (c.chars.levy.trivial() && c.chars.sigma2 > 0) {
    const double sigma = std::sqrt(c.chars.sigma2);
    io::Curve sc;
    sc.label = "semicircle";
    for (const double x : linspace(-2 * sigma, 2 * sigma, 201)) {
      sc.xs.push_back(x);
      sc.ys.push_back(semicircle_density(sigma, x));
    }
    curves.push_back(std::move(sc));
  }
  ctx.artifacts.write("compare.svg",
                      svg::render_plot(curves, "spectral density comparison", "x", "density"));
}

void mode_wishart(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const std::uint64_t s = ctx.stage("matrix");
  const EntryLaw law = entry_law_for(c);
  const Eigen::MatrixXd a = sample_nonhermitian(law, rng::derive_key(s, 0));
  const SingularValueMeasure sv = singular_value_esd(a, true);
  std::cout << "svd_agreement ok\n";
  ctx.artifacts.write("sv_measure.csv", io::measure_csv(sv.positive.binned(c.bins)));
  const SpectralMeasure squared = wishart_lsd_map(sv.symmetrized);
  ctx.artifacts.write("wishart_squared.csv", io::measure_csv(squared.binned(c.bins)));
  if (c.chars.levy.trivial() && c.chars.sigma2 > 0) {
    const double sigma = std::sqrt(c.chars.sigma2);
    const auto squared_semicircle_cdf = [sigma](double t) {
      if (t < 0) return 0.0;
      const double r = std::sqrt(t);
      return semicircle_cdf(sigma, r) - semicircle_cdf(sigma, -r);
    };
    const double k = kolmogorov_to_cdf(squared, squared_semicircle_cdf);
    std::cout << "kolmogorov_to_squared_semicircle " << io::format_double(k) << "\n";
  }
}

void mode_validate(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  int max_n = 2;
  for (const int n : c.dg_sizes) max_n = std::max(max_n, n);
  const long reps = c.dg_reps_per_n * long(max_n);
  const DgReport report = dg_check(entry_law_sampler(c.chars), c.dg_sizes, c.chars, c.dg_h, reps,
                                   ctx.stage("dg"));
  nlohmann::json j;
  j["h"] = c.dg_h;
  j["reps"] = reps;
  j["all_pass"] = report.all_pass;
  j["any_inconclusive"] = report.any_inconclusive;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"criterion", row.criterion},
                    {"n", row.n},
                    {"threshold", row.threshold},
                    {"estimate", row.estimate},
                    {"se", row.se},
                    {"target", row.target},
                    {"pass", row.pass},
                    {"inconclusive", row.inconclusive}});
    std::cout << "dg criterion " << row.criterion << " n " << row.n << " threshold "
              << io::format_double(row.threshold) << " estimate "
              << io::format_double(row.estimate) << " target " << io::format_double(row.target)
              << " " << (row.inconclusive ? "inconclusive" : (row.pass ? "pass" : "FAIL")) << "\n";
  }
  j["rows"] = std::move(rows);
  ctx.artifacts.write("dg_report.json", j.dump(2) + "\n");
  std::cout << "dg_all_pass " << (report.all_pass ? "true" : "false") << "\n";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.empty()) {
    throw ConfigError(std::string("empty or non-object config; ") + kSchemaHint);
  }
  static const std::vector<std::string> allowed = {
      "preset",    "characteristics", "n",       "reps",    "seed",       "pop_size",
      "sweeps",    "branch_cap",      "depth_cap", "epsilon", "tau",      "h_exponent",
      "bins",      "y",               "grid",    "p_max",   "out_dir",    "threads",
      "dg_sizes",  "dg_h",            "dg_reps_per_n"};
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown config key \"" + item.key() + "\"; " + kSchemaHint);
    }
  }
  const bool has_preset = j.contains("preset");
  const bool has_chars = j.contains("characteristics");
  if (has_preset == has_chars) {
    throw ConfigError(std::string("exactly one of \"preset\" and \"characteristics\" is "
                                  "required; ") +
                      kSchemaHint);
  }
  ExperimentConfig config;
  config.echo = j;
  if (has_preset) {
    if (!j["preset"].is_string()) throw ConfigError("config field \"preset\" must be a string");
    config.chars = LevyCharacteristics::parse_preset(j["preset"].get<std::string>());
  } else {
    config.chars = LevyCharacteristics::from_json(j["characteristics"]);
  }
  if (j.contains("seed")) {
    const auto& v = j["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("config field \"seed\" must be a nonnegative integer");
    }
    config.seed = v.get<std::uint64_t>();
    config.seed_set = true;
  }
  config.n = int(get_integer(j, "n", config.n, 2, 100000));
  config.reps = int(get_integer(j, "reps", config.reps, 1, 1000000));
  config.pop_size = int(get_integer(j, "pop_size", config.pop_size, 16, 10000000));
  config.sweeps = int(get_integer(j, "sweeps", config.sweeps, 1, 100000));
  config.branch_cap = int(get_integer(j, "branch_cap", config.branch_cap, 1, 10000));
  config.depth_cap = int(get_integer(j, "depth_cap", config.depth_cap, 0, 32));
  config.epsilon = get_number(j, "epsilon", config.epsilon, -1.0, 1e18);
  config.tau = get_number(j, "tau", config.tau, 0.0, 1e18);
  config.h_exponent = get_number(j, "h_exponent", config.h_exponent, 1e-9, 0.5 - 1e-9);
  config.bins = int(get_integer(j, "bins", config.bins, 2, 1000000));
  config.y = get_number(j, "y", config.y, 1e-9, 10.0);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object()) throw ConfigError("config field \"grid\" must be an object");
    for (const auto& item : g.items()) {
      if (item.key() != "lo" && item.key() != "hi" && item.key() != "points") {
        throw ConfigError("unknown grid key \"" + item.key() + "\"");
      }
    }
    config.grid.lo = get_number(g, "lo", config.grid.lo, -1e18, 1e18);
    config.grid.hi = get_number(g, "hi", config.grid.hi, -1e18, 1e18);
    config.grid.points = int(get_integer(g, "points", config.grid.points, 2, 1000000));
    if (!(config.grid.hi > config.grid.lo)) throw ConfigError("grid needs hi > lo");
  }
  config.p_max = int(get_integer(j, "p_max", config.p_max, 1, 8));
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("config field \"out_dir\" must be a string");
    config.out_dir = j["out_dir"].get<std::string>();
    if (config.out_dir.empty()) throw ConfigError("config field \"out_dir\" must be nonempty");
  }
  config.threads = int(get_integer(j, "threads", config.threads, 1, 1024));
  if (j.contains("dg_sizes")) {
    const auto& arr = j["dg_sizes"];
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("config field \"dg_sizes\" must be a nonempty array of integers");
    }
    config.dg_sizes.clear();
    for (const auto& v : arr) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError("config field \"dg_sizes\" must contain integers");
      }
      const long long n = v.get<long long>();
      if (n < 2 || n > 10000000) throw ConfigError("dg_sizes entries must lie in [2, 1e7]");
      config.dg_sizes.push_back(int(n));
    }
  }
  config.dg_h = get_number(j, "dg_h", config.dg_h, 1e-12, 1e18);
  config.dg_reps_per_n = get_integer(j, "dg_reps_per_n", config.dg_reps_per_n, 1, 100000);
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::vector<std::string> run_mode(const std::string& mode, const ExperimentConfig& config) {
  if (!config.seed_set) {
    throw ConfigError("\"seed\" is required (config field or --seed); runs never seed from the "
                      "clock");
  }
  parallel::set_thread_count(config.threads);
  const auto t0 = std::chrono::steady_clock::now();
  ArtifactSet artifacts(config.out_dir);
  RunContext ctx{config, artifacts};
  try {
    if (mode == "esd") {
      mode_esd(ctx);
    } else if (mode == "rde") {
      mode_rde(ctx);
    } else if (mode == "pwist") {
      mode_pwist(ctx);
    } else if (mode == "moments") {
      mode_moments(ctx);
    } else if (mode == "compare") {
      mode_compare(ctx);
    } else if (mode == "wishart") {
      mode_wishart(ctx);
    } else if (mode == "validate") {
      mode_validate(ctx);
    } else {
      throw ConfigError("unknown mode \"" + mode + "\"");
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json manifest;
    manifest["mode"] = mode;
    manifest["version"] = kVersion;
    manifest["wall_time_seconds"] = seconds;
    manifest["config"] = config.echo;
    manifest["stage_seeds"] = ctx.stage_seeds;
    manifest["files"] = nlohmann::json::object();
    for (const auto& [name, hash] : artifacts.hashes()) manifest["files"][name] = hash;
    artifacts.write("manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    artifacts.discard_all();
    throw;
  }
  return artifacts.names();
}

void run_plot(const std::vector<std::filesystem::path>& inputs,
              const std::filesystem::path& out_path, const std::string& title) {
  if (inputs.empty() || inputs.size() > 4) {
    throw ConfigError("plot takes between 1 and 4 CSV files");
  }
  std::vector<io::Curve> curves;
  for (const auto& path : inputs) curves.push_back(io::read_curve_csv(path));
  io::write_text_file(out_path, svg::render_plot(curves, title, "x", "density"));
}

int run_main(int argc, const char* const* argv) {
  try {
    CLI::App app{"Spectral laboratory for Levy-Khintchine matrix ensembles"};
    app.require_subcommand(1);

    struct ModeArgs {
      CLI::App* sub = nullptr;
      std::string config_path;
      std::string out_override;
      std::uint64_t seed_override = 0;
      int threads_override = 0;
      CLI::Option* out_opt = nullptr;
      CLI::Option* seed_opt = nullptr;
      CLI::Option* threads_opt = nullptr;
    };
    static const std::map<std::string, std::string> descriptions = {
        {"esd", "sample matrices and export the averaged eigenvalue histogram"},
        {"rde", "solve the resolvent recursion and export a density scan"},
        {"pwist", "grow skeleton trees and export the root spectral measure"},
        {"moments", "exact limiting moments vs Monte Carlo trace moments"},
        {"compare", "cross-validate matrix, tree, recursion and moment routes"},
        {"wishart", "singular value laws through the doubled symmetric embedding"},
        {"validate", "entry-law scaling checks against the characteristic triple"}};
    std::map<std::string, ModeArgs> margs;
    for (const auto& name : mode_names()) {
      ModeArgs& m = margs[name];
      m.sub = app.add_subcommand(name, descriptions.at(name));
      m.sub->add_option("--config", m.config_path, "experiment config (JSON)")->required();
      m.out_opt = m.sub->add_option("--out", m.out_override, "output directory override");
      m.seed_opt = m.sub->add_option("--seed", m.seed_override, "seed override");
      m.threads_opt = m.sub->add_option("--threads", m.threads_override, "worker thread count");
    }
    CLI::App* plot = app.add_subcommand("plot", "overlay up to 4 CSV artifacts as a vector image");
    std::vector<std::string> plot_files;
    std::string plot_out = "plot.svg";
    std::string plot_title = "spectral overlay";
    plot->add_option("files", plot_files, "CSV files from this tool")->required()->expected(1, 4);
    plot->add_option("--out", plot_out, "output image path");
    plot->add_option("--title", plot_title, "plot title");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (plot->parsed()) {
      std::vector<std::filesystem::path> inputs(plot_files.begin(), plot_files.end());
      run_plot(inputs, plot_out, plot_title);
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }
    for (const auto& name : mode_names()) {
      const ModeArgs& m = margs.at(name);
      if (!m.sub->parsed()) continue;
      ExperimentConfig config = ExperimentConfig::from_file(m.config_path);
      if (m.seed_opt->count() > 0) {
        config.seed = m.seed_override;
        config.seed_set = true;
      }
      if (m.out_opt->count() > 0) config.out_dir = m.out_override;
      if (m.threads_opt->count() > 0) {
        if (m.threads_override < 1 || m.threads_override > 1024) {
          throw ConfigError("--threads must lie in [1, 1024]");
        }
        config.threads = m.threads_override;
      }
      const std::vector<std::string> files = run_mode(name, config);
      for (const auto& f : files) {
        std::cout << "wrote " << (std::filesystem::path(config.out_dir) / f).string() << "\n";
      }
      return 0;
    }
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace levyspec::cli
