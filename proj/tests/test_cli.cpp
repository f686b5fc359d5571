#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "levyspec/cli.hpp"
#include "levyspec/errors.hpp"
#include "levyspec/io.hpp"
#include "levyspec/parallel.hpp"
#include "levyspec/rng.hpp"

namespace {

using namespace levyspec;
namespace fs = std::filesystem;

// run_main prints to the standard streams; keep test logs quiet and capture
// the text for assertions.
class StreamCapture {
 public:
  StreamCapture() : old_out_(std::cout.rdbuf(out_.rdbuf())), old_err_(std::cerr.rdbuf(err_.rdbuf())) {}
  ~StreamCapture() {
    std::cout.rdbuf(old_out_);
    std::cerr.rdbuf(old_err_);
  }
  std::string out() const { return out_.str(); }
  std::string err() const { return err_.str(); }

 private:
  std::ostringstream out_, err_;
  std::streambuf* old_out_;
  std::streambuf* old_err_;
};

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("levyspec");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run_main(int(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("levyspec_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_config(const std::string& name, const nlohmann::json& j) {
  const fs::path path = fs::temp_directory_path() / ("levyspec_cfg_" + name + ".json");
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path;
}

std::size_t file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    (void)entry;
    ++n;
  }
  return n;
}

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing enforces the schema") {
  using nlohmann::json;
  const auto minimal = cli::ExperimentConfig::from_json({{"preset", "wigner"}, {"seed", 1}});
  CHECK(minimal.seed_set);
  CHECK(minimal.seed == 1);
  CHECK(minimal.n == 500);
  CHECK(minimal.reps == 10);
  CHECK(minimal.out_dir == "out");
  CHECK(minimal.chars.sigma2 == 1.0);
  CHECK(minimal.chars.levy.trivial());

  const auto custom = cli::ExperimentConfig::from_json(
      {{"characteristics", {{"sigma2", 2.0}}},
       {"seed", 9},
       {"n", 64},
       {"grid", {{"lo", -2.0}, {"hi", 2.0}, {"points", 5}}},
       {"threads", 2}});
  CHECK(custom.chars.sigma2 == 2.0);
  CHECK(custom.n == 64);
  CHECK(custom.grid.lo == -2.0);
  CHECK(custom.grid.points == 5);
  CHECK(custom.threads == 2);

  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(json::object()), ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json({{"seed", 1}}), ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"characteristics", {{"sigma2", 1.0}}}, {"seed", 1}}),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)cli::ExperimentConfig::from_json({{"preset", "wigner"}, {"seed", 1}, {"bogus", 1}}),
      ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json({{"preset", 5}, {"seed", 1}}),
                  ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json({{"preset", "wigner"}, {"seed", -3}}),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)cli::ExperimentConfig::from_json({{"preset", "wigner"}, {"seed", 1}, {"n", 1}}),
      ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"n", "many"}}),
                  ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"h_exponent", 0.5}}),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)cli::ExperimentConfig::from_json({{"preset", "wigner"}, {"seed", 1}, {"y", 0.0}}),
      ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"grid", {{"step", 0.1}}}}),
                  ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"grid", {{"lo", 2.0}, {"hi", -2.0}}}}),
                  ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"dg_sizes", json::array()}}),
                  ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"dg_sizes", {1}}}),
                  ConfigError);
  CHECK_THROWS_AS((void)cli::ExperimentConfig::from_json(
                      {{"preset", "wigner"}, {"seed", 1}, {"out_dir", ""}}),
                  ConfigError);
}

TEST_CASE("runs demand an explicit seed") {
  auto config = cli::ExperimentConfig::from_json({{"preset", "wigner"}});
  CHECK_FALSE(config.seed_set);
  config.n = 20;
  config.reps = 1;
  config.out_dir = fresh_dir("noseed").string();
  try {
    (void)cli::run_mode("esd", config);
    FAIL("run_mode accepted a seedless config");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("esd runs write deterministic hashed artifacts") {
  const nlohmann::json j = {{"preset", "sparse(5)"}, {"seed", 11}, {"n", 60},
                            {"reps", 3},            {"bins", 40}};
  auto config = cli::ExperimentConfig::from_json(j);
  const fs::path dir1 = fresh_dir("esd1");
  config.out_dir = dir1.string();

  StreamCapture capture;
  const auto files = cli::run_mode("esd", config);
  REQUIRE(files == std::vector<std::string>{"esd.csv", "manifest.json"});
  REQUIRE(fs::exists(dir1 / "esd.csv"));
  REQUIRE(fs::exists(dir1 / "manifest.json"));

  const std::string esd_text = io::read_text_file(dir1 / "esd.csv");
  CHECK(esd_text.rfind("bin_left,bin_right,mass", 0) == 0);

  const auto manifest = nlohmann::json::parse(io::read_text_file(dir1 / "manifest.json"));
  CHECK(manifest.at("mode") == "esd");
  CHECK(manifest.at("config") == j);
  CHECK(manifest.at("stage_seeds").at("matrix").get<std::uint64_t>() ==
        rng::derive_key(11, io::fnv1a64("matrix")));
  CHECK(manifest.at("files").at("esd.csv").get<std::string>() ==
        "fnv1a64:" + io::hash_hex(io::fnv1a64(esd_text)));

  // Same seed, fresh directory, more threads: byte-identical science output.
  auto config2 = config;
  const fs::path dir2 = fresh_dir("esd2");
  config2.out_dir = dir2.string();
  config2.threads = 3;
  (void)cli::run_mode("esd", config2);
  parallel::set_thread_count(1);
  CHECK(io::read_text_file(dir2 / "esd.csv") == esd_text);

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("mode driver rejects unknown modes and cleans the output directory") {
  auto config = cli::ExperimentConfig::from_json({{"preset", "wigner"}, {"seed", 2}});
  const fs::path dir = fresh_dir("badmode");
  config.out_dir = dir.string();
  CHECK_THROWS_AS((void)cli::run_mode("eigen-party", config), ConfigError);
  CHECK(file_count(dir) == 0);
  fs::remove_all(dir);
}

TEST_CASE("main entry reports usage and config problems with exit code two") {
  StreamCapture capture;
  CHECK(run({"--help"}) == 0);
  CHECK(run({}) == 2);
  CHECK(run({"eigen-party", "--config", "x.json"}) == 2);
  CHECK(run({"esd", "--config", "/nonexistent/levyspec.json"}) == 2);

  const fs::path bad = fs::temp_directory_path() / "levyspec_cfg_notjson.json";
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  CHECK(run({"esd", "--config", bad.string()}) == 2);

  const fs::path unknown_key =
      write_config("unknown_key", {{"preset", "wigner"}, {"seed", 1}, {"banana", 2}});
  CHECK(run({"esd", "--config", unknown_key.string()}) == 2);

  const fs::path seedless = write_config("seedless", {{"preset", "wigner"}, {"n", 20}});
  const fs::path out_dir = fresh_dir("seedless_out");
  CHECK(run({"esd", "--config", seedless.string(), "--out", out_dir.string()}) == 2);
  CHECK(file_count(out_dir) == 0);
  fs::remove(bad);
  fs::remove(unknown_key);
  fs::remove(seedless);
  fs::remove_all(out_dir);
}

TEST_CASE("seed and output overrides make a seedless file runnable") {
  const fs::path config =
      write_config("override", {{"preset", "wigner"}, {"n", 24}, {"reps", 2}, {"bins", 16}});
  const fs::path dir = fresh_dir("override_out");
  StreamCapture capture;
  const int code =
      run({"esd", "--config", config.string(), "--seed", "7", "--out", dir.string()});
  CHECK(code == 0);
  CHECK(fs::exists(dir / "esd.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(capture.out().find("kolmogorov_to_semicircle") != std::string::npos);
  CHECK(capture.out().find("wrote") != std::string::npos);

  // The override seed lands in the manifest stage seeds.
  const auto manifest = nlohmann::json::parse(io::read_text_file(dir / "manifest.json"));
  CHECK(manifest.at("stage_seeds").at("matrix").get<std::uint64_t>() ==
        rng::derive_key(7, io::fnv1a64("matrix")));
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("rde mode exports a density scan and a population snapshot") {
  const fs::path config = write_config(
      "rde", {{"preset", "wigner"},
              {"seed", 5},
              {"pop_size", 64},
              {"sweeps", 80},
              {"y", 0.2},
              {"grid", {{"lo", -3.0}, {"hi", 3.0}, {"points", 5}}}});
  const fs::path dir = fresh_dir("rde_out");
  StreamCapture capture;
  CHECK(run({"rde", "--config", config.string(), "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "density.csv"));
  CHECK(fs::exists(dir / "population.json"));
  CHECK(io::read_text_file(dir / "density.csv").rfind("x,density,mc_err", 0) == 0);
  CHECK(capture.out().find("resolvent_mean_at_i") != std::string::npos);
  const auto pop = nlohmann::json::parse(io::read_text_file(dir / "population.json"));
  CHECK(pop.is_object());
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("pwist mode writes the tree alongside the averaged root measure") {
  const fs::path config = write_config(
      "pwist",
      {{"preset", "sparse(4)"}, {"seed", 3}, {"reps", 3}, {"branch_cap", 6}, {"depth_cap", 3}, {"bins", 24}});
  const fs::path dir = fresh_dir("pwist_out");
  StreamCapture capture;
  CHECK(run({"pwist", "--config", config.string(), "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "pwist_measure.csv"));
  CHECK(fs::exists(dir / "tree.jsonl"));
  CHECK(capture.out().find("tree_nodes") != std::string::npos);
  std::ifstream tree(dir / "tree.jsonl");
  std::string line;
  REQUIRE(std::getline(tree, line));
  const auto record = nlohmann::json::parse(line);
  CHECK(record.contains("parent_word"));
  CHECK(record.contains("child_word"));
  CHECK(record.contains("conductance"));
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("moments mode tabulates exact versus sampled trace moments") {
  const fs::path config = write_config(
      "moments", {{"preset", "sparse(5)"}, {"seed", 13}, {"n", 60}, {"reps", 5}, {"p_max", 2}});
  const fs::path dir = fresh_dir("moments_out");
  StreamCapture capture;
  CHECK(run({"moments", "--config", config.string(), "--out", dir.string()}) == 0);
  const std::string csv = io::read_text_file(dir / "moments.csv");
  CHECK(csv.rfind("order,exact,mc_estimate,mc_stderr,bound", 0) == 0);
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);  // header
  REQUIRE(std::getline(rows, line));
  CHECK(line.rfind("2,5,", 0) == 0);  // first limiting moment of sparse(5) is exactly 5
  REQUIRE(std::getline(rows, line));
  CHECK(line.rfind("4,55,", 0) == 0);
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("compare mode emits every cross-validation artifact") {
  const fs::path config = write_config(
      "compare", {{"preset", "wigner"},
                  {"seed", 21},
                  {"n", 40},
                  {"reps", 2},
                  {"pop_size", 64},
                  {"sweeps", 60},
                  {"depth_cap", 6},
                  {"bins", 24},
                  {"y", 0.2},
                  {"grid", {{"lo", -3.0}, {"hi", 3.0}, {"points", 7}}}});
  const fs::path dir = fresh_dir("compare_out");
  StreamCapture capture;
  CHECK(run({"compare", "--config", config.string(), "--out", dir.string()}) == 0);
  for (const char* name : {"esd.csv", "pwist_measure.csv", "density.csv", "cross_kolmogorov.csv",
                           "cross_moments.csv", "compare.svg", "manifest.json"}) {
    CHECK(fs::exists(dir / name));
  }
  const std::string cross = io::read_text_file(dir / "cross_moments.csv");
  CHECK(cross.rfind("source,order,value,exact,rel_gap", 0) == 0);
  std::size_t rows = std::count(cross.begin(), cross.end(), '\n');
  CHECK(rows == 7);  // header + two orders for each of three sources
  CHECK(io::read_text_file(dir / "compare.svg").find("<svg") != std::string::npos);
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("wishart mode cross-checks the embedding before exporting") {
  const fs::path config =
      write_config("wishart", {{"preset", "wigner"}, {"seed", 9}, {"n", 30}, {"bins", 20}});
  const fs::path dir = fresh_dir("wishart_out");
  StreamCapture capture;
  CHECK(run({"wishart", "--config", config.string(), "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "sv_measure.csv"));
  CHECK(fs::exists(dir / "wishart_squared.csv"));
  CHECK(capture.out().find("svd_agreement ok") != std::string::npos);
  CHECK(capture.out().find("kolmogorov_to_squared_semicircle") != std::string::npos);
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("validate mode reports scaling checks as a structured table") {
  const fs::path config = write_config(
      "validate",
      {{"preset", "wigner"}, {"seed", 2}, {"dg_sizes", {50}}, {"dg_h", 1.0}, {"dg_reps_per_n", 8000}});
  const fs::path dir = fresh_dir("validate_out");
  StreamCapture capture;
  CHECK(run({"validate", "--config", config.string(), "--out", dir.string()}) == 0);
  const auto report = nlohmann::json::parse(io::read_text_file(dir / "dg_report.json"));
  CHECK(report.at("all_pass").get<bool>());
  CHECK_FALSE(report.at("any_inconclusive").get<bool>());
  CHECK(report.at("rows").size() == 5);  // three tail thresholds, one variance, one drift
  CHECK(capture.out().find("dg_all_pass true") != std::string::npos);
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("numeric failures exit with code three and leave no artifacts") {
  // Unbounded arrival intensity with a deep wide tree: the growth budget
  // trips before anything is written.
  const fs::path config = write_config("explode", {{"preset", "stable(0.5)"},
                                                   {"seed", 1},
                                                   {"reps", 1},
                                                   {"branch_cap", 10000},
                                                   {"depth_cap", 4},
                                                   {"epsilon", 1e-6}});
  const fs::path dir = fresh_dir("explode_out");
  StreamCapture capture;
  CHECK(run({"pwist", "--config", config.string(), "--out", dir.string()}) == 3);
  CHECK(capture.err().find("numeric error") != std::string::npos);
  CHECK(file_count(dir) == 0);
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_CASE("plot overlays artifact files into a vector image") {
  const fs::path config = write_config(
      "plotsrc", {{"preset", "wigner"}, {"seed", 4}, {"n", 30}, {"reps", 2}, {"bins", 16}});
  const fs::path dir = fresh_dir("plot_out");
  StreamCapture capture;
  REQUIRE(run({"esd", "--config", config.string(), "--out", dir.string()}) == 0);
  const fs::path svg1 = dir / "overlay1.svg";
  const fs::path svg2 = dir / "overlay2.svg";
  CHECK(run({"plot", (dir / "esd.csv").string(), "--out", svg1.string(), "--title", "t"}) == 0);
  REQUIRE(fs::exists(svg1));
  CHECK(io::read_text_file(svg1).find("<svg") != std::string::npos);
  CHECK(run({"plot", (dir / "esd.csv").string(), "--out", svg2.string(), "--title", "t"}) == 0);
  CHECK(io::read_text_file(svg1) == io::read_text_file(svg2));
  CHECK(run({"plot", (dir / "missing.csv").string(), "--out", svg1.string()}) == 2);
  fs::remove(config);
  fs::remove_all(dir);
}

TEST_SUITE_END();

}  // namespace
