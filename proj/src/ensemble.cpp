#include "levyspec/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "levyspec/errors.hpp"
#include "levyspec/parallel.hpp"

namespace levyspec {

namespace {

constexpr char kMagic[4] = {'L', 'K', 'M', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

double EntryLaw::sample(rng::Stream& stream) const {
  double value = 0.0;
  if (sigma2_eff > 0.0) {
    value += std::sqrt(sigma2_eff) * stream.normal();
  }
  if (jump_rate > 0.0 && stream.bernoulli(jump_rate)) {
    value += jump_source.sample_above(epsilon, stream);
  }
  return value;
}

EntryLaw build_entry_law(const LevyCharacteristics& chars, int n, double epsilon) {
  chars.validate();
  if (n < 1) throw ConfigError("build_entry_law: n must be >= 1");
  if (!(epsilon >= 0.0)) throw ConfigError("build_entry_law: epsilon must be >= 0");
  EntryLaw law;
  law.n = n;
  law.epsilon = epsilon;
  law.jump_mass = chars.levy.mass_above(epsilon);
  if (!std::isfinite(law.jump_mass)) {
    throw ConfigError("build_entry_law: restricted mass is infinite; use epsilon > 0");
  }
  law.jump_rate = law.jump_mass / double(n);
  if (law.jump_rate > 1.0) {
    throw ConfigError(
        "build_entry_law: jump probability above one; increase n or the epsilon cutoff");
  }
  law.sigma2_eff = gaussian_compensation(chars, epsilon) / double(n);
  law.jump_source = chars.levy;
  return law;
}

double default_epsilon(const LevyCharacteristics& chars, int n) {
  if (chars.levy.trivial()) return 0.0;
  return epsilon_for_mass(chars.levy, double(n) / 10.0);
}

void SymmetricMatrixSample::check_invariants() const {
  const int size = n();
  if (entries.cols() != size) throw NumericError("matrix sample: not square");
  for (int i = 0; i < size; ++i) {
    if (entries(i, i) != 0.0) throw NumericError("matrix sample: nonzero diagonal");
    for (int j = i + 1; j < size; ++j) {
      if (entries(i, j) != entries(j, i)) throw NumericError("matrix sample: asymmetric");
      if (!std::isfinite(entries(i, j))) throw NumericError("matrix sample: non-finite entry");
    }
  }
}

SymmetricMatrixSample sample_matrix(const EntryLaw& law, std::uint64_t seed) {
  const int n = law.n;
  SymmetricMatrixSample sample;
  sample.entries = Eigen::MatrixXd::Zero(n, n);
  sample.meta.seed = seed;
  sample.meta.epsilon = law.epsilon;
  auto& m = sample.entries;
  parallel::for_each_index(std::size_t(n), [&](std::size_t i) {
    rng::Stream stream(seed, {rng::kTagMatrixRow, std::uint64_t(i)});
    for (int j = int(i) + 1; j < n; ++j) {
      m(int(i), j) = law.sample(stream);
    }
  });
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  }
  return sample;
}

double choose_hn(int n, double exponent) {
  if (n < 1) throw ConfigError("choose_hn: n must be >= 1");
  if (!(exponent > 0.0 && exponent < 0.5)) {
    throw ConfigError("choose_hn: exponent must lie in (0, 1/2)");
  }
  return std::pow(double(n), -exponent);
}

std::vector<int> replacement_order(const Eigen::MatrixXd& entries) {
  const int n = int(entries.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(std::size_t(n), inf);
  std::vector<char> done(std::size_t(n), 0);
  dist[0] = 0.0;
  // Dense Dijkstra; the graph is complete so the quadratic scan is optimal.
  for (int round = 0; round < n; ++round) {
    int u = -1;
    double best = inf;
    for (int v = 0; v < n; ++v) {
      if (!done[v] && dist[std::size_t(v)] < best) {
        best = dist[std::size_t(v)];
        u = v;
      }
    }
    if (u < 0) break;  // remaining vertices unreachable
    done[std::size_t(u)] = 1;
    for (int v = 0; v < n; ++v) {
      if (done[v] || v == u) continue;
      const double c = entries(u, v);
      if (c == 0.0) continue;
      const double cand = dist[std::size_t(u)] + std::abs(1.0 / c);
      if (cand < dist[std::size_t(v)]) dist[std::size_t(v)] = cand;
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[std::size_t(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = dist[std::size_t(a)], db = dist[std::size_t(b)];
    if (da != db) return da < db;
    return a < b;
  });
  return order;
}

SymmetricMatrixSample replace_procedure(const SymmetricMatrixSample& input, double h_n,
                                        double sigma, std::uint64_t seed) {
  if (!(h_n > 0.0)) throw ConfigError("replace_procedure: h_n must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("replace_procedure: sigma must be >= 0");
  const int n = input.n();
  const Eigen::MatrixXd& in = input.entries;
  SymmetricMatrixSample out;
  out.entries = Eigen::MatrixXd::Zero(n, n);
  out.meta = input.meta;
  out.meta.h_n = h_n;
  out.meta.sigma = sigma;
  Eigen::MatrixXd& m = out.entries;

  // Above-threshold entries keep their modulus with fresh symmetric signs.
  std::vector<char> blank(std::size_t(n) * std::size_t(n), 0);
  rng::Stream signs(seed, {rng::kTagReplaceSign});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = in(i, j);
      if (std::abs(v) > h_n) {
        const double w = signs.rademacher() * std::abs(v);
        m(i, j) = w;
        m(j, i) = w;
      } else {
        blank[std::size_t(i) * std::size_t(n) + std::size_t(j)] = 1;
      }
    }
  }

  const std::vector<int> order = replacement_order(in);
  auto blank_at = [&](int a, int b) -> char& {
    if (a > b) std::swap(a, b);
    return blank[std::size_t(a) * std::size_t(n) + std::size_t(b)];
  };

  std::vector<int> candidates;
  candidates.reserve(std::size_t(n));
  for (int j : order) {
    candidates.clear();
    for (int k = 0; k < n; ++k) {
      if (k != j && std::abs(in(j, k)) <= h_n) candidates.push_back(k);
    }
    if (candidates.empty()) continue;
    rng::Stream choice(seed, {rng::kTagReplaceChoice, std::uint64_t(j)});
    const int pick = candidates[choice.below(candidates.size())];
    for (int k : candidates) {
      char& b = blank_at(j, k);
      if (!b) continue;
      const double v = (k == pick) ? sigma : 0.0;
      m(j, k) = v;
      m(k, j) = v;
      b = 0;
    }
  }
  return out;
}

SymmetricMatrixSample truncate_matrix(const SymmetricMatrixSample& input, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("truncate_matrix: tau must be >= 0");
  SymmetricMatrixSample out = input;
  out.meta.tau = tau;
  const int n = input.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(out.entries(i, j)) > tau) out.entries(i, j) = 0.0;
    }
  }
  return out;
}

double rank_defect_fraction(const SymmetricMatrixSample& input, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("rank_defect_fraction: tau must be >= 0");
  const int n = input.n();
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(n, n);
  bool any = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = input.entries(i, j);
      if (std::abs(v) > tau) {
        diff(i, j) = v;
        any = true;
      }
    }
  }
  if (!any) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(diff, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("rank_defect_fraction: eigensolver failed");
  }
  const auto& ev = solver.eigenvalues();
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  const double tol = double(n) * std::numeric_limits<double>::epsilon() * scale;
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i)) > tol) ++rank;
  }
  return double(rank) / double(n);
}

SymmetricMatrixSample hermitize(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ConfigError("hermitize: input must be square");
  const int n = int(a.rows());
  SymmetricMatrixSample out;
  out.entries = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      out.entries(2 * j, 2 * k + 1) = a(j, k);
      out.entries(2 * k + 1, 2 * j) = a(j, k);
    }
  }
  return out;
}

namespace {

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace

void write_matrix(const std::string& path, const SymmetricMatrixSample& sample) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_matrix: cannot open " + path);
  out.write(kMagic, 4);
  write_raw(out, kFormatVersion);
  const std::uint64_t n = std::uint64_t(sample.n());
  write_raw(out, n);
  std::uint32_t flags = 0;
  if (!std::isnan(sample.meta.h_n)) flags |= 1u;
  if (!std::isnan(sample.meta.tau)) flags |= 2u;
  write_raw(out, flags);
  write_raw(out, sample.meta.seed);
  write_raw(out, sample.meta.epsilon);
  write_raw(out, sample.meta.h_n);
  write_raw(out, sample.meta.tau);
  write_raw(out, sample.meta.sigma);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j <= i; ++j) {
      write_raw(out, sample.entries(int(i), int(j)));
    }
  }
  if (!out) throw ConfigError("write_matrix: write failed for " + path);
}

SymmetricMatrixSample read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("read_matrix: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("read_matrix: bad magic in " + path);
  }
  std::uint32_t version = 0;
  read_raw(in, version);
  if (version != kFormatVersion) throw ConfigError("read_matrix: unsupported version");
  std::uint64_t n = 0;
  read_raw(in, n);
  if (n == 0 || n > (1u << 20)) throw ConfigError("read_matrix: implausible size");
  std::uint32_t flags = 0;
  read_raw(in, flags);
  SymmetricMatrixSample sample;
  read_raw(in, sample.meta.seed);
  read_raw(in, sample.meta.epsilon);
  read_raw(in, sample.meta.h_n);
  read_raw(in, sample.meta.tau);
  read_raw(in, sample.meta.sigma);
  sample.entries = Eigen::MatrixXd::Zero(int(n), int(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j <= i; ++j) {
      double v = 0;
      read_raw(in, v);
      sample.entries(int(i), int(j)) = v;
      sample.entries(int(j), int(i)) = v;
    }
  }
  if (!in) throw ConfigError("read_matrix: truncated file " + path);
  return sample;
}

namespace {

nlohmann::json meta_to_json(const MatrixMeta& meta) {
  auto opt = [](double v) {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  return {{"seed", meta.seed}, {"epsilon", opt(meta.epsilon)}, {"h_n", opt(meta.h_n)},
          {"tau", opt(meta.tau)}, {"sigma", opt(meta.sigma)}};
}

void meta_from_json(const nlohmann::json& j, MatrixMeta& meta) {
  auto opt = [&](const char* key) {
    return (!j.contains(key) || j[key].is_null()) ? nan_value() : j[key].get<double>();
  };
  meta.seed = j.value("seed", std::uint64_t(0));
  meta.epsilon = opt("epsilon");
  meta.h_n = opt("h_n");
  meta.tau = opt("tau");
  meta.sigma = opt("sigma");
}

}  // namespace

void write_matrix_jsonl(std::ostream& out, const SymmetricMatrixSample& sample) {
  nlohmann::json header = meta_to_json(sample.meta);
  header["n"] = sample.n();
  out << header.dump() << "\n";
  for (int i = 0; i < sample.n(); ++i) {
    nlohmann::json row;
    row["row"] = i;
    auto values = nlohmann::json::array();
    for (int j = 0; j < sample.n(); ++j) values.push_back(sample.entries(i, j));
    row["values"] = std::move(values);
    out << row.dump() << "\n";
  }
}

SymmetricMatrixSample read_matrix_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("read_matrix_jsonl: missing header");
  const auto header = nlohmann::json::parse(line);
  const int n = header.at("n").get<int>();
  if (n < 1) throw ConfigError("read_matrix_jsonl: bad size");
  SymmetricMatrixSample sample;
  meta_from_json(header, sample.meta);
  sample.entries = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ConfigError("read_matrix_jsonl: missing row");
    const auto row = nlohmann::json::parse(line);
    const auto& values = row.at("values");
    if (int(values.size()) != n) throw ConfigError("read_matrix_jsonl: row length mismatch");
    for (int j = 0; j < n; ++j) sample.entries(i, j) = values[j].get<double>();
  }
  return sample;
}

}  // namespace levyspec
