#include "levyspec/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "levyspec/ensemble.hpp"
#include "levyspec/errors.hpp"
#include "levyspec/parallel.hpp"
#include "levyspec/rng.hpp"
#include "levyspec/spectral.hpp"
#include "levyspec/stats.hpp"

namespace levyspec {

namespace {

std::uint64_t checked_u64(unsigned __int128 v, const char* what) {
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw NumericError(std::string(what) + ": value exceeds 64-bit range");
  }
  return std::uint64_t(v);
}

// binomial(n, k) in 128-bit intermediates.
unsigned __int128 binomial128(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (unsigned __int128)(n - k + i) / (unsigned __int128)i;
  }
  return r;
}

}  // namespace

std::uint64_t catalan(int p) {
  if (p < 0) throw ConfigError("catalan: p must be >= 0");
  const unsigned __int128 c = binomial128(2 * p, p) / (unsigned __int128)(p + 1);
  return checked_u64(c, "catalan");
}

std::uint64_t stirling2_even(int p, int l) {
  if (p < 1 || l < 1 || l > 2 * p) throw ConfigError("stirling2_even: need 1 <= l <= 2p");
  // Alternating sum; the partial sums fit in signed 128-bit for the desk
  // range (2p <= 24 or so), which the capacity check below enforces.
  if (2 * p > 24) throw NumericError("stirling2_even: capacity exceeded");
  __int128 total = 0;
  for (int k = 0; k <= l; ++k) {
    __int128 term = (__int128)binomial128(l, k);
    for (int e = 0; e < 2 * p; ++e) term *= k;
    total += ((l - k) % 2 == 0) ? term : -term;
  }
  unsigned __int128 fact = 1;
  for (int i = 2; i <= l; ++i) fact *= (unsigned)i;
  if (total < 0 || (unsigned __int128)total % fact != 0) {
    throw NumericError("stirling2_even: internal inconsistency");
  }
  return checked_u64((unsigned __int128)total / fact, "stirling2_even");
}

std::vector<std::vector<int>> enumerate_Qp(int p) {
  if (p < 1) throw ConfigError("enumerate_Qp: p must be >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // Depth-first with nonincreasing parts; first emitted is (p), last (1,..,1).
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      cur.push_back(part);
      self(self, remaining - part, part);
      cur.pop_back();
    }
  };
  rec(rec, p, p);
  return out;
}

namespace {

struct PlaneTree {
  std::vector<int> parent;  // size p+1; parent[0] = -1
  std::vector<int> depth;   // depth[0] = 0
};

// All ordered rooted trees with p edges via balanced bracket sequences;
// vertices are numbered 0 (root), then 1..p in discovery order.
void enumerate_plane_trees(int p, std::vector<PlaneTree>& out) {
  std::vector<int> steps;  // +1 = down to a new child, -1 = up
  auto rec = [&](auto&& self, int open, int used) -> void {
    if (used == 2 * p) {
      PlaneTree t;
      t.parent.assign(std::size_t(p) + 1, -1);
      t.depth.assign(std::size_t(p) + 1, 0);
      int current = 0, next_vertex = 1;
      for (int s : steps) {
        if (s > 0) {
          t.parent[std::size_t(next_vertex)] = current;
          t.depth[std::size_t(next_vertex)] = t.depth[std::size_t(current)] + 1;
          current = next_vertex++;
        } else {
          current = t.parent[std::size_t(current)];
        }
      }
      out.push_back(std::move(t));
      return;
    }
    if (open < p && (2 * p - used) > open) {
      steps.push_back(1);
      self(self, open + 1, used + 1);
      steps.pop_back();
    }
    if (open > 0) {
      steps.push_back(-1);
      self(self, open - 1, used + 1);
      steps.pop_back();
    }
  };
  rec(rec, 0, 0);
}

std::map<std::vector<int>, std::uint64_t> build_table(int p) {
  std::vector<PlaneTree> trees;
  enumerate_plane_trees(p, trees);

  std::map<std::vector<int>, std::uint64_t> table;
  for (const auto& q : enumerate_Qp(p)) table[q] = 0;

  // Set partitions of {1..p} by restricted growth strings.
  std::vector<int> block(std::size_t(p), 0);
  std::vector<int> sizes;
  auto visit = [&](int blocks) {
    sizes.assign(std::size_t(blocks), 0);
    for (int v = 0; v < p; ++v) ++sizes[std::size_t(block[std::size_t(v)])];
    std::vector<int> key(sizes.begin(), sizes.end());
    std::sort(key.begin(), key.end(), std::greater<int>());
    auto slot = table.find(key);
    for (const auto& t : trees) {
      bool ok = true;
      // Depth homogeneity and a common parent block per block.
      for (int b = 0; b < blocks && ok; ++b) {
        int want_depth = -1, want_parent_block = -2;
        for (int v = 0; v < p; ++v) {
          if (block[std::size_t(v)] != b) continue;
          const int vertex = v + 1;
          const int d = t.depth[std::size_t(vertex)];
          const int par = t.parent[std::size_t(vertex)];
          const int pb = par == 0 ? -1 : block[std::size_t(par - 1)];
          if (want_depth < 0) {
            want_depth = d;
            want_parent_block = pb;
          } else if (d != want_depth || pb != want_parent_block) {
            ok = false;
            break;
          }
        }
      }
      if (ok) ++slot->second;
    }
  };
  auto rec = [&](auto&& self, int v, int max_used) -> void {
    if (v == p) {
      visit(max_used);
      return;
    }
    for (int b = 0; b <= max_used && b < p; ++b) {
      block[std::size_t(v)] = b;
      self(self, v + 1, std::max(max_used, b + 1));
    }
  };
  rec(rec, 0, 0);
  return table;
}

std::map<std::vector<int>, std::uint64_t>& cached_table(int p) {
  static std::mutex mutex;
  static std::map<int, std::map<std::vector<int>, std::uint64_t>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, build_table(p)).first;
  return it->second;
}

}  // namespace

std::map<std::vector<int>, std::uint64_t> colored_tree_table(int p) {
  if (p < 1) throw ConfigError("colored_tree_table: p must be >= 1");
  if (p > kColoredTreeCapacity) {
    throw NumericError("colored_tree_table: enumeration capacity exceeded (p <= 8)");
  }
  return cached_table(p);
}

std::uint64_t count_colored_trees(const std::vector<int>& q) {
  if (q.empty()) throw ConfigError("count_colored_trees: empty partition");
  int p = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 1) throw ConfigError("count_colored_trees: parts must be positive");
    if (i > 0 && q[i] > q[i - 1]) {
      throw ConfigError("count_colored_trees: parts must be nonincreasing");
    }
    p += q[i];
  }
  const auto& table = colored_tree_table(p);
  return table.at(q);
}

double lsd_moment(const LevyCharacteristics& chars, int p) {
  chars.validate();
  if (p < 0) throw ConfigError("lsd_moment: p must be >= 0");
  if (p == 0) return 1.0;
  const double m2 = measure_moment(chars.levy, 2);
  const auto& table = colored_tree_table(p);
  double total = 0.0;
  for (const auto& [q, count] : table) {
    if (count == 0) continue;
    double term = double(count);
    bool zero = false;
    for (int qi : q) {
      const double w = qi == 1 ? chars.sigma2 + m2 : measure_moment(chars.levy, 2 * qi);
      if (w == 0.0) {
        zero = true;
        break;
      }
      term *= w;  // +inf propagates through nonzero factors
    }
    if (zero) continue;
    total += term;
    if (std::isinf(total)) return total;
  }
  return total;
}

double moment_bound(double tau, const LevyCharacteristics& chars, int p) {
  chars.validate();
  if (!(tau > 0.0)) throw ConfigError("moment_bound: tau must be > 0");
  if (p < 1) throw ConfigError("moment_bound: p must be >= 1");
  const double k = chars.sigma2 + measure_moment(chars.levy, 2) + chars.levy.mass_above(1.0);
  if (std::isinf(k)) return k;
  const double cp = double(catalan(p));
  double total = 0.0;
  for (int l = 1; l <= p; ++l) {
    total += cp * double(stirling2_even(p, l)) * std::pow(k, l);
  }
  return std::pow(tau, 2 * p) * total;
}

bool MomentVector::hankel_psd(double tol) const {
  const int m = p_max();
  if (m < 0) throw ConfigError("MomentVector: empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("MomentVector: non-finite moment");
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const int order = i + j;
      h(i, j) = order % 2 == 0 ? values[std::size_t(order / 2)] : 0.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("MomentVector: eigensolver failed");
  const double top = std::max(1.0, solver.eigenvalues().maxCoeff());
  return solver.eigenvalues().minCoeff() >= -tol * top;
}

MomentVector lsd_moment_vector(const LevyCharacteristics& chars, int p_max) {
  if (p_max < 0) throw ConfigError("lsd_moment_vector: p_max must be >= 0");
  MomentVector mv;
  mv.values.reserve(std::size_t(p_max) + 1);
  for (int p = 0; p <= p_max; ++p) mv.values.push_back(lsd_moment(chars, p));
  return mv;
}

double trace_moment(const Eigen::MatrixXd& m, int p) {
  if (p < 0) throw ConfigError("trace_moment: p must be >= 0");
  const int n = int(m.rows());
  if (n == 0 || m.cols() != n) throw ConfigError("trace_moment: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("trace_moment: eigensolver failed");
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += std::pow(solver.eigenvalues()(i), p);
  return total / double(n);
}

TraceMomentEstimate trace_moment_mc(const LevyCharacteristics& chars, int n, int p, int reps,
                                    std::uint64_t seed) {
  if (reps < 1) throw ConfigError("trace_moment_mc: reps must be >= 1");
  const EntryLaw law = build_entry_law(chars, n, default_epsilon(chars, n));
  std::vector<double> values(static_cast<std::size_t>(reps));
  parallel::for_each_index(std::size_t(reps), [&](std::size_t r) {
    const std::uint64_t rep_seed =
        rng::derive_key(rng::derive_key(seed, rng::kTagTraceRep), std::uint64_t(r));
    values[r] = trace_moment(sample_matrix(law, rep_seed).entries, p);
  });
  const auto ms = stats::mean_stderr(values);
  TraceMomentEstimate est;
  est.estimate = ms.mean;
  est.se = ms.se;
  est.reps = reps;
  return est;
}

}  // namespace levyspec
