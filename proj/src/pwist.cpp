#include "levyspec/pwist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "levyspec/ensemble.hpp"
#include "levyspec/errors.hpp"
#include "levyspec/stats.hpp"

namespace levyspec {

std::string word_label(const TreeWord& word) {
  if (word.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(word[i]);
  }
  return out;
}

void FiniteSkeletonTree::check_invariants() const {
  const int n = size();
  if (int(parent.size()) != n || int(depth.size()) != n || int(edges.size()) != n - 1) {
    throw NumericError("tree: inconsistent array sizes");
  }
  if (!words[0].empty() || parent[0] != -1 || depth[0] != 0) {
    throw NumericError("tree: malformed root");
  }
  for (int v = 1; v < n; ++v) {
    const int p = parent[std::size_t(v)];
    if (p < 0 || p >= v) throw NumericError("tree: bad parent index");
    if (depth[std::size_t(v)] != depth[std::size_t(p)] + 1) {
      throw NumericError("tree: depth mismatch");
    }
    if (depth[std::size_t(v)] > params.depth_cap) throw NumericError("tree: depth cap violated");
    const TreeWord& w = words[std::size_t(v)];
    if (w.size() != words[std::size_t(p)].size() + 1 ||
        !std::equal(words[std::size_t(p)].begin(), words[std::size_t(p)].end(), w.begin())) {
      throw NumericError("tree: word does not extend parent");
    }
    const TreeEdge& e = edges[std::size_t(v) - 1];
    if (e.parent != p || e.child != v) throw NumericError("tree: edge order mismatch");
    const std::uint32_t label = w.back();
    if (label == 0) {
      if (params.sigma <= 0.0 || e.conductance != params.sigma) {
        throw NumericError("tree: label-0 edge must carry exactly sigma");
      }
    } else {
      if (int(label) > params.branch_cap) throw NumericError("tree: branch cap violated");
      if (!(std::abs(e.conductance) > params.epsilon)) {
        throw NumericError("tree: arrival conductance under the floor");
      }
    }
  }
  // Arrival children of each node are sorted by modulus, largest first.
  // Growth appends a node's children contiguously in label order, so the
  // previous sibling of label k >= 2 is the immediately preceding node.
  for (int v = 2; v < n; ++v) {
    const TreeWord& w = words[std::size_t(v)];
    if (w.back() < 2) continue;
    const int sib = v - 1;
    if (parent[std::size_t(sib)] != parent[std::size_t(v)] ||
        words[std::size_t(sib)].back() != w.back() - 1) {
      throw NumericError("tree: sibling blocks not contiguous");
    }
    if (std::abs(edges[std::size_t(sib) - 1].conductance) <
        std::abs(edges[std::size_t(v) - 1].conductance) - 1e-15) {
      throw NumericError("tree: arrivals not sorted by modulus");
    }
  }
}

std::vector<double> sample_ordered_conductances(const LevyMeasure& levy, double epsilon,
                                                int max_count, rng::Stream& stream) {
  if (levy.trivial()) return {};
  const double rate = levy.mass_above(epsilon);
  if (!std::isfinite(rate)) {
    throw ConfigError("sample_ordered_conductances: infinite rate; raise epsilon");
  }
  const long count = stream.poisson(rate);
  std::vector<double> values(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) values[std::size_t(i)] = levy.sample_above(epsilon, stream);
  std::sort(values.begin(), values.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  if (max_count >= 0 && long(values.size()) > long(max_count)) {
    values.resize(std::size_t(max_count));
  }
  return values;
}

std::vector<double> sample_ordered_conductances(const LevyMeasure& levy, double epsilon,
                                                int max_count, std::uint64_t seed) {
  rng::Stream stream(seed, {rng::kTagStage, rng::kTagTreeNode});
  return sample_ordered_conductances(levy, epsilon, max_count, stream);
}

double pwist_default_epsilon(const LevyMeasure& levy) {
  if (levy.trivial()) return 0.0;
  return epsilon_for_mass(levy, 20.0);
}

namespace {

rng::Stream node_stream(std::uint64_t seed, const TreeWord& word) {
  rng::Stream s(seed, {rng::kTagTreeNode});
  for (std::uint32_t d : word) s = s.child(d);
  return s;
}

}  // namespace

FiniteSkeletonTree grow_pwist(const LevyCharacteristics& chars, int branch_cap, int depth_cap,
                              double epsilon, std::uint64_t seed) {
  chars.validate();
  if (branch_cap < 0) throw ConfigError("grow_pwist: branch_cap must be >= 0");
  if (depth_cap < 1) throw ConfigError("grow_pwist: depth_cap must be >= 1");
  const double sigma = std::sqrt(chars.sigma2);
  FiniteSkeletonTree tree;
  tree.params = {sigma, branch_cap, depth_cap, epsilon};
  tree.words.push_back({});
  tree.parent.push_back(-1);
  tree.depth.push_back(0);
  for (int v = 0; v < tree.size(); ++v) {
    if (tree.size() > 4000000) {
      throw NumericError(
          "grow_pwist: tree too large; reduce branch_cap or depth_cap, or raise epsilon");
    }
    if (tree.depth[std::size_t(v)] >= depth_cap) continue;
    const TreeWord word = tree.words[std::size_t(v)];
    rng::Stream stream = node_stream(seed, word);
    const auto arrivals =
        sample_ordered_conductances(chars.levy, epsilon, branch_cap, stream);
    auto add_child = [&](std::uint32_t label, double conductance) {
      TreeWord child = word;
      child.push_back(label);
      tree.words.push_back(std::move(child));
      tree.parent.push_back(v);
      tree.depth.push_back(tree.depth[std::size_t(v)] + 1);
      tree.edges.push_back({v, tree.size() - 1, conductance});
    };
    if (sigma > 0.0) add_child(0, sigma);
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
      add_child(std::uint32_t(k + 1), arrivals[k]);
    }
  }
  return tree;
}

Eigen::SparseMatrix<double> tree_operator(const FiniteSkeletonTree& tree) {
  const int n = tree.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(tree.edges.size() * 2);
  for (const TreeEdge& e : tree.edges) {
    triplets.emplace_back(e.parent, e.child, e.conductance);
    triplets.emplace_back(e.child, e.parent, e.conductance);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

double root_moment(const FiniteSkeletonTree& tree, int p) {
  if (p < 0) throw ConfigError("root_moment: p must be >= 0");
  const auto op = tree_operator(tree);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(tree.size());
  v(0) = 1.0;
  for (int i = 0; i < p; ++i) v = op * v;
  return v(0);
}

SpectralMeasure root_spectral_measure(const FiniteSkeletonTree& tree, int dense_budget,
                                      int lanczos_steps) {
  const int n = tree.size();
  if (n <= dense_budget) {
    return root_weighted_esd(Eigen::MatrixXd(tree_operator(tree)), 0);
  }
  if (lanczos_steps < 1) {
    throw ConfigError("root_spectral_measure: node count beyond the dense budget; "
                      "use the Lanczos path with lanczos_steps >= 1");
  }
  const int m = std::min(lanczos_steps, n);
  if (double(n) * double(m) * 8.0 > 2e9) {
    throw NumericError(
        "root_spectral_measure: Lanczos basis would exceed the memory budget; "
        "reduce the tree caps or the step count and use root_moment instead");
  }
  const auto op = tree_operator(tree);
  Eigen::MatrixXd basis(n, m);
  std::vector<double> alpha, beta;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(0) = 1.0;
  basis.col(0) = v;
  Eigen::VectorXd w;
  for (int j = 0; j < m; ++j) {
    w = op * basis.col(j);
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(j);
    if (j > 0) w -= beta.back() * basis.col(j - 1);
    // Full reorthogonalization keeps the computed moments near machine
    // accuracy, which the measure consumers rely on.
    for (int k = 0; k <= j; ++k) w -= basis.col(k).dot(w) * basis.col(k);
    const double b = w.norm();
    if (j + 1 < m) {
      if (b < 1e-13) break;  // exact invariant subspace reached
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
  }
  const int steps = int(alpha.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
  for (int i = 0; i < steps; ++i) {
    tri(i, i) = alpha[std::size_t(i)];
    if (i + 1 < steps) {
      tri(i, i + 1) = beta[std::size_t(i)];
      tri(i + 1, i) = beta[std::size_t(i)];
    }
  }
  return root_weighted_esd(tri, 0);
}

namespace {

struct Graph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor, conductance)
};

RootedNeighborhood ball_of(const Graph& g, int root, double r) {
  if (root < 0 || root >= g.n) throw ConfigError("neighborhood: root out of range");
  if (!(r > 0.0)) throw ConfigError("neighborhood: radius must be > 0");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(std::size_t(g.n), inf);
  dist[std::size_t(root)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0.0, root});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[std::size_t(u)]) continue;
    for (const auto& [v, c] : g.adj[std::size_t(u)]) {
      const double nd = d + std::abs(1.0 / c);
      if (nd < dist[std::size_t(v)]) {
        dist[std::size_t(v)] = nd;
        heap.push({nd, v});
      }
    }
  }
  double span = 0.0;
  for (double d : dist) {
    if (std::isfinite(d)) span = std::max(span, d);
  }
  double radius = r;
  const double nudge = 1e-12 * std::max(1.0, span);
  bool moved = true;
  while (moved) {
    moved = false;
    for (double d : dist) {
      if (std::isfinite(d) && std::abs(d - radius) < nudge) {
        radius += nudge;
        moved = true;
      }
    }
  }
  RootedNeighborhood ball;
  ball.radius = radius;
  std::vector<int> inside;
  for (int v = 0; v < g.n; ++v) {
    if (dist[std::size_t(v)] <= radius) inside.push_back(v);
  }
  std::sort(inside.begin(), inside.end(), [&](int a, int b) {
    if (dist[std::size_t(a)] != dist[std::size_t(b)]) {
      return dist[std::size_t(a)] < dist[std::size_t(b)];
    }
    return a < b;
  });
  std::vector<int> position(std::size_t(g.n), -1);
  for (std::size_t i = 0; i < inside.size(); ++i) {
    ball.vertices.push_back(inside[i]);
    ball.distances.push_back(dist[std::size_t(inside[i])]);
    position[std::size_t(inside[i])] = int(i);
  }
  for (int u : inside) {
    for (const auto& [v, c] : g.adj[std::size_t(u)]) {
      if (u >= v) continue;  // one record per undirected edge
      if (position[std::size_t(v)] < 0) continue;
      const double len = std::abs(1.0 / c);
      if (std::min(dist[std::size_t(u)], dist[std::size_t(v)]) + len > radius) continue;
      ball.edges.push_back({position[std::size_t(u)], position[std::size_t(v)], c});
    }
  }
  return ball;
}

}  // namespace

RootedNeighborhood neighborhood(const Eigen::MatrixXd& symmetric, int root, double r) {
  const int n = int(symmetric.rows());
  if (n == 0 || symmetric.cols() != n) throw ConfigError("neighborhood: matrix must be square");
  Graph g;
  g.n = n;
  g.adj.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && symmetric(i, j) != 0.0) g.adj[std::size_t(i)].push_back({j, symmetric(i, j)});
    }
  }
  return ball_of(g, root, r);
}

RootedNeighborhood neighborhood(const FiniteSkeletonTree& tree, double r) {
  Graph g;
  g.n = tree.size();
  g.adj.resize(std::size_t(g.n));
  for (const TreeEdge& e : tree.edges) {
    g.adj[std::size_t(e.parent)].push_back({e.child, e.conductance});
    g.adj[std::size_t(e.child)].push_back({e.parent, e.conductance});
  }
  return ball_of(g, 0, r);
}

LwcReport lwc_diagnostic(const LevyCharacteristics& chars, const std::vector<int>& ns,
                         int branch_cap, int reps, std::uint64_t seed) {
  chars.validate();
  if (ns.empty()) throw ConfigError("lwc_diagnostic: empty size schedule");
  if (branch_cap < 1 || branch_cap > 8) {
    throw ConfigError("lwc_diagnostic: branch_cap must lie in [1, 8]");
  }
  if (reps < 10) throw ConfigError("lwc_diagnostic: need at least 10 reps");
  LwcReport report;
  report.ns = ns;
  report.no_arrivals = chars.levy.trivial();
  report.tail_threshold = 0.25;

  // Reference arrivals, shared across n.
  std::vector<std::vector<double>> reference(static_cast<std::size_t>(branch_cap));
  if (!report.no_arrivals) {
    const double eps_ref = pwist_default_epsilon(chars.levy);
    for (int rep = 0; rep < reps; ++rep) {
      rng::Stream stream(seed, {rng::kTagLwcArrival, std::uint64_t(rep)});
      auto arrivals = sample_ordered_conductances(chars.levy, eps_ref, branch_cap, stream);
      arrivals.resize(std::size_t(branch_cap), 0.0);
      for (int k = 0; k < branch_cap; ++k) reference[std::size_t(k)].push_back(arrivals[std::size_t(k)]);
    }
  }

  for (int n : ns) {
    if (n <= branch_cap + 1) throw ConfigError("lwc_diagnostic: n must exceed branch_cap + 1");
    const EntryLaw law = build_entry_law(chars, n, default_epsilon(chars, n));
    std::vector<std::vector<double>> top(static_cast<std::size_t>(branch_cap));
    long tail_hits = 0;
    std::vector<double> row(std::size_t(n) - 1);
    for (int rep = 0; rep < reps; ++rep) {
      rng::Stream stream(seed, {rng::kTagLwcRow, std::uint64_t(n), std::uint64_t(rep)});
      for (std::size_t j = 0; j + 1 < std::size_t(n); ++j) row[j] = law.sample(stream);
      std::partial_sort(row.begin(), row.begin() + branch_cap, row.end(),
                        [](double a, double b) { return std::abs(a) > std::abs(b); });
      for (int k = 0; k < branch_cap; ++k) top[std::size_t(k)].push_back(row[std::size_t(k)]);
      if (std::abs(row[0]) > report.tail_threshold) ++tail_hits;
    }
    if (report.no_arrivals) {
      report.tail_fraction.push_back(double(tail_hits) / double(reps));
      continue;
    }
    std::vector<double> ks(static_cast<std::size_t>(branch_cap));
    for (int k = 0; k < branch_cap; ++k) {
      ks[std::size_t(k)] = stats::ks_two_sample(top[std::size_t(k)], reference[std::size_t(k)]);
    }
    report.mean_ks.push_back(std::accumulate(ks.begin(), ks.end(), 0.0) / double(branch_cap));
    report.ks_per_coordinate.push_back(std::move(ks));
  }
  if (report.no_arrivals) {
    report.decreasing_trend =
        report.tail_fraction.size() < 2 ||
        report.tail_fraction.back() <= report.tail_fraction.front() + 1e-12;
  } else {
    report.decreasing_trend =
        report.mean_ks.size() < 2 || report.mean_ks.back() <= report.mean_ks.front() + 0.01;
  }
  return report;
}

void write_tree_jsonl(std::ostream& out, const FiniteSkeletonTree& tree) {
  for (const TreeEdge& e : tree.edges) {
    nlohmann::json record = {
        {"parent_word", word_label(tree.words[std::size_t(e.parent)])},
        {"child_word", word_label(tree.words[std::size_t(e.child)])},
        {"conductance", e.conductance},
    };
    out << record.dump() << "\n";
  }
}

void write_neighborhood_jsonl(std::ostream& out, const FiniteSkeletonTree& tree,
                              const RootedNeighborhood& ball) {
  for (const TreeEdge& e : ball.edges) {
    const int child_original = ball.vertices[std::size_t(e.child)];
    nlohmann::json record = {
        {"parent_word", word_label(tree.words[std::size_t(ball.vertices[std::size_t(e.parent)])])},
        {"child_word", word_label(tree.words[std::size_t(child_original)])},
        {"conductance", e.conductance},
        {"distance", ball.distances[std::size_t(e.child)]},
    };
    out << record.dump() << "\n";
  }
}

}  // namespace levyspec
