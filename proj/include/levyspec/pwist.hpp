#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "levyspec/levy.hpp"
#include "levyspec/rng.hpp"
#include "levyspec/spectral.hpp"

namespace levyspec {

// Address of a node: child labels from the root down. {} is the root.
using TreeWord = std::vector<std::uint32_t>;

// "-" for the root, else labels joined by '.' (e.g. "0.3.1").
std::string word_label(const TreeWord& word);

struct TreeEdge {
  int parent = 0;
  int child = 0;
  double conductance = 0;
};

struct TreeParams {
  double sigma = 0;
  int branch_cap = 0;
  int depth_cap = 0;
  double epsilon = 0;
};

// Rooted tree truncated in depth and branching; node 0 is the root. Child
// label 0 is reserved for the deterministic sigma edge; labels >= 1 carry
// random conductances sorted by modulus, largest first.
struct FiniteSkeletonTree {
  std::vector<TreeWord> words;  // words[0] = {}
  std::vector<int> parent;      // parent[0] = -1
  std::vector<int> depth;       // depth[0] = 0
  std::vector<TreeEdge> edges;  // one per non-root node, child-major order
  TreeParams params;

  int size() const { return int(words.size()); }
  void check_invariants() const;  // throws NumericError on violation
};

// Arrival conductances: count ~ Poisson(Pi{|x| > epsilon}), values i.i.d.
// from Pi restricted to {|x| > epsilon}, sorted by modulus descending,
// truncated to max_count (negative max_count = unlimited).
std::vector<double> sample_ordered_conductances(const LevyMeasure& levy, double epsilon,
                                                int max_count, rng::Stream& stream);
std::vector<double> sample_ordered_conductances(const LevyMeasure& levy, double epsilon,
                                                int max_count, std::uint64_t seed);

// Default conductance floor: arrival rate per node at most 20.
double pwist_default_epsilon(const LevyMeasure& levy);

// Breadth-first growth to depth_cap. Every node's draws come from a stream
// keyed by its word, so a subtree regrown with the same master seed is
// identical regardless of the caps used elsewhere.
FiniteSkeletonTree grow_pwist(const LevyCharacteristics& chars, int branch_cap, int depth_cap,
                              double epsilon, std::uint64_t seed);

// Symmetric operator with (u,v) = conductance on tree edges, zero diagonal.
Eigen::SparseMatrix<double> tree_operator(const FiniteSkeletonTree& tree);

// p-th moment of the root spectral measure, computed exactly as
// e_root^T T^p e_root by repeated sparse mat-vec. Odd p yields exactly 0:
// the tree is bipartite by depth, so every intermediate vector is supported
// on a single depth parity and the final inner product has no nonzero term.
double root_moment(const FiniteSkeletonTree& tree, int p);

// Spectral measure at the root vector. Small trees use a dense
// eigendecomposition; larger ones a fully reorthogonalized Lanczos
// tridiagonalization started at e_root (exact for moments below twice the
// step count).
SpectralMeasure root_spectral_measure(const FiniteSkeletonTree& tree, int dense_budget = 4000,
                                      int lanczos_steps = 200);

struct RootedNeighborhood {
  std::vector<int> vertices;      // original indices, sorted by distance, root first
  std::vector<double> distances;  // aligned with `vertices`
  std::vector<TreeEdge> edges;    // endpoints are positions into `vertices`
  double radius = 0;              // after any tie-breaking perturbation
};

// Shortest-path ball of radius r under edge lengths |1/conductance|. If some
// vertex sits at exactly distance r, the radius is nudged up by a relative
// 1e-12 so the ball boundary never carries a vertex.
RootedNeighborhood neighborhood(const Eigen::MatrixXd& symmetric, int root, double r);
RootedNeighborhood neighborhood(const FiniteSkeletonTree& tree, double r);

struct LwcReport {
  std::vector<int> ns;
  // [n index][coordinate k]: two-sample KS between the k-th largest row
  // entry (by modulus, across reps) and the k-th ordered arrival.
  std::vector<std::vector<double>> ks_per_coordinate;
  std::vector<double> mean_ks;
  bool no_arrivals = false;            // Pi = 0: nothing to compare against
  double tail_threshold = 0;           // used when no_arrivals
  std::vector<double> tail_fraction;   // per n: P(top row modulus > threshold)
  bool decreasing_trend = false;
};

// Compares the top branch_cap moduli of a matrix row against the ordered
// arrival conductances, per n in the schedule.
LwcReport lwc_diagnostic(const LevyCharacteristics& chars, const std::vector<int>& ns,
                         int branch_cap, int reps, std::uint64_t seed);

// JSON-lines: one record per edge {parent_word, child_word, conductance}.
void write_tree_jsonl(std::ostream& out, const FiniteSkeletonTree& tree);
// Same, restricted to a neighborhood, with a distance field per record.
void write_neighborhood_jsonl(std::ostream& out, const FiniteSkeletonTree& tree,
                              const RootedNeighborhood& ball);

}  // namespace levyspec
