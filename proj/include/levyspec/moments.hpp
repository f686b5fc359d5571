#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "levyspec/levy.hpp"

namespace levyspec {

// (2p)! / (p! (p+1)!) in exact integer arithmetic; throws NumericError when
// the value exceeds 64-bit range.
std::uint64_t catalan(int p);

// Stirling number of the second kind S(2p, l) via the exact alternating sum
// (1/l!) sum_k (-1)^{l-k} C(l,k) k^{2p}.
std::uint64_t stirling2_even(int p, int l);

// All integer partitions of p as nonincreasing tuples, enumerated
// deterministically from (p) down to (1,...,1).
std::vector<std::vector<int>> enumerate_Qp(int p);

// Number of pairs (ordered rooted tree with p edges, set partition of the p
// non-root vertices) such that the block-size multiset equals q, every block
// is depth-homogeneous, and the parents of each block all lie in one common
// block or all equal the root. Exhaustive enumeration; capacity-limited.
std::uint64_t count_colored_trees(const std::vector<int>& q);

// The counts for every partition of p at once (memoized).
std::map<std::vector<int>, std::uint64_t> colored_tree_table(int p);

// Largest p accepted by the tree enumeration.
inline constexpr int kColoredTreeCapacity = 8;

// Even moment M_{2p} of the limiting measure:
//   sum over partitions q of p of count(q) * prod_i w(q_i),
// with w(1) = sigma^2 + M_2(Pi) and w(q) = M_{2q}(Pi) for q > 1.
// Returns +infinity when a contributing measure moment diverges.
double lsd_moment(const LevyCharacteristics& chars, int p);

// Upper bound on M_{2p} for Pi supported in [-tau, tau]:
//   tau^{2p} * sum_{l=1}^{p} catalan(p) * S(2p, l) * K^l,
// K = sigma^2 + M_2(Pi) + Pi{|x| > 1}.
double moment_bound(double tau, const LevyCharacteristics& chars, int p);

struct MomentVector {
  std::vector<double> values;  // values[p] = M_{2p}, p = 0..p_max

  int p_max() const { return int(values.size()) - 1; }

  // Positive semidefiniteness of the Hankel matrix [M_{i+j}] with the odd
  // moments taken to be zero. Requires finite entries.
  bool hankel_psd(double tol = 1e-9) const;
};

MomentVector lsd_moment_vector(const LevyCharacteristics& chars, int p_max);

// (1/n) tr(M^p) through the eigenvalues of M.
double trace_moment(const Eigen::MatrixXd& m, int p);

struct TraceMomentEstimate {
  double estimate = 0;
  double se = 0;
  int reps = 0;
};

// Monte Carlo mean of (1/n) tr(M^p) over independently sampled matrices.
TraceMomentEstimate trace_moment_mc(const LevyCharacteristics& chars, int n, int p, int reps,
                                    std::uint64_t seed);

}  // namespace levyspec
