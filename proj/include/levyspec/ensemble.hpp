#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "levyspec/levy.hpp"
#include "levyspec/rng.hpp"

namespace levyspec {

// Per-entry law at size n: centred Gaussian of variance sigma2_eff plus an
// independent jump drawn from Pi restricted to {|x| > epsilon} with
// probability jump_rate.
struct EntryLaw {
  int n = 0;
  double epsilon = 0;
  double sigma2_eff = 0;   // per-entry Gaussian variance (already / n)
  double jump_rate = 0;    // Pi{|x| > eps} / n
  double jump_mass = 0;    // Pi{|x| > eps}
  LevyMeasure jump_source;

  double sample(rng::Stream& stream) const;
};

EntryLaw build_entry_law(const LevyCharacteristics& chars, int n, double epsilon);

// Cutoff with restricted mass at most n/10 (0 when the total mass already is).
double default_epsilon(const LevyCharacteristics& chars, int n);

struct MatrixMeta {
  std::uint64_t seed = 0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double h_n = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
};

// Dense symmetric sample with zero diagonal.
struct SymmetricMatrixSample {
  Eigen::MatrixXd entries;
  MatrixMeta meta;

  int n() const { return int(entries.rows()); }
  void check_invariants() const;  // throws NumericError on violation
};

// Upper triangle filled iid from the entry law with one stream per row, then
// mirrored; deterministic for a fixed seed under any thread count.
SymmetricMatrixSample sample_matrix(const EntryLaw& law, std::uint64_t seed);

// Threshold schedule h_n = n^{-exponent}; exponent must lie in (0, 1/2).
double choose_hn(int n, double exponent = 0.25);

// Resampling-and-cord surgery below the threshold:
//  1. entries with |value| > h_n keep their modulus with a fresh symmetric
//     sign (mirrored);
//  2. rows are processed in order of graph distance from row 0, where edge
//     lengths are |1/value| and ties break toward the lower index;
//  3. for each row, one position is drawn uniformly among ALL its
//     sub-threshold positions; if that position is still unwritten it
//     receives sigma, and every other unwritten sub-threshold position in
//     the row becomes zero; the column is mirrored before the next row.
// Drawing over all sub-threshold positions (not only unwritten ones) keeps
// the expected number of sigma entries per row at one, which the moment
// invariance of the modified ensemble depends on.
SymmetricMatrixSample replace_procedure(const SymmetricMatrixSample& input, double h_n,
                                        double sigma, std::uint64_t seed);

// Processing order used by the replacement step (exposed for testing).
std::vector<int> replacement_order(const Eigen::MatrixXd& entries);

// Zeroes entries with |value| > tau.
SymmetricMatrixSample truncate_matrix(const SymmetricMatrixSample& input, double tau);

// rank(M - M_tau) / n via the eigenvalue count above n * eps * |lambda|_max.
double rank_defect_fraction(const SymmetricMatrixSample& input, double tau);

// 2n x 2n symmetric embedding of a square matrix A with 2x2 blocks
// [[0, A(j,k)], [A(k,j), 0]]; similar to [[0, A], [A^T, 0]], eigenvalues are
// +- the singular values of A.
SymmetricMatrixSample hermitize(const Eigen::MatrixXd& a);

// Binary container round trip (little-endian, lower triangle of doubles).
void write_matrix(const std::string& path, const SymmetricMatrixSample& sample);
SymmetricMatrixSample read_matrix(const std::string& path);

// Lossless JSON-lines export (one row object per line) for small matrices.
void write_matrix_jsonl(std::ostream& out, const SymmetricMatrixSample& sample);
SymmetricMatrixSample read_matrix_jsonl(std::istream& in);

}  // namespace levyspec
