#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "levyspec/levy.hpp"

namespace levyspec {

struct SymmetricMatrixSample;

// Probability measure on the real line, either purely atomic (sorted support
// with positive weights) or a histogram (sorted edges with bin masses).
class SpectralMeasure {
 public:
  static SpectralMeasure from_atoms(std::vector<double> xs, std::vector<double> ws);
  static SpectralMeasure from_histogram(std::vector<double> edges, std::vector<double> masses);

  bool atomic() const { return atomic_; }
  const std::vector<double>& support() const { return xs_; }
  const std::vector<double>& weights() const { return ws_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& masses() const { return ms_; }

  double total_mass() const;
  double min_support() const;
  double max_support() const;

  // Right-continuous CDF and its left limit; histograms interpolate
  // linearly inside bins.
  double cdf(double x) const;
  double cdf_left(double x) const;

  double moment(int p) const;

  std::complex<double> stieltjes(std::complex<double> z) const;

  // Equal-width histogram over [lo, hi] (atoms are binned; histogram input
  // is re-binned by mass overlap).
  SpectralMeasure binned(int bins, double lo, double hi) const;
  SpectralMeasure binned(int bins) const;

  // Pushforward under x -> -x (used for symmetry checks).
  SpectralMeasure reflected() const;

 private:
  bool atomic_ = true;
  std::vector<double> xs_, ws_;     // atomic representation
  std::vector<double> edges_, ms_;  // histogram representation
};

// Eigenvalue measure with equal weights 1/n; exactly equal eigenvalues merge.
SpectralMeasure esd(const Eigen::MatrixXd& symmetric);
SpectralMeasure esd(const SymmetricMatrixSample& sample);

// Spectral measure at a coordinate vector: weights are squared eigenvector
// components at `root`.
SpectralMeasure root_weighted_esd(const Eigen::MatrixXd& symmetric, int root);

// Uniform mixture of measures (concatenated atoms / summed histograms).
SpectralMeasure average_measures(const std::vector<SpectralMeasure>& measures);

std::complex<double> stieltjes(const SpectralMeasure& mu, std::complex<double> z);

struct StieltjesInversion {
  double mass = 0;
  bool grid_coarse_warning = false;
};

// Trapezoid mass recovery of (1/pi) Im S over [a, b] from transform samples
// on a grid at height y; flags grids coarser than the smoothing scale.
StieltjesInversion invert_stieltjes(const std::vector<double>& xs,
                                    const std::vector<std::complex<double>>& s_values, double y,
                                    double a, double b);

// Exact sup-distance of CDFs, evaluated at jump points and knots.
double kolmogorov_distance(const SpectralMeasure& a, const SpectralMeasure& b);
double kolmogorov_to_cdf(const SpectralMeasure& mu, const std::function<double(double)>& cdf);

// Certified lower bound on the bounded-Lipschitz-type distance
//   sup { \int f d(mu - nu) : f nondecreasing, Lip(f) + sup|f| <= 1 },
// optimised exactly over piecewise-linear f on a K-point grid.
double d1_lower_bound(const SpectralMeasure& a, const SpectralMeasure& b, int grid_points = 64);

double semicircle_density(double sigma, double x);
double semicircle_cdf(double sigma, double x);

// Bounded-variation test functions (continuous, vanishing at infinity,
// total variation <= 1) for the concentration probe.
struct TestFunction {
  std::string name;
  std::function<double(double)> f;
};
std::vector<TestFunction> tv_function_catalog();

struct ConcentrationReport {
  std::string function_name;
  int n = 0;
  long reps = 0;
  double mean = 0;
  double variance = 0;
  // One row per probe level t: observed exceedance frequency of
  // |X - mean| >= t against the envelope 2 exp(-n t^2 / 2).
  std::vector<double> levels;
  std::vector<double> observed;
  std::vector<double> envelope;
  bool within_envelope = true;
};

ConcentrationReport concentration_probe(const LevyCharacteristics& chars, int n,
                                        const std::string& function_name, int reps,
                                        std::uint64_t seed);

// Largest |eigenvalue| per matrix size; records support growth trends.
std::vector<double> support_sup_trend(const LevyCharacteristics& chars,
                                      const std::vector<int>& ns, std::uint64_t seed);

}  // namespace levyspec
