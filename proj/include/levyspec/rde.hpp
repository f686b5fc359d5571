#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "levyspec/levy.hpp"

namespace levyspec {

struct RdeParams {
  int pop_size = 4096;
  int sweeps = 400;
  double epsilon = -1.0;  // negative: arrival-rate-20 default for the measure
  std::uint64_t seed = 1;
  // Converged when the Wasserstein-1 distance between consecutive
  // imaginary-part histograms stays below w1_tol for stable_sweeps sweeps.
  double w1_tol = 1e-3;
  int stable_sweeps = 5;
};

// Population approximation of the root resolvent law at a fixed z.
struct ResolventPopulation {
  std::complex<double> z;
  std::vector<std::complex<double>> samples;
  double sigma2_eff = 0;  // Gaussian coefficient after small-jump folding
  double epsilon = 0;
  int sweeps_run = 0;
  bool converged = false;
  double last_shift = 0;  // final consecutive-sweep W1 value

  std::complex<double> mean() const;
  // Standard error of the mean treating samples as independent; population
  // dynamics correlates slots, so treat this as a scale, not a guarantee.
  double mean_se() const;
  void check_invariants() const;  // Im > 0 and |R| <= 1/Im z for every slot
};

// Synchronous population-dynamics iteration of
//   R <- -(z + s_eps^2 R_a + sum_k c_k^2 R_{b_k})^{-1},
// arrivals and picks keyed by (sweep, slot), so results are independent of
// the thread count. Stops early once converged.
ResolventPopulation solve_rde(const LevyCharacteristics& chars, std::complex<double> z,
                              const RdeParams& params);

struct DensityPoint {
  double x = 0;
  double density = 0;
  double mc_err = 0;
};

// density(x) ~ Im(mean resolvent at x + iy) / pi, with O(y) smoothing bias.
std::vector<DensityPoint> rde_density(const LevyCharacteristics& chars,
                                      const std::vector<double>& xs, double y,
                                      const RdeParams& params);

// The root with positive imaginary part of sigma^2 S^2 + z S + 1 = 0.
std::complex<double> semicircle_resolvent(double sigma, std::complex<double> z);

struct SubordinationReport {
  std::complex<double> s2;  // mean resolvent of (sigma^2, Pi) at z
  std::complex<double> s1;  // mean resolvent of (0, Pi) at z + sigma^2 s2
  double residual = 0;      // |s1 - s2|
  double mc_err = 0;
};

SubordinationReport subordination_check(const LevyMeasure& levy, double sigma,
                                        std::complex<double> z, const RdeParams& params);

struct AntisymmetryReport {
  double ks_re = 0;  // population at -conj(z) vs negated-conjugated population at z
  double ks_im = 0;
};

AntisymmetryReport antisymmetry_check(const LevyCharacteristics& chars, std::complex<double> z,
                                      const RdeParams& params);

}  // namespace levyspec
