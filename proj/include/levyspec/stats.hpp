#pragma once

#include <functional>
#include <vector>

namespace levyspec::stats {

struct MeanStdErr {
  double mean = 0;
  double se = 0;
  long n = 0;
};

MeanStdErr mean_stderr(const std::vector<double>& xs);

// Two-sample Kolmogorov-Smirnov statistic (sup distance of empirical CDFs).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample statistic against a continuous CDF.
double ks_to_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  int bins = 0;
};

// Goodness of fit of integer counts against Poisson(lambda); tail cells are
// merged until every expected count is at least min_expected.
ChiSquareResult chi_square_poisson(const std::vector<long>& counts, double lambda,
                                   double min_expected = 5.0);

// Upper-tail probability of the chi-square distribution with k dof.
double chi_square_sf(double x, int dof);

// Wasserstein-1 distance between two histograms sharing bin edges
// (each mass vector is normalised first).
double wasserstein1_binned(const std::vector<double>& edges, std::vector<double> mass_a,
                           std::vector<double> mass_b);

}  // namespace levyspec::stats
