#include "levyspec/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "levyspec/errors.hpp"

namespace levyspec::stats {

MeanStdErr mean_stderr(const std::vector<double>& xs) {
  MeanStdErr r;
  r.n = long(xs.size());
  if (xs.empty()) return r;
  double sum = 0;
  for (double x : xs) sum += x;
  r.mean = sum / double(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (double(xs.size()) * double(xs.size() - 1)));
  return r;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw NumericError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

double ks_to_cdf(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw NumericError("ks_to_cdf: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(f - double(i + 1) / n));
  }
  return d;
}

double chi_square_sf(double x, int dof) {
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(double(dof) / 2.0, x / 2.0);
}

ChiSquareResult chi_square_poisson(const std::vector<long>& counts, double lambda,
                                   double min_expected) {
  if (counts.empty()) throw NumericError("chi_square_poisson: empty counts");
  const double n = double(counts.size());
  long max_count = 0;
  for (long c : counts) {
    if (c < 0) throw NumericError("chi_square_poisson: negative count");
    max_count = std::max(max_count, c);
  }

  // Poisson pmf over 0..max_count, remainder mass in the closing cell.
  std::vector<double> pmf(std::size_t(max_count) + 1);
  double p = std::exp(-lambda);
  double cum = 0;
  for (long k = 0; k <= max_count; ++k) {
    pmf[std::size_t(k)] = p;
    cum += p;
    p *= lambda / double(k + 1);
  }
  std::vector<long> observed(pmf.size(), 0);
  for (long c : counts) ++observed[std::size_t(c)];

  // Greedy cell merging so each expected count reaches the threshold; the
  // final cell absorbs the upper tail mass.
  struct Cell {
    double expected;
    long obs;
  };
  std::vector<Cell> cells;
  double acc_e = 0;
  long acc_o = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc_e += n * pmf[k];
    acc_o += observed[k];
    if (acc_e >= min_expected) {
      cells.push_back({acc_e, acc_o});
      acc_e = 0;
      acc_o = 0;
    }
  }
  const double tail_mass = std::max(0.0, 1.0 - cum);
  acc_e += n * tail_mass;
  if (cells.empty()) {
    cells.push_back({acc_e, acc_o});
  } else if (acc_e > 0 || acc_o > 0) {
    cells.back().expected += acc_e;
    cells.back().obs += acc_o;
  }

  ChiSquareResult r;
  r.bins = int(cells.size());
  r.dof = std::max(1, int(cells.size()) - 1);
  for (const auto& cell : cells) {
    if (cell.expected > 0) {
      const double diff = double(cell.obs) - cell.expected;
      r.statistic += diff * diff / cell.expected;
    }
  }
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double wasserstein1_binned(const std::vector<double>& edges, std::vector<double> mass_a,
                           std::vector<double> mass_b) {
  if (edges.size() != mass_a.size() + 1 || mass_a.size() != mass_b.size()) {
    throw NumericError("wasserstein1_binned: shape mismatch");
  }
  auto normalise = [](std::vector<double>& m) {
    double s = 0;
    for (double v : m) s += v;
    if (s > 0) {
      for (double& v : m) v /= s;
    }
  };
  normalise(mass_a);
  normalise(mass_b);
  double w1 = 0, diff = 0;
  for (std::size_t i = 0; i < mass_a.size(); ++i) {
    diff += mass_a[i] - mass_b[i];
    w1 += std::abs(diff) * (edges[i + 1] - edges[i]);
  }
  return w1;
}

}  // namespace levyspec::stats
