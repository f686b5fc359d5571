#include "levyspec/rde.hpp"

#include <algorithm>
#include <cmath>

#include "levyspec/errors.hpp"
#include "levyspec/parallel.hpp"
#include "levyspec/pwist.hpp"
#include "levyspec/rng.hpp"
#include "levyspec/stats.hpp"

namespace levyspec {

std::complex<double> ResolventPopulation::mean() const {
  std::complex<double> total = 0.0;
  for (const auto& s : samples) total += s;
  return total / double(samples.size());
}

double ResolventPopulation::mean_se() const {
  const std::complex<double> m = mean();
  double var = 0.0;
  for (const auto& s : samples) var += std::norm(s - m);
  var /= double(samples.size() - 1);
  return std::sqrt(var / double(samples.size()));
}

void ResolventPopulation::check_invariants() const {
  const double bound = 1.0 / z.imag() + 1e-12;
  for (const auto& s : samples) {
    if (!(s.imag() > 0.0)) throw NumericError("rde population: non-Herglotz sample");
    if (!(std::abs(s) <= bound)) throw NumericError("rde population: modulus bound violated");
  }
}

namespace {

std::vector<double> im_histogram(const std::vector<std::complex<double>>& samples,
                                 const std::vector<double>& edges) {
  std::vector<double> mass(edges.size() - 1, 0.0);
  const double lo = edges.front(), hi = edges.back();
  const double width = (hi - lo) / double(mass.size());
  for (const auto& s : samples) {
    int b = int(std::floor((s.imag() - lo) / width));
    b = std::clamp(b, 0, int(mass.size()) - 1);
    mass[std::size_t(b)] += 1.0;
  }
  return mass;
}

}  // namespace

ResolventPopulation solve_rde(const LevyCharacteristics& chars, std::complex<double> z,
                              const RdeParams& params) {
  chars.validate();
  if (!(z.imag() > 0.0)) throw ConfigError("solve_rde: need Im z > 0");
  if (params.pop_size < 2) throw ConfigError("solve_rde: pop_size must be >= 2");
  if (params.sweeps < 1) throw ConfigError("solve_rde: sweeps must be >= 1");
  const double epsilon =
      params.epsilon >= 0.0 ? params.epsilon : pwist_default_epsilon(chars.levy);

  ResolventPopulation pop;
  pop.z = z;
  pop.epsilon = epsilon;
  pop.sigma2_eff = epsilon > 0.0 ? gaussian_compensation(chars, epsilon) : chars.sigma2;
  const std::size_t n = std::size_t(params.pop_size);
  pop.samples.assign(n, std::complex<double>(0.0, 1.0));

  const int bins = 100;
  std::vector<double> edges(std::size_t(bins) + 1);
  const double im_cap = 1.0 / z.imag();
  for (int i = 0; i <= bins; ++i) {
    edges[std::size_t(i)] = im_cap * double(i) / double(bins);
  }
  std::vector<double> prev_hist = im_histogram(pop.samples, edges);

  std::vector<std::complex<double>> next(n);
  int stable = 0;
  for (int sweep = 0; sweep < params.sweeps; ++sweep) {
    const auto& prev = pop.samples;
    parallel::for_each_index(n, [&](std::size_t slot) {
      rng::Stream stream(params.seed,
                         {rng::kTagRdeArrivals, std::uint64_t(sweep), std::uint64_t(slot)});
      std::complex<double> denom = z;
      if (pop.sigma2_eff > 0.0) {
        denom += pop.sigma2_eff * prev[stream.below(n)];
      }
      if (!chars.levy.trivial()) {
        const auto arrivals = sample_ordered_conductances(chars.levy, epsilon, -1, stream);
        for (double c : arrivals) denom += (c * c) * prev[stream.below(n)];
      }
      const std::complex<double> r = -1.0 / denom;
      if (!(r.imag() > 0.0)) {
        throw NumericError("solve_rde: update produced a non-Herglotz value");
      }
      next[slot] = r;
    });
    pop.samples.swap(next);
    pop.sweeps_run = sweep + 1;

    std::vector<double> hist = im_histogram(pop.samples, edges);
    pop.last_shift = stats::wasserstein1_binned(edges, prev_hist, hist);
    prev_hist.swap(hist);
    stable = pop.last_shift < params.w1_tol ? stable + 1 : 0;
    if (stable >= params.stable_sweeps) {
      pop.converged = true;
      break;
    }
  }
  pop.check_invariants();
  return pop;
}

std::vector<DensityPoint> rde_density(const LevyCharacteristics& chars,
                                      const std::vector<double>& xs, double y,
                                      const RdeParams& params) {
  if (!(y > 0.0)) throw ConfigError("rde_density: y must be > 0");
  constexpr double kPi = 3.14159265358979323846;
  std::vector<DensityPoint> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    RdeParams local = params;
    local.seed = rng::derive_key(rng::derive_key(params.seed, rng::kTagStage), std::uint64_t(i));
    const auto pop = solve_rde(chars, {xs[i], y}, local);
    DensityPoint pt;
    pt.x = xs[i];
    pt.density = pop.mean().imag() / kPi;
    pt.mc_err = pop.mean_se() / kPi;
    out.push_back(pt);
  }
  return out;
}

std::complex<double> semicircle_resolvent(double sigma, std::complex<double> z) {
  if (!(sigma > 0.0)) throw ConfigError("semicircle_resolvent: sigma must be > 0");
  if (!(z.imag() > 0.0)) throw ConfigError("semicircle_resolvent: need Im z > 0");
  const double s2 = sigma * sigma;
  const std::complex<double> disc = std::sqrt(z * z - 4.0 * s2);
  const std::complex<double> r1 = (-z + disc) / (2.0 * s2);
  const std::complex<double> r2 = (-z - disc) / (2.0 * s2);
  return r1.imag() > 0.0 ? r1 : r2;
}

SubordinationReport subordination_check(const LevyMeasure& levy, double sigma,
                                        std::complex<double> z, const RdeParams& params) {
  SubordinationReport report;
  LevyCharacteristics with_gauss{sigma * sigma, levy};
  const auto pop2 = solve_rde(with_gauss, z, params);
  report.s2 = pop2.mean();
  LevyCharacteristics no_gauss{0.0, levy};
  const std::complex<double> shifted = z + sigma * sigma * report.s2;
  const auto pop1 = solve_rde(no_gauss, shifted, params);
  report.s1 = pop1.mean();
  report.residual = std::abs(report.s1 - report.s2);
  report.mc_err = pop1.mean_se() + pop2.mean_se();
  return report;
}

AntisymmetryReport antisymmetry_check(const LevyCharacteristics& chars, std::complex<double> z,
                                      const RdeParams& params) {
  const auto pop_neg = solve_rde(chars, -std::conj(z), params);
  const auto pop = solve_rde(chars, z, params);
  std::vector<double> re_a, im_a, re_b, im_b;
  re_a.reserve(pop_neg.samples.size());
  for (const auto& s : pop_neg.samples) {
    re_a.push_back(s.real());
    im_a.push_back(s.imag());
  }
  for (const auto& s : pop.samples) {
    const std::complex<double> t = -std::conj(s);
    re_b.push_back(t.real());
    im_b.push_back(t.imag());
  }
  AntisymmetryReport report;
  report.ks_re = stats::ks_two_sample(re_a, re_b);
  report.ks_im = stats::ks_two_sample(im_a, im_b);
  return report;
}

}  // namespace levyspec
