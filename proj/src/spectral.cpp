#include "levyspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "levyspec/ensemble.hpp"
#include "levyspec/errors.hpp"
#include "levyspec/parallel.hpp"
#include "levyspec/stats.hpp"

namespace levyspec {

namespace {

struct CdfEvaluator {
  bool atomic = true;
  const std::vector<double>* xs = nullptr;
  const std::vector<double>* edges = nullptr;
  std::vector<double> cum;  // inclusive prefix masses

  explicit CdfEvaluator(const SpectralMeasure& mu) {
    atomic = mu.atomic();
    if (atomic) {
      xs = &mu.support();
      cum.resize(xs->size());
      std::partial_sum(mu.weights().begin(), mu.weights().end(), cum.begin());
    } else {
      edges = &mu.edges();
      cum.resize(mu.masses().size());
      std::partial_sum(mu.masses().begin(), mu.masses().end(), cum.begin());
    }
  }

  double at(double x) const {
    if (atomic) {
      const auto it = std::upper_bound(xs->begin(), xs->end(), x);
      const std::size_t idx = std::size_t(it - xs->begin());
      return idx == 0 ? 0.0 : cum[idx - 1];
    }
    const auto& e = *edges;
    if (x <= e.front()) return 0.0;
    if (x >= e.back()) return cum.back();
    const auto it = std::upper_bound(e.begin(), e.end(), x);
    const std::size_t bin = std::size_t(it - e.begin()) - 1;
    const double base = bin == 0 ? 0.0 : cum[bin - 1];
    const double frac = (x - e[bin]) / (e[bin + 1] - e[bin]);
    return base + frac * (cum[bin] - (bin == 0 ? 0.0 : cum[bin - 1]));
  }

  double left(double x) const {
    if (!atomic) return at(x);
    const auto it = std::lower_bound(xs->begin(), xs->end(), x);
    const std::size_t idx = std::size_t(it - xs->begin());
    return idx == 0 ? 0.0 : cum[idx - 1];
  }
};

// Average of clamp((x - lo) / (hi - lo), 0, 1) over [a, b], a < b.
double ramp_average(double a, double b, double lo, double hi) {
  const double width = b - a;
  double total = 0.0;
  const double m1 = std::clamp(lo, a, b);  // below the ramp: contributes 0
  const double m2 = std::clamp(hi, a, b);
  if (m2 > m1) {
    const double u1 = (m1 - lo) / (hi - lo);
    const double u2 = (m2 - lo) / (hi - lo);
    total += 0.5 * (u1 + u2) * (m2 - m1);
  }
  if (b > m2) total += b - m2;  // above the ramp: contributes 1
  return total / width;
}

double ramp_integral(const SpectralMeasure& mu, double lo, double hi) {
  double total = 0.0;
  if (mu.atomic()) {
    const auto& xs = mu.support();
    const auto& ws = mu.weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      total += ws[i] * std::clamp((xs[i] - lo) / (hi - lo), 0.0, 1.0);
    }
  } else {
    const auto& e = mu.edges();
    const auto& ms = mu.masses();
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (ms[i] > 0.0) total += ms[i] * ramp_average(e[i], e[i + 1], lo, hi);
    }
  }
  return total;
}

}  // namespace

SpectralMeasure SpectralMeasure::from_atoms(std::vector<double> xs, std::vector<double> ws) {
  if (xs.size() != ws.size()) throw ConfigError("SpectralMeasure: atom size mismatch");
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), std::size_t(0));
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  SpectralMeasure mu;
  mu.atomic_ = true;
  mu.xs_.reserve(xs.size());
  mu.ws_.reserve(ws.size());
  for (std::size_t k : idx) {
    if (!std::isfinite(xs[k])) throw ConfigError("SpectralMeasure: non-finite atom");
    if (!(ws[k] >= 0.0)) throw ConfigError("SpectralMeasure: negative weight");
    if (ws[k] == 0.0) continue;
    if (!mu.xs_.empty() && mu.xs_.back() == xs[k]) {
      mu.ws_.back() += ws[k];
    } else {
      mu.xs_.push_back(xs[k]);
      mu.ws_.push_back(ws[k]);
    }
  }
  return mu;
}

SpectralMeasure SpectralMeasure::from_histogram(std::vector<double> edges,
                                                std::vector<double> masses) {
  if (edges.size() != masses.size() + 1 || masses.empty()) {
    throw ConfigError("SpectralMeasure: histogram shape mismatch");
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) throw ConfigError("SpectralMeasure: edges not increasing");
  }
  for (double m : masses) {
    if (!(m >= 0.0)) throw ConfigError("SpectralMeasure: negative bin mass");
  }
  SpectralMeasure mu;
  mu.atomic_ = false;
  mu.edges_ = std::move(edges);
  mu.ms_ = std::move(masses);
  return mu;
}

double SpectralMeasure::total_mass() const {
  const auto& w = atomic_ ? ws_ : ms_;
  return std::accumulate(w.begin(), w.end(), 0.0);
}

double SpectralMeasure::min_support() const {
  if (atomic_) return xs_.empty() ? 0.0 : xs_.front();
  return edges_.front();
}

double SpectralMeasure::max_support() const {
  if (atomic_) return xs_.empty() ? 0.0 : xs_.back();
  return edges_.back();
}

double SpectralMeasure::cdf(double x) const { return CdfEvaluator(*this).at(x); }

double SpectralMeasure::cdf_left(double x) const { return CdfEvaluator(*this).left(x); }

double SpectralMeasure::moment(int p) const {
  if (p < 0) throw ConfigError("SpectralMeasure: negative moment order");
  double total = 0.0;
  if (atomic_) {
    for (std::size_t i = 0; i < xs_.size(); ++i) total += ws_[i] * std::pow(xs_[i], p);
    return total;
  }
  for (std::size_t i = 0; i < ms_.size(); ++i) {
    if (ms_[i] == 0.0) continue;
    const double a = edges_[i], b = edges_[i + 1];
    // Exact moment of the uniform mass on [a, b].
    total += ms_[i] * (std::pow(b, p + 1) - std::pow(a, p + 1)) / (double(p + 1) * (b - a));
  }
  return total;
}

std::complex<double> SpectralMeasure::stieltjes(std::complex<double> z) const {
  std::complex<double> total = 0.0;
  if (atomic_) {
    for (std::size_t i = 0; i < xs_.size(); ++i) total += ws_[i] / (xs_[i] - z);
    return total;
  }
  for (std::size_t i = 0; i < ms_.size(); ++i) {
    if (ms_[i] == 0.0) continue;
    const double a = edges_[i], b = edges_[i + 1];
    total += ms_[i] / (b - a) * (std::log(b - z) - std::log(a - z));
  }
  return total;
}

SpectralMeasure SpectralMeasure::binned(int bins, double lo, double hi) const {
  if (bins < 1) throw ConfigError("SpectralMeasure: bins must be >= 1");
  if (!(lo < hi)) throw ConfigError("SpectralMeasure: empty bin range");
  std::vector<double> edges(std::size_t(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    edges[std::size_t(i)] = lo + (hi - lo) * double(i) / double(bins);
  }
  std::vector<double> masses(std::size_t(bins), 0.0);
  const double width = (hi - lo) / double(bins);
  if (atomic_) {
    // Out-of-range atoms are clamped into the end bins so mass is conserved.
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      int b = int(std::floor((xs_[i] - lo) / width));
      b = std::clamp(b, 0, bins - 1);
      masses[std::size_t(b)] += ws_[i];
    }
  } else {
    for (std::size_t i = 0; i < ms_.size(); ++i) {
      if (ms_[i] == 0.0) continue;
      const double a = edges_[i], b = edges_[i + 1];
      for (int t = 0; t < bins; ++t) {
        const double s0 = std::max(a, edges[std::size_t(t)]);
        const double s1 = std::min(b, edges[std::size_t(t) + 1]);
        if (s1 > s0) masses[std::size_t(t)] += ms_[i] * (s1 - s0) / (b - a);
      }
      // Mass outside [lo, hi] folds into the end bins.
      if (a < lo) masses.front() += ms_[i] * (std::min(b, lo) - a) / (b - a);
      if (b > hi) masses.back() += ms_[i] * (b - std::max(a, hi)) / (b - a);
    }
  }
  return from_histogram(std::move(edges), std::move(masses));
}

SpectralMeasure SpectralMeasure::binned(int bins) const {
  double lo = min_support(), hi = max_support();
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return binned(bins, lo, hi);
}

SpectralMeasure SpectralMeasure::reflected() const {
  if (atomic_) {
    std::vector<double> xs(xs_.size()), ws(ws_.size());
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      xs[xs_.size() - 1 - i] = -xs_[i];
      ws[ws_.size() - 1 - i] = ws_[i];
    }
    SpectralMeasure mu;
    mu.atomic_ = true;
    mu.xs_ = std::move(xs);
    mu.ws_ = std::move(ws);
    return mu;
  }
  std::vector<double> edges(edges_.size()), ms(ms_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) edges[edges_.size() - 1 - i] = -edges_[i];
  for (std::size_t i = 0; i < ms_.size(); ++i) ms[ms_.size() - 1 - i] = ms_[i];
  SpectralMeasure mu;
  mu.atomic_ = false;
  mu.edges_ = std::move(edges);
  mu.ms_ = std::move(ms);
  return mu;
}

SpectralMeasure esd(const Eigen::MatrixXd& symmetric) {
  const int n = int(symmetric.rows());
  if (n == 0 || symmetric.cols() != n) throw ConfigError("esd: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("esd: eigensolver failed");
  std::vector<double> xs(static_cast<std::size_t>(n)), ws(std::size_t(n), 1.0 / double(n));
  for (int i = 0; i < n; ++i) xs[std::size_t(i)] = solver.eigenvalues()(i);
  return SpectralMeasure::from_atoms(std::move(xs), std::move(ws));
}

SpectralMeasure esd(const SymmetricMatrixSample& sample) { return esd(sample.entries); }

SpectralMeasure root_weighted_esd(const Eigen::MatrixXd& symmetric, int root) {
  const int n = int(symmetric.rows());
  if (n == 0 || symmetric.cols() != n) throw ConfigError("root_weighted_esd: not square");
  if (root < 0 || root >= n) throw ConfigError("root_weighted_esd: root out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw NumericError("root_weighted_esd: solver failed");
  std::vector<double> xs(static_cast<std::size_t>(n)), ws(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[std::size_t(i)] = solver.eigenvalues()(i);
    const double c = solver.eigenvectors()(root, i);
    ws[std::size_t(i)] = c * c;
  }
  return SpectralMeasure::from_atoms(std::move(xs), std::move(ws));
}

SpectralMeasure average_measures(const std::vector<SpectralMeasure>& measures) {
  if (measures.empty()) throw ConfigError("average_measures: empty input");
  const double scale = 1.0 / double(measures.size());
  const bool all_atomic =
      std::all_of(measures.begin(), measures.end(), [](const auto& m) { return m.atomic(); });
  if (all_atomic) {
    std::vector<double> xs, ws;
    for (const auto& m : measures) {
      for (std::size_t i = 0; i < m.support().size(); ++i) {
        xs.push_back(m.support()[i]);
        ws.push_back(m.weights()[i] * scale);
      }
    }
    return SpectralMeasure::from_atoms(std::move(xs), std::move(ws));
  }
  for (const auto& m : measures) {
    if (m.atomic() || m.edges() != measures.front().edges()) {
      throw ConfigError("average_measures: histograms must share edges");
    }
  }
  std::vector<double> masses(measures.front().masses().size(), 0.0);
  for (const auto& m : measures) {
    for (std::size_t i = 0; i < masses.size(); ++i) masses[i] += m.masses()[i] * scale;
  }
  return SpectralMeasure::from_histogram(measures.front().edges(), std::move(masses));
}

std::complex<double> stieltjes(const SpectralMeasure& mu, std::complex<double> z) {
  return mu.stieltjes(z);
}

StieltjesInversion invert_stieltjes(const std::vector<double>& xs,
                                    const std::vector<std::complex<double>>& s_values, double y,
                                    double a, double b) {
  if (xs.size() != s_values.size() || xs.size() < 2) {
    throw ConfigError("invert_stieltjes: need matching grids of size >= 2");
  }
  if (!(y > 0.0)) throw ConfigError("invert_stieltjes: y must be > 0");
  StieltjesInversion result;
  constexpr double kPi = 3.14159265358979323846;
  double max_gap = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1];
    if (!(x1 > x0)) throw ConfigError("invert_stieltjes: grid not increasing");
    max_gap = std::max(max_gap, x1 - x0);
    if (x0 < a || x1 > b) continue;
    const double d0 = s_values[i].imag() / kPi;
    const double d1 = s_values[i + 1].imag() / kPi;
    result.mass += 0.5 * (d0 + d1) * (x1 - x0);
  }
  result.grid_coarse_warning = max_gap > y;
  return result;
}

double kolmogorov_distance(const SpectralMeasure& a, const SpectralMeasure& b) {
  const CdfEvaluator ea(a), eb(b);
  std::vector<double> knots;
  auto add = [&](const SpectralMeasure& m) {
    const auto& pts = m.atomic() ? m.support() : m.edges();
    knots.insert(knots.end(), pts.begin(), pts.end());
  };
  add(a);
  add(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double sup = 0.0;
  for (double x : knots) {
    sup = std::max(sup, std::abs(ea.at(x) - eb.at(x)));
    sup = std::max(sup, std::abs(ea.left(x) - eb.left(x)));
  }
  return sup;
}

double kolmogorov_to_cdf(const SpectralMeasure& mu, const std::function<double(double)>& cdf) {
  double sup = 0.0;
  if (mu.atomic()) {
    double cum = 0.0;
    const auto& xs = mu.support();
    const auto& ws = mu.weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double target = cdf(xs[i]);
      sup = std::max(sup, std::abs(target - cum));
      cum += ws[i];
      sup = std::max(sup, std::abs(target - cum));
    }
    return sup;
  }
  const CdfEvaluator ev(mu);
  const auto& e = mu.edges();
  for (std::size_t i = 0; i < e.size(); ++i) {
    sup = std::max(sup, std::abs(cdf(e[i]) - ev.at(e[i])));
    if (i + 1 < e.size()) {
      const double mid = 0.5 * (e[i] + e[i + 1]);
      sup = std::max(sup, std::abs(cdf(mid) - ev.at(mid)));
    }
  }
  return sup;
}

double d1_lower_bound(const SpectralMeasure& a, const SpectralMeasure& b, int grid_points) {
  if (grid_points < 2) throw ConfigError("d1_lower_bound: need at least two grid points");
  const double lo = std::min(a.min_support(), b.min_support());
  const double hi = std::max(a.max_support(), b.max_support());
  if (!(hi > lo)) return 0.0;
  const std::size_t k = std::size_t(grid_points);
  std::vector<double> grid(k);
  for (std::size_t i = 0; i < k; ++i) {
    grid[i] = lo + (hi - lo) * double(i) / double(k - 1);
  }
  // Candidate functions are piecewise linear with knots on the grid,
  // nondecreasing (or nonincreasing via the sign flip below), with
  // Lip(f) <= lambda and sup|f| <= 1 - lambda for a slope split lambda.
  // With equal total masses the base level drops out and the increment
  // r_i over [g_i, g_{i+1}] contributes r_i * int ramp_i d(a - b),
  // subject to 0 <= r_i <= lambda * delta_i and sum r_i <= 2 (1 - lambda).
  std::vector<double> coeff(k - 1), delta(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    delta[i] = grid[i + 1] - grid[i];
    coeff[i] = ramp_integral(a, grid[i], grid[i + 1]) - ramp_integral(b, grid[i], grid[i + 1]);
  }
  std::vector<std::size_t> order(k - 1);
  double best = 0.0;
  for (int sign = -1; sign <= 1; sign += 2) {
    // Restart from index order with a stable sort so swapping the arguments
    // (which negates every coefficient exactly) replays the identical
    // allocation sequence and the bound is symmetric to the last bit.
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
      return sign * coeff[p] > sign * coeff[q];
    });
    constexpr int kLambdaSteps = 256;
    for (int step = 0; step <= kLambdaSteps; ++step) {
      const double lambda = double(step) / double(kLambdaSteps);
      double budget = 2.0 * (1.0 - lambda);
      double value = 0.0;
      for (std::size_t i : order) {
        const double c = sign * coeff[i];
        if (c <= 0.0 || budget <= 0.0) break;
        const double r = std::min(lambda * delta[i], budget);
        value += r * c;
        budget -= r;
      }
      best = std::max(best, value);
    }
  }
  return best;
}

double semicircle_density(double sigma, double x) {
  if (!(sigma > 0.0)) throw ConfigError("semicircle_density: sigma must be > 0");
  constexpr double kPi = 3.14159265358979323846;
  const double r2 = 4.0 * sigma * sigma - x * x;
  return r2 <= 0.0 ? 0.0 : std::sqrt(r2) / (2.0 * kPi * sigma * sigma);
}

double semicircle_cdf(double sigma, double x) {
  if (!(sigma > 0.0)) throw ConfigError("semicircle_cdf: sigma must be > 0");
  constexpr double kPi = 3.14159265358979323846;
  const double r = 2.0 * sigma;
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + x * std::sqrt(r * r - x * x) / (4.0 * kPi * sigma * sigma) +
         std::asin(x / r) / kPi;
}

std::vector<TestFunction> tv_function_catalog() {
  std::vector<TestFunction> fns;
  fns.push_back({"gauss_bump", [](double x) { return 0.5 * std::exp(-0.5 * x * x); }});
  fns.push_back({"cauchy_bump", [](double x) { return 0.5 / (1.0 + x * x); }});
  fns.push_back(
      {"shifted_bump", [](double x) { return 0.5 * std::exp(-(x - 1.0) * (x - 1.0)); }});
  fns.push_back(
      {"sine_packet", [](double x) { return 0.35 * std::sin(x) * std::exp(-std::abs(x)); }});
  return fns;
}

ConcentrationReport concentration_probe(const LevyCharacteristics& chars, int n,
                                        const std::string& function_name, int reps,
                                        std::uint64_t seed) {
  if (n < 2) throw ConfigError("concentration_probe: n must be >= 2");
  if (reps < 2) throw ConfigError("concentration_probe: reps must be >= 2");
  const auto catalog = tv_function_catalog();
  const TestFunction* fn = nullptr;
  for (const auto& cand : catalog) {
    if (cand.name == function_name) fn = &cand;
  }
  if (fn == nullptr) throw ConfigError("concentration_probe: unknown function " + function_name);

  const EntryLaw law = build_entry_law(chars, n, default_epsilon(chars, n));
  std::vector<double> values(static_cast<std::size_t>(reps));
  parallel::for_each_index(std::size_t(reps), [&](std::size_t r) {
    const std::uint64_t rep_seed =
        rng::derive_key(rng::derive_key(seed, rng::kTagConcentration), std::uint64_t(r));
    const SpectralMeasure mu = esd(sample_matrix(law, rep_seed));
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.support().size(); ++i) {
      acc += mu.weights()[i] * fn->f(mu.support()[i]);
    }
    values[r] = acc;
  });

  ConcentrationReport report;
  report.function_name = function_name;
  report.n = n;
  report.reps = reps;
  const double mean = stats::mean_stderr(values).mean;
  report.mean = mean;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  report.variance = var / double(reps - 1);
  report.levels = {0.05, 0.1, 0.2};
  for (double t : report.levels) {
    long hits = 0;
    for (double v : values) {
      if (std::abs(v - mean) >= t) ++hits;
    }
    const double observed = double(hits) / double(reps);
    const double envelope = 2.0 * std::exp(-double(n) * t * t / 2.0);
    report.observed.push_back(observed);
    report.envelope.push_back(envelope);
    const double slack =
        3.0 * std::sqrt(std::max(envelope * (1.0 - envelope), 0.0) / double(reps)) +
        3.0 / double(reps);
    if (observed > std::min(envelope, 1.0) + slack) report.within_envelope = false;
  }
  return report;
}

std::vector<double> support_sup_trend(const LevyCharacteristics& chars,
                                      const std::vector<int>& ns, std::uint64_t seed) {
  std::vector<double> sups;
  sups.reserve(ns.size());
  for (int n : ns) {
    const EntryLaw law = build_entry_law(chars, n, default_epsilon(chars, n));
    const std::uint64_t n_seed =
        rng::derive_key(rng::derive_key(seed, rng::kTagStage), std::uint64_t(n));
    const SpectralMeasure mu = esd(sample_matrix(law, n_seed));
    sups.push_back(std::max(std::abs(mu.min_support()), std::abs(mu.max_support())));
  }
  return sups;
}

}  // namespace levyspec
