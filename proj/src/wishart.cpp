#include "levyspec/wishart.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "levyspec/errors.hpp"
#include "levyspec/parallel.hpp"
#include "levyspec/rng.hpp"

namespace levyspec {

Eigen::MatrixXd sample_nonhermitian(const EntryLaw& law, std::uint64_t seed) {
  const int n = law.n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  parallel::for_each_index(std::size_t(n), [&](std::size_t i) {
    rng::Stream stream(seed, {rng::kTagNonHermRow, std::uint64_t(i)});
    for (int j = 0; j < n; ++j) {
      if (int(i) != j) m(int(i), j) = law.sample(stream);
    }
  });
  return m;
}

SingularValueMeasure singular_value_esd(const Eigen::MatrixXd& a, bool verify_svd) {
  const int n = int(a.rows());
  if (n == 0 || a.cols() != n) throw ConfigError("singular_value_esd: matrix must be square");
  const SpectralMeasure doubled = esd(hermitize(a));

  // Eigenvalues of the embedding are +-s_k; fold onto [0, inf).
  std::vector<double> folded;
  std::vector<double> weights;
  for (std::size_t i = 0; i < doubled.support().size(); ++i) {
    folded.push_back(std::abs(doubled.support()[i]));
    weights.push_back(doubled.weights()[i]);
  }
  SpectralMeasure positive = SpectralMeasure::from_atoms(std::move(folded), std::move(weights));

  if (verify_svd) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    // Each singular value appears twice among the embedding eigenvalues.
    std::vector<double> direct;
    direct.reserve(std::size_t(2) * std::size_t(n));
    for (int i = 0; i < n; ++i) {
      direct.push_back(svd.singularValues()(i));
      direct.push_back(svd.singularValues()(i));
    }
    std::sort(direct.begin(), direct.end());
    std::vector<double> via_embedding;
    via_embedding.reserve(direct.size());
    for (std::size_t i = 0; i < positive.support().size(); ++i) {
      const long copies = std::lround(positive.weights()[i] * 2.0 * n);
      for (long c = 0; c < copies; ++c) via_embedding.push_back(positive.support()[i]);
    }
    std::sort(via_embedding.begin(), via_embedding.end());
    if (via_embedding.size() != direct.size()) {
      throw NumericError("singular_value_esd: embedding multiplicity mismatch");
    }
    const double scale = std::max(1.0, direct.back());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      if (std::abs(direct[i] - via_embedding[i]) > 1e-10 * scale) {
        throw NumericError("singular_value_esd: embedding disagrees with direct SVD");
      }
    }
  }

  SingularValueMeasure out;
  out.symmetrized = average_measures({positive, positive.reflected()});
  out.positive = std::move(positive);
  return out;
}

SpectralMeasure wishart_lsd_map(const SpectralMeasure& mu) {
  if (!mu.atomic()) {
    throw ConfigError("wishart_lsd_map: atomic measures only");
  }
  // Require symmetry under x -> -x before squaring.
  if (kolmogorov_distance(mu, mu.reflected()) > 1e-9) {
    throw ConfigError("wishart_lsd_map: input measure is not symmetric");
  }
  std::vector<double> xs, ws;
  for (std::size_t i = 0; i < mu.support().size(); ++i) {
    xs.push_back(mu.support()[i] * mu.support()[i]);
    ws.push_back(mu.weights()[i]);
  }
  return SpectralMeasure::from_atoms(std::move(xs), std::move(ws));
}

}  // namespace levyspec
