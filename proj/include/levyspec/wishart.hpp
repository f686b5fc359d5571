#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "levyspec/ensemble.hpp"
#include "levyspec/spectral.hpp"

namespace levyspec {

struct SingularValueMeasure {
  SpectralMeasure positive;     // singular values, weights 1/n
  SpectralMeasure symmetrized;  // half weight at +-s
};

// Square matrix with i.i.d. off-diagonal entries (no symmetry), zero diagonal.
Eigen::MatrixXd sample_nonhermitian(const EntryLaw& law, std::uint64_t seed);

// Singular values through the doubled symmetric embedding; when verify_svd
// is set the result is cross-checked against a direct SVD to 1e-10.
SingularValueMeasure singular_value_esd(const Eigen::MatrixXd& a, bool verify_svd = true);

// Pushforward of a symmetric atomic measure under x -> x^2.
SpectralMeasure wishart_lsd_map(const SpectralMeasure& mu);

}  // namespace levyspec
