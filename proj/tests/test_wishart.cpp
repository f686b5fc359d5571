#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "levyspec/errors.hpp"
#include "levyspec/wishart.hpp"

namespace {

using namespace levyspec;

TEST_SUITE_BEGIN("wishart");

TEST_CASE("off-diagonal draws fill a seeded square matrix") {
  const auto chars = LevyCharacteristics::wigner(1.0);
  const EntryLaw law = build_entry_law(chars, 40, 0.0);
  const Eigen::MatrixXd m = sample_nonhermitian(law, 42);
  REQUIRE(m.rows() == 40);
  REQUIRE(m.cols() == 40);
  CHECK(m.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() > 0.0);

  const Eigen::MatrixXd same = sample_nonhermitian(law, 42);
  CHECK(m == same);
  const Eigen::MatrixXd other = sample_nonhermitian(law, 43);
  CHECK(m != other);

  const double entries = 40.0 * 39.0;
  const double mean = m.sum() / entries;
  const double var = m.squaredNorm() / entries - mean * mean;
  CHECK(std::abs(mean) < 0.016);
  CHECK(std::abs(var - 1.0 / 40.0) < 0.004);
}

TEST_CASE("the doubled embedding reproduces known singular values") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = -2.0;
  const auto sv = singular_value_esd(a, true);
  // Singular values are exactly {2, 3}; the eigensolver reports them to
  // rounding, so compare at the measure level instead of atom identity.
  CHECK(sv.positive.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sv.positive.min_support() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sv.positive.max_support() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sv.positive.moment(1) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(sv.positive.moment(2) == doctest::Approx(6.5).epsilon(1e-12));
  CHECK(sv.symmetrized.min_support() == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(sv.symmetrized.max_support() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sv.symmetrized.moment(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sv.symmetrized.moment(2) == doctest::Approx(6.5).epsilon(1e-12));
  CHECK(sv.symmetrized.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kolmogorov_distance(sv.symmetrized, sv.symmetrized.reflected()) <= 1e-12);
}

TEST_CASE("the svd cross-check accepts random ensembles") {
  const auto chars = LevyCharacteristics::sparse(5.0);
  const EntryLaw law = build_entry_law(chars, 30, 0.5);
  const Eigen::MatrixXd m = sample_nonhermitian(law, 9);
  const auto sv = singular_value_esd(m, true);  // throws if embedding and SVD disagree
  CHECK(sv.positive.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sv.positive.min_support() >= 0.0);
  CHECK(sv.positive.moment(2) ==
        doctest::Approx(m.squaredNorm() / 30.0).epsilon(1e-10));
  CHECK(sv.symmetrized.moment(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sv.symmetrized.moment(2) == doctest::Approx(sv.positive.moment(2)).epsilon(1e-12));

  CHECK_THROWS_AS((void)singular_value_esd(Eigen::MatrixXd::Zero(2, 3)), ConfigError);
  CHECK_THROWS_AS((void)singular_value_esd(Eigen::MatrixXd()), ConfigError);
}

TEST_CASE("squaring transports a symmetric atom law") {
  const auto mu = SpectralMeasure::from_atoms({-2.0, -1.0, 1.0, 2.0},
                                              {0.25, 0.25, 0.25, 0.25});
  const auto squared = wishart_lsd_map(mu);
  REQUIRE(squared.support() == std::vector<double>{1.0, 4.0});
  CHECK(squared.weights()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(squared.weights()[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(squared.moment(1) == doctest::Approx(mu.moment(2)).epsilon(1e-12));
  CHECK(squared.moment(2) == doctest::Approx(mu.moment(4)).epsilon(1e-12));

  const auto point = wishart_lsd_map(SpectralMeasure::from_atoms({0.0}, {1.0}));
  CHECK(point.support() == std::vector<double>{0.0});
  CHECK(point.total_mass() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)wishart_lsd_map(SpectralMeasure::from_atoms({1.0}, {1.0})),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)wishart_lsd_map(SpectralMeasure::from_histogram({-1.0, 0.0, 1.0}, {0.5, 0.5})),
      ConfigError);
}

TEST_CASE("singular squares agree with the symmetrized moments end to end") {
  const auto chars = LevyCharacteristics::wigner(2.0);
  const EntryLaw law = build_entry_law(chars, 24, 0.0);
  const Eigen::MatrixXd m = sample_nonhermitian(law, 15);
  const auto sv = singular_value_esd(m, true);
  const auto squares = wishart_lsd_map(sv.symmetrized);
  CHECK(squares.min_support() >= 0.0);
  CHECK(squares.moment(1) == doctest::Approx(sv.positive.moment(2)).epsilon(1e-10));
  CHECK(squares.moment(2) == doctest::Approx(sv.positive.moment(4)).epsilon(1e-10));
}

TEST_SUITE_END();

}  // namespace
