#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "levyspec/errors.hpp"
#include "levyspec/moments.hpp"
#include "levyspec/parallel.hpp"

namespace {

using namespace levyspec;

LevyCharacteristics mixed_example() {
  // Gaussian sigma^2 = 1 on top of the two-atom measure with total rate 2.
  auto chars = LevyCharacteristics::sparse(2.0);
  chars.sigma2 = 1.0;
  return chars;
}

TEST_SUITE_BEGIN("moments");

TEST_CASE("catalan numbers are exact up to the 64-bit ceiling") {
  const std::uint64_t expected[] = {1, 1, 2, 5, 14, 42, 132, 429};
  for (int p = 0; p < 8; ++p) CHECK(catalan(p) == expected[p]);
  CHECK(catalan(30) == 3814986502092304ull);
  CHECK_NOTHROW((void)catalan(36));
  CHECK_THROWS_AS((void)catalan(37), NumericError);
  CHECK_THROWS_AS((void)catalan(-1), ConfigError);
}

TEST_CASE("block-count partition numbers match the classical table") {
  CHECK(stirling2_even(1, 1) == 1);
  CHECK(stirling2_even(1, 2) == 1);
  CHECK(stirling2_even(2, 1) == 1);
  CHECK(stirling2_even(2, 2) == 7);
  CHECK(stirling2_even(2, 3) == 6);
  CHECK(stirling2_even(2, 4) == 1);
  CHECK(stirling2_even(3, 2) == 31);
  CHECK(stirling2_even(3, 3) == 90);
  CHECK(stirling2_even(4, 2) == 127);
  CHECK(stirling2_even(4, 3) == 966);
  CHECK(stirling2_even(4, 4) == 1701);
  // Row sums give the Bell numbers.
  std::uint64_t bell4 = 0, bell6 = 0;
  for (int l = 1; l <= 4; ++l) bell4 += stirling2_even(2, l);
  for (int l = 1; l <= 6; ++l) bell6 += stirling2_even(3, l);
  CHECK(bell4 == 15);
  CHECK(bell6 == 203);
  CHECK_THROWS_AS((void)stirling2_even(0, 1), ConfigError);
  CHECK_THROWS_AS((void)stirling2_even(2, 5), ConfigError);
  CHECK_THROWS_AS((void)stirling2_even(13, 1), NumericError);
}

TEST_CASE("integer partitions enumerate once each, largest part first") {
  CHECK(enumerate_Qp(1) == std::vector<std::vector<int>>{{1}});
  const auto q4 = enumerate_Qp(4);
  const std::vector<std::vector<int>> expected4 = {
      {4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  CHECK(q4 == expected4);
  const std::size_t counts[] = {1, 2, 3, 5, 7, 11};
  for (int p = 1; p <= 6; ++p) CHECK(enumerate_Qp(p).size() == counts[p - 1]);
  CHECK_THROWS_AS((void)enumerate_Qp(0), ConfigError);
}

TEST_CASE("tree-and-partition counts match an independent enumeration") {
  // Frozen by a from-scratch brute force over bracket sequences and
  // restricted growth strings, entirely outside this code base.
  CHECK(count_colored_trees({1}) == 1);
  CHECK(count_colored_trees({1, 1}) == 2);
  CHECK(count_colored_trees({2}) == 1);
  CHECK(count_colored_trees({1, 1, 1}) == 5);
  CHECK(count_colored_trees({2, 1}) == 6);
  CHECK(count_colored_trees({3}) == 1);
  CHECK(count_colored_trees({1, 1, 1, 1}) == 14);
  CHECK(count_colored_trees({2, 1, 1}) == 28);
  CHECK(count_colored_trees({2, 2}) == 6);
  CHECK(count_colored_trees({3, 1}) == 8);
  CHECK(count_colored_trees({4}) == 1);
  CHECK(count_colored_trees({1, 1, 1, 1, 1}) == 42);
  CHECK(count_colored_trees({2, 1, 1, 1}) == 120);
  CHECK(count_colored_trees({2, 2, 1}) == 65);
  CHECK(count_colored_trees({3, 1, 1}) == 45);
  CHECK(count_colored_trees({3, 2}) == 20);
  CHECK(count_colored_trees({4, 1}) == 10);
  CHECK(count_colored_trees({5}) == 1);
  CHECK(count_colored_trees({1, 1, 1, 1, 1, 1}) == 132);
  CHECK(count_colored_trees({2, 1, 1, 1, 1}) == 495);
  CHECK(count_colored_trees({2, 2, 1, 1}) == 462);
  CHECK(count_colored_trees({2, 2, 2}) == 57);
  CHECK(count_colored_trees({3, 1, 1, 1}) == 220);
  CHECK(count_colored_trees({3, 2, 1}) == 252);
  CHECK(count_colored_trees({3, 3}) == 20);
  CHECK(count_colored_trees({4, 1, 1}) == 66);
  CHECK(count_colored_trees({4, 2}) == 30);
  CHECK(count_colored_trees({5, 1}) == 12);
  CHECK(count_colored_trees({6}) == 1);
}

TEST_CASE("tree-count structure: singleton rows are catalan, single blocks unique") {
  for (int p = 1; p <= 6; ++p) {
    CHECK(count_colored_trees(std::vector<int>(std::size_t(p), 1)) == catalan(p));
    CHECK(count_colored_trees({p}) == 1);
  }
  const auto table = colored_tree_table(4);
  CHECK(table.size() == 5);
  for (const auto& q : enumerate_Qp(4)) {
    std::vector<int> key = q;
    CHECK(table.count(key) == 1);
  }
  CHECK_THROWS_AS((void)count_colored_trees({}), ConfigError);
  CHECK_THROWS_AS((void)count_colored_trees({1, 2}), ConfigError);
  CHECK_THROWS_AS((void)count_colored_trees({0}), ConfigError);
  CHECK_THROWS_AS((void)count_colored_trees({9}), NumericError);
  CHECK_THROWS_AS((void)colored_tree_table(9), NumericError);
}

TEST_CASE("gaussian-only limit moments are catalan times the variance power") {
  const auto one = LevyCharacteristics::wigner(1.0);
  const auto two = LevyCharacteristics::wigner(2.0);
  CHECK(lsd_moment(one, 0) == 1.0);
  for (int p = 1; p <= 6; ++p) {
    CHECK(lsd_moment(one, p) == double(catalan(p)));
    CHECK(lsd_moment(two, p) == double(catalan(p)) * std::pow(2.0, p));
  }
}

TEST_CASE("two-atom limit moments match the frozen integer table") {
  const auto c2 = LevyCharacteristics::sparse(2.0);
  const auto c5 = LevyCharacteristics::sparse(5.0);
  const double expect2[] = {2, 10, 66, 506, 4266, 38450};
  const double expect5[] = {5, 55, 780, 12605, 220755, 4084055};
  for (int p = 1; p <= 6; ++p) {
    CHECK(lsd_moment(c2, p) == expect2[p - 1]);
    CHECK(lsd_moment(c5, p) == expect5[p - 1]);
  }
}

TEST_CASE("mixed gaussian-plus-atom moments match the frozen table") {
  const auto mixed = mixed_example();
  CHECK(lsd_moment(mixed, 1) == 3.0);
  CHECK(lsd_moment(mixed, 2) == 20.0);
  CHECK(lsd_moment(mixed, 3) == 173.0);
  CHECK(lsd_moment(mixed, 5) == 18418.0);
  CHECK(lsd_moment(mixed, 6) == 209872.0);
}

TEST_CASE("divergent and degenerate inputs propagate through the moments") {
  CHECK(std::isinf(lsd_moment(LevyCharacteristics::stable(1.5), 1)));
  CHECK(std::isinf(lsd_moment(LevyCharacteristics::stable(0.8), 2)));
  LevyCharacteristics degenerate;  // sigma^2 = 0, no jumps: point mass at zero
  for (int p = 1; p <= 4; ++p) CHECK(lsd_moment(degenerate, p) == 0.0);
  CHECK_THROWS_AS((void)lsd_moment(LevyCharacteristics::wigner(1.0), -1), ConfigError);
}

TEST_CASE("closed-form moment bound dominates the exact moments") {
  const auto wig = LevyCharacteristics::wigner(1.0);
  CHECK(moment_bound(1.0, wig, 2) == 16.0);  // 2 * (S(4,1) + S(4,2)) with K = 1
  const auto c2 = LevyCharacteristics::sparse(2.0);
  CHECK(moment_bound(1.0, c2, 1) == 2.0);  // tight at p = 1
  for (int p = 1; p <= 6; ++p) {
    CHECK(moment_bound(1.0, wig, p) >= lsd_moment(wig, p));
    CHECK(moment_bound(1.0, c2, p) >= lsd_moment(c2, p));
    CHECK(moment_bound(1.0, LevyCharacteristics::sparse(5.0), p) >=
          lsd_moment(LevyCharacteristics::sparse(5.0), p));
    CHECK(moment_bound(1.0, mixed_example(), p) >= lsd_moment(mixed_example(), p));
  }
  // Larger tau only loosens the bound.
  CHECK(moment_bound(2.0, c2, 3) > moment_bound(1.0, c2, 3));
  CHECK(std::isinf(moment_bound(1.0, LevyCharacteristics::stable(1.5), 2)));
  CHECK_THROWS_AS((void)moment_bound(0.0, wig, 2), ConfigError);
  CHECK_THROWS_AS((void)moment_bound(1.0, wig, 0), ConfigError);
}

TEST_CASE("moment sequences of genuine measures pass the hankel test") {
  CHECK(lsd_moment_vector(LevyCharacteristics::wigner(1.0), 6).hankel_psd());
  CHECK(lsd_moment_vector(LevyCharacteristics::sparse(2.0), 6).hankel_psd());
  CHECK(lsd_moment_vector(LevyCharacteristics::sparse(5.0), 6).hankel_psd());
  CHECK(lsd_moment_vector(mixed_example(), 6).hankel_psd());

  MomentVector impossible;
  impossible.values = {1.0, 0.5, 0.1};  // M4 < M2^2 violates Cauchy-Schwarz
  CHECK_FALSE(impossible.hankel_psd());

  MomentVector infinite;
  infinite.values = {1.0, kInf};
  CHECK_THROWS_AS((void)infinite.hankel_psd(), NumericError);
  MomentVector empty;
  CHECK_THROWS_AS((void)empty.hankel_psd(), ConfigError);
}

TEST_CASE("moment vectors agree with the scalar evaluations") {
  const auto mv = lsd_moment_vector(LevyCharacteristics::sparse(5.0), 4);
  REQUIRE(mv.p_max() == 4);
  CHECK(mv.values[0] == 1.0);
  for (int p = 0; p <= 4; ++p) {
    CHECK(mv.values[std::size_t(p)] == lsd_moment(LevyCharacteristics::sparse(5.0), p));
  }
}

TEST_CASE("trace powers reduce to eigenvalue sums") {
  Eigen::MatrixXd flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  CHECK(trace_moment(flip, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trace_moment(flip, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_moment(flip, 3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_moment(Eigen::MatrixXd::Zero(4, 4), 2) == 0.0);
  CHECK_THROWS_AS((void)trace_moment(Eigen::MatrixXd::Zero(2, 3), 2), ConfigError);
  CHECK_THROWS_AS((void)trace_moment(flip, -1), ConfigError);
}

TEST_CASE("monte carlo trace moments approach the entry-law expectation") {
  // E[(1/n) tr M^2] = (n-1) E[entry^2] exactly at finite n.
  const auto est = trace_moment_mc(LevyCharacteristics::sparse(5.0), 100, 2, 40, 31);
  CHECK(est.reps == 40);
  CHECK(est.se > 0.0);
  CHECK(est.estimate == doctest::Approx(4.95).epsilon(0.05));

  const auto wig = trace_moment_mc(LevyCharacteristics::wigner(1.0), 200, 2, 30, 32);
  CHECK(wig.estimate == doctest::Approx(0.995).epsilon(0.1));

  CHECK_THROWS_AS((void)trace_moment_mc(LevyCharacteristics::wigner(1.0), 50, 2, 0, 1),
                  ConfigError);
}

TEST_CASE("monte carlo trace moments are reproducible across thread counts") {
  parallel::set_thread_count(1);
  const auto serial = trace_moment_mc(LevyCharacteristics::sparse(4.0), 60, 4, 12, 9);
  parallel::set_thread_count(3);
  const auto threaded = trace_moment_mc(LevyCharacteristics::sparse(4.0), 60, 4, 12, 9);
  parallel::set_thread_count(1);
  CHECK(serial.estimate == threaded.estimate);
  CHECK(serial.se == threaded.se);
}

TEST_SUITE_END();

}  // namespace
