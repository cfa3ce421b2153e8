#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "overdx/error.hpp"
#include "overdx/stats.hpp"

using namespace overdx;

TEST_CASE("wilcoxon fixtures") {
  // identical tied groups force z = 0
  TestResult tied = wilcoxon_rank_sum({1, 2, 3}, {1, 2, 3});
  CHECK(tied.method == "normal-approx");
  CHECK(tied.statistic == 0.0);
  CHECK(tied.p_value == 1.0);

  TestResult exact = wilcoxon_rank_sum({1, 2}, {3, 4});
  CHECK(exact.method == "exact");
  CHECK(exact.p_value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(wilcoxon_rank_sum({}, {1}), ValidationError);
}

TEST_CASE("exact path equals the enumeration oracle, approx is close") {
  std::mt19937 rng(13);
  int done = 0;
  while (done < 120) {
    std::size_t n = 1 + rng() % 7, m = 1 + rng() % 7;
    // tie-free integers
    std::set<int> pool;
    while (pool.size() < n + m) pool.insert(static_cast<int>(rng() % 1000));
    std::vector<double> xs, ys;
    for (int v : pool) (xs.size() < n ? xs : ys).push_back(v);
    TestResult r = wilcoxon_rank_sum(xs, ys);
    REQUIRE(r.method == "exact");
    double want = oracle::wilcoxon_exact_p(xs, ys);
    CHECK(r.p_value == want);
    ++done;
  }
}

TEST_CASE("large samples take the normal approximation") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(i * 2);
    ys.push_back(i * 2 + 1);
  }
  TestResult r = wilcoxon_rank_sum(xs, ys);
  CHECK(r.method == "normal-approx");
  CHECK(r.p_value > 0.5);
}

TEST_CASE("wilcoxon symmetry and shift sensitivity") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> xs(3 + rng() % 10), ys(3 + rng() % 10);
    for (double& v : xs) v = static_cast<double>(rng() % 40);
    for (double& v : ys) v = static_cast<double>(rng() % 40);
    CHECK(wilcoxon_rank_sum(xs, ys).p_value ==
          doctest::Approx(wilcoxon_rank_sum(ys, xs).p_value).epsilon(1e-12));
  }
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<double> b = a;
  for (double& v : b) v += 1000.0;
  CHECK(wilcoxon_rank_sum(a, b).p_value < 1e-4);
}

TEST_CASE("two-proportion fixtures") {
  TestResult equal = two_proportion_test(5, 10, 5, 10);
  CHECK(equal.statistic == 0.0);
  CHECK(equal.p_value == 1.0);

  TestResult plain = two_proportion_test(30, 100, 10, 100, false);
  CHECK(plain.method == "chi-square");
  CHECK(plain.statistic == doctest::Approx(12.5).epsilon(1e-12));

  TestResult yates = two_proportion_test(30, 100, 10, 100, true);
  CHECK(yates.method == "chi-square-yates");
  CHECK(yates.statistic == doctest::Approx(11.28125).epsilon(1e-12));

  CHECK_THROWS_AS(two_proportion_test(1, 0, 1, 2), ValidationError);
  CHECK_THROWS_AS(two_proportion_test(3, 2, 1, 2), ValidationError);
}

TEST_CASE("proportion test symmetry and Yates never exceeds uncorrected") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 60; ++trial) {
    std::int64_t n1 = 1 + rng() % 50, n2 = 1 + rng() % 50;
    std::int64_t k1 = rng() % (n1 + 1), k2 = rng() % (n2 + 1);
    TestResult ab = two_proportion_test(k1, n1, k2, n2);
    TestResult ba = two_proportion_test(k2, n2, k1, n1);
    CHECK(ab.statistic == doctest::Approx(ba.statistic).epsilon(1e-12));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    TestResult plain = two_proportion_test(k1, n1, k2, n2, false);
    CHECK(ab.statistic <= plain.statistic + 1e-12);
  }
}

TEST_CASE("chi-square survival function of 1 df") {
  // chi2_1 is a squared standard normal
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0, 50.0}) {
    double want = 2.0 * normal_sf(std::sqrt(x));
    CHECK(chi_square_sf_1df(x) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(chi_square_sf_1df(0.0) == 1.0);
  CHECK(chi_square_sf_1df(3.841458820694124) == doctest::Approx(0.05).epsilon(1e-9));
}
