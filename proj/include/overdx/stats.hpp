#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace overdx {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string method;  // exact | normal-approx | chi-square | chi-square-yates
};

// Two-sided Mann-Whitney/Wilcoxon rank-sum. Exact distribution when
// min(|xs|,|ys|) <= 10 and there are no ties; otherwise normal approximation
// with tie-corrected variance and 0.5 continuity correction. The statistic is
// U on the exact path and z on the approximate path.
TestResult wilcoxon_rank_sum(const std::vector<double>& xs,
                             const std::vector<double>& ys);

// 2x2 chi-square test of equal proportions; Yates continuity correction by
// default, clamped at zero.
TestResult two_proportion_test(std::int64_t k1, std::int64_t n1,
                               std::int64_t k2, std::int64_t n2,
                               bool continuity = true);

// survival function of the chi-square distribution with 1 df
double chi_square_sf_1df(double x);

// upper-tail probability of the standard normal
double normal_sf(double z);

}  // namespace overdx
