#include "overdx/stats.hpp"

#include <algorithm>
#include <cmath>

#include "overdx/error.hpp"

namespace overdx {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi_square_sf_1df(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

namespace {

// midranks of the combined sample, aligned to (xs then ys)
std::vector<double> midranks(const std::vector<double>& combined) {
  const std::size_t n = combined.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return combined[a] < combined[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && combined[order[j + 1]] == combined[order[i]]) ++j;
    double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

bool has_ties(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) != values.end();
}

// Exact null distribution of the rank-sum of the smaller group: number of
// n-subsets of ranks {1..N} with each possible sum. Counts fit __int128 for
// any size this pipeline sees.
TestResult wilcoxon_exact(std::int64_t w_x, std::size_t n, std::size_t N) {
  const std::int64_t max_w = static_cast<std::int64_t>(n) * N;
  std::vector<std::vector<unsigned __int128>> dp(
      n + 1, std::vector<unsigned __int128>(max_w + 1, 0));
  dp[0][0] = 1;
  for (std::size_t r = 1; r <= N; ++r) {
    for (std::size_t c = std::min(n, r); c >= 1; --c) {
      std::int64_t lo = static_cast<std::int64_t>(r);
      for (std::int64_t w = max_w; w >= lo; --w) {
        dp[c][w] += dp[c - 1][w - r];
      }
    }
  }
  // two-sided: mass at least as far from the mean, in doubled units so
  // half-integer means stay exact
  const std::int64_t mean2 = static_cast<std::int64_t>(n) * (N + 1);
  const std::int64_t dev2 = std::llabs(2 * w_x - mean2);
  unsigned __int128 extreme = 0, total = 0;
  for (std::int64_t w = 0; w <= max_w; ++w) {
    total += dp[n][w];
    if (std::llabs(2 * w - mean2) >= dev2) extreme += dp[n][w];
  }
  TestResult result;
  result.statistic = static_cast<double>(w_x) -
                     static_cast<double>(n) * (n + 1) / 2.0;  // U
  result.p_value = static_cast<double>(static_cast<long double>(extreme) /
                                       static_cast<long double>(total));
  result.method = "exact";
  return result;
}

}  // namespace

TestResult wilcoxon_rank_sum(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  if (xs.empty() || ys.empty())
    throw ValidationError("wilcoxon_rank_sum: empty group");
  const std::size_t n = xs.size(), m = ys.size(), N = n + m;

  std::vector<double> combined(xs);
  combined.insert(combined.end(), ys.begin(), ys.end());
  std::vector<double> ranks = midranks(combined);

  double w_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) w_x += ranks[i];

  const bool ties = has_ties(combined);
  if (!ties && std::min(n, m) <= 10) {
    if (n <= m) return wilcoxon_exact(std::llround(w_x), n, N);
    // enumerate the smaller group; p is symmetric under group swap
    double w_y = static_cast<double>(N) * (N + 1) / 2.0 - w_x;
    TestResult r = wilcoxon_exact(std::llround(w_y), m, N);
    r.statistic = w_x - static_cast<double>(n) * (n + 1) / 2.0;
    return r;
  }

  // normal approximation with tie correction and continuity correction
  const double mean = static_cast<double>(n) * (N + 1) / 2.0;
  double tie_sum = 0.0;
  {
    std::vector<double> sorted(combined);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      double t = static_cast<double>(j - i + 1);
      tie_sum += t * t * t - t;
      i = j + 1;
    }
  }
  double var = static_cast<double>(n) * m / 12.0 *
               (static_cast<double>(N + 1) -
                tie_sum / (static_cast<double>(N) * (N - 1)));
  TestResult result;
  result.method = "normal-approx";
  if (var <= 0.0) {
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  double dev = std::max(0.0, std::abs(w_x - mean) - 0.5);
  double z = dev / std::sqrt(var);
  result.statistic = z;
  result.p_value = std::min(1.0, 2.0 * normal_sf(z));
  return result;
}

TestResult two_proportion_test(std::int64_t k1, std::int64_t n1,
                               std::int64_t k2, std::int64_t n2,
                               bool continuity) {
  if (n1 < 1 || n2 < 1)
    throw ValidationError("two_proportion_test: zero-size group");
  if (k1 < 0 || k1 > n1 || k2 < 0 || k2 > n2)
    throw ValidationError("two_proportion_test: k out of [0,n]");

  const double a = static_cast<double>(k1);
  const double b = static_cast<double>(n1 - k1);
  const double c = static_cast<double>(k2);
  const double d = static_cast<double>(n2 - k2);
  const double N = a + b + c + d;

  TestResult result;
  result.method = continuity ? "chi-square-yates" : "chi-square";
  const double denom = (a + b) * (c + d) * (a + c) * (b + d);
  if (denom == 0.0) {
    // both proportions 0 or both 1
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  double diff = std::abs(a * d - b * c);
  if (continuity) diff = std::max(0.0, diff - N / 2.0);
  result.statistic = N * diff * diff / denom;
  result.p_value = chi_square_sf_1df(result.statistic);
  return result;
}

}  // namespace overdx
