#pragma once

// Independent oracles for the production algorithms under test. These stay
// definition-level (plain enumeration) on purpose and must not share code
// with the implementation paths they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "overdx/repeats.hpp"

namespace oracle {

// Maximal repeats by direct substring enumeration: a pattern qualifies when
// it occurs at least twice and neither its left- nor right-context multiset
// is constant. Boundary/delimiter contexts get unique negative ids so they
// differ from everything.
inline std::vector<overdx::MaximalRepeat> maximal_repeats(
    const std::vector<int>& seq) {
  const int n = static_cast<int>(seq.size());
  std::map<std::vector<int>, std::int64_t> found;
  for (int len = 1; len <= n; ++len) {
    for (int start = 0; start + len <= n; ++start) {
      std::vector<int> pattern(seq.begin() + start, seq.begin() + start + len);
      if (found.count(pattern)) continue;
      std::vector<int> positions;
      for (int p = 0; p + len <= n; ++p) {
        if (std::equal(pattern.begin(), pattern.end(), seq.begin() + p))
          positions.push_back(p);
      }
      if (positions.size() < 2) continue;
      std::vector<int> left, right;
      int unique_id = -1000;
      for (int p : positions) {
        left.push_back(p == 0 ? unique_id-- : seq[p - 1]);
        right.push_back(p + len == n ? unique_id-- : seq[p + len]);
      }
      bool left_constant =
          std::all_of(left.begin(), left.end(),
                      [&](int c) { return c == left.front(); });
      bool right_constant =
          std::all_of(right.begin(), right.end(),
                      [&](int c) { return c == right.front(); });
      if (left_constant || right_constant) continue;
      found[pattern] = static_cast<std::int64_t>(positions.size());
    }
  }
  std::vector<overdx::MaximalRepeat> out;
  for (const auto& [pattern, count] : found)
    out.push_back({pattern, count});
  std::sort(out.begin(), out.end());
  return out;
}

// Same definition on the delimited concatenation of several sequences.
inline std::vector<overdx::MaximalRepeat> log_repeats(
    const std::vector<std::vector<int>>& seqs) {
  std::vector<int> text;
  int sentinel = -1;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    text.insert(text.end(), seqs[i].begin(), seqs[i].end());
    if (i + 1 < seqs.size()) text.push_back(sentinel--);
  }
  // repeats cannot contain a sentinel (each is unique), so enumerating on
  // the concatenation and dropping sentinel-containing patterns matches the
  // per-boundary-context definition
  auto all = maximal_repeats(text);
  std::vector<overdx::MaximalRepeat> out;
  for (auto& r : all) {
    bool clean = std::all_of(r.pattern.begin(), r.pattern.end(),
                             [](int s) { return s >= 0; });
    if (clean) out.push_back(std::move(r));
  }
  return out;
}

// Exact two-sided Wilcoxon rank-sum p by explicit combination enumeration
// (tie-free integer data assumed).
inline double wilcoxon_exact_p(const std::vector<double>& xs,
                               const std::vector<double>& ys) {
  const std::size_t n = xs.size(), N = n + ys.size();
  std::vector<double> all(xs);
  all.insert(all.end(), ys.begin(), ys.end());
  std::vector<double> sorted(all);
  std::sort(sorted.begin(), sorted.end());
  double w_obs = 0.0;
  for (double x : xs)
    w_obs += static_cast<double>(
        std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin() + 1);
  const double mean = static_cast<double>(n) * (N + 1) / 2.0;
  const double dev = std::abs(w_obs - mean);

  std::int64_t extreme = 0, total = 0;
  std::vector<std::size_t> comb(n);
  for (std::size_t i = 0; i < n; ++i) comb[i] = i;
  for (;;) {
    double w = 0.0;
    for (std::size_t i : comb) w += static_cast<double>(i + 1);
    ++total;
    if (std::abs(w - mean) >= dev - 1e-9) ++extreme;
    // next combination of {0..N-1} choose n
    std::size_t k = n;
    while (k > 0 && comb[k - 1] == N - n + k - 1) --k;
    if (k == 0) break;
    ++comb[k - 1];
    for (std::size_t j = k; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace oracle
