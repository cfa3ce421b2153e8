#include "overdx/repeats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "overdx/error.hpp"

namespace overdx {

ActivityIndex ActivityIndex::from_vocabulary(const std::set<std::string>& vocab) {
  ActivityIndex idx;
  idx.names_.assign(vocab.begin(), vocab.end());  // set iterates sorted
  for (int i = 0; i < static_cast<int>(idx.names_.size()); ++i)
    idx.ids_[idx.names_[i]] = i;
  return idx;
}

int ActivityIndex::id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end())
    throw ValidationError("activity not in vocabulary: \"" + name + "\"");
  return it->second;
}

std::vector<int> ActivityIndex::encode(
    const std::vector<std::string>& activities) const {
  std::vector<int> out;
  out.reserve(activities.size());
  for (const auto& a : activities) out.push_back(id(a));
  return out;
}

namespace {

// suffix array by prefix doubling; text values may be arbitrary ints
std::vector<int> build_suffix_array(const std::vector<int>& text) {
  const int n = static_cast<int>(text.size());
  std::vector<int> sa(n), rank(n), tmp(n);
  std::iota(sa.begin(), sa.end(), 0);

  {
    std::vector<int> sorted(text);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (int i = 0; i < n; ++i)
      rank[i] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), text[i]) -
          sorted.begin());
  }

  for (int k = 1;; k *= 2) {
    auto cmp = [&](int a, int b) {
      if (rank[a] != rank[b]) return rank[a] < rank[b];
      int ra = a + k < n ? rank[a + k] : -1;
      int rb = b + k < n ? rank[b + k] : -1;
      return ra < rb;
    };
    std::sort(sa.begin(), sa.end(), cmp);
    tmp[sa[0]] = 0;
    for (int i = 1; i < n; ++i)
      tmp[sa[i]] = tmp[sa[i - 1]] + (cmp(sa[i - 1], sa[i]) ? 1 : 0);
    rank = tmp;
    if (rank[sa[n - 1]] == n - 1) break;
  }
  return sa;
}

// Kasai: lcp[i] = lcp(suffix sa[i-1], suffix sa[i]) for i in [1, n)
std::vector<int> build_lcp(const std::vector<int>& text,
                           const std::vector<int>& sa) {
  const int n = static_cast<int>(text.size());
  std::vector<int> rank(n), lcp(n, 0);
  for (int i = 0; i < n; ++i) rank[sa[i]] = i;
  int h = 0;
  for (int i = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    int j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && text[i + h] == text[j + h]) ++h;
    lcp[rank[i]] = h;
    if (h > 0) --h;
  }
  return lcp;
}

bool is_sentinel(int symbol) { return symbol < 0; }

// Right-maximal repeats are exactly the lcp-intervals of depth >= 1; the
// unique sentinels make end-of-sequence contexts branch like any other.
std::vector<MaximalRepeat> repeats_of_text(const std::vector<int>& text) {
  const int n = static_cast<int>(text.size());
  std::vector<MaximalRepeat> out;
  if (n < 2) return out;
  auto sa = build_suffix_array(text);
  auto lcp = build_lcp(text, sa);

  auto report = [&](int depth, int lb, int rb) {
    if (depth < 1 || rb - lb + 1 < 2) return;
    // left-maximal iff left contexts are not all the same symbol; a boundary
    // or delimiter context is unique by construction
    bool maximal = false;
    int first_left = -2;  // -2 = unset
    for (int j = lb; j <= rb && !maximal; ++j) {
      int p = sa[j];
      if (p == 0 || is_sentinel(text[p - 1])) {
        maximal = true;  // unique context differs from every other
      } else if (first_left == -2) {
        first_left = text[p - 1];
      } else if (text[p - 1] != first_left) {
        maximal = true;
      }
    }
    if (!maximal) return;
    MaximalRepeat r;
    r.pattern.assign(text.begin() + sa[lb], text.begin() + sa[lb] + depth);
    r.occurrence_count = rb - lb + 1;
    out.push_back(std::move(r));
  };

  struct Open {
    int depth;
    int lb;
  };
  std::vector<Open> stack{{0, 0}};
  for (int i = 1; i <= n; ++i) {
    int cur = i < n ? lcp[i] : 0;
    int lb = i - 1;
    while (cur < stack.back().depth) {
      Open node = stack.back();
      stack.pop_back();
      report(node.depth, node.lb, i - 1);
      lb = node.lb;
    }
    if (cur > stack.back().depth) stack.push_back({cur, lb});
  }

  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<MaximalRepeat> maximal_repeats(const std::vector<int>& sequence) {
  if (sequence.empty()) return {};
  std::vector<int> text(sequence);
  text.push_back(-1);  // end sentinel
  return repeats_of_text(text);
}

std::vector<MaximalRepeat> log_repeats(
    const std::vector<std::vector<int>>& sequences) {
  std::vector<int> text;
  int sentinel = -1;
  for (const auto& seq : sequences) {
    text.insert(text.end(), seq.begin(), seq.end());
    text.push_back(sentinel--);
  }
  if (text.empty()) return {};
  return repeats_of_text(text);
}

FeatureBasis build_basis(const std::vector<MaximalRepeat>& repeats) {
  std::map<std::vector<int>, std::vector<std::vector<int>>> by_alphabet;
  for (const auto& r : repeats) {
    std::vector<int> alphabet(r.pattern);
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()),
                   alphabet.end());
    by_alphabet[alphabet].push_back(r.pattern);
  }
  std::vector<std::pair<std::vector<int>, std::vector<std::vector<int>>>>
      entries(by_alphabet.begin(), by_alphabet.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  FeatureBasis basis;
  for (auto& [alphabet, members] : entries) {
    std::sort(members.begin(), members.end());
    basis.classes.push_back(std::move(alphabet));
    basis.class_members.push_back(std::move(members));
  }
  return basis;
}

std::int64_t count_occurrences(const std::vector<int>& sequence,
                               const std::vector<int>& pattern) {
  if (pattern.empty() || pattern.size() > sequence.size()) return 0;
  std::int64_t count = 0;
  for (std::size_t i = 0; i + pattern.size() <= sequence.size(); ++i) {
    if (std::equal(pattern.begin(), pattern.end(), sequence.begin() + i))
      ++count;
  }
  return count;
}

std::vector<double> vectorize(const std::vector<int>& sequence,
                              const FeatureBasis& basis) {
  std::vector<double> values;
  values.reserve(basis.classes.size());
  for (const auto& members : basis.class_members) {
    std::int64_t total = 0;
    for (const auto& pattern : members)
      total += count_occurrences(sequence, pattern);
    values.push_back(static_cast<double>(total));
  }
  return values;
}

double euclidean(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size())
    throw ValidationError("euclidean: dimension mismatch (" +
                          std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = u[i] - v[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace overdx
