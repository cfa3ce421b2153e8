#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "overdx/eventlog.hpp"

namespace overdx {

// Activities interned to dense ids; ids follow lexicographic name order so
// id-sequence comparisons agree with name-sequence comparisons.
class ActivityIndex {
 public:
  static ActivityIndex from_vocabulary(const std::set<std::string>& vocab);

  int id(const std::string& name) const;  // throws on unknown name
  const std::string& name(int id) const { return names_.at(id); }
  int size() const { return static_cast<int>(names_.size()); }

  std::vector<int> encode(const std::vector<std::string>& activities) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
};

struct MaximalRepeat {
  std::vector<int> pattern;  // length >= 1
  std::int64_t occurrence_count = 0;

  bool operator==(const MaximalRepeat&) const = default;
  auto operator<=>(const MaximalRepeat&) const = default;
};

// Maximal repeats of one sequence; boundaries act as unique sentinels.
// Occurrences may overlap. Result sorted by pattern.
std::vector<MaximalRepeat> maximal_repeats(const std::vector<int>& sequence);

// Repeats of the delimited concatenation of all sequences (unique delimiter
// between consecutive sequences, so no repeat spans a boundary).
std::vector<MaximalRepeat> log_repeats(
    const std::vector<std::vector<int>>& sequences);

struct FeatureBasis {
  // one class per distinct repeat alphabet; cardinality asc, then
  // lexicographic on the sorted symbol set
  std::vector<std::vector<int>> classes;
  std::vector<std::vector<std::vector<int>>> class_members;  // repeat patterns
};

FeatureBasis build_basis(const std::vector<MaximalRepeat>& repeats);

std::vector<double> vectorize(const std::vector<int>& sequence,
                              const FeatureBasis& basis);

double euclidean(const std::vector<double>& u, const std::vector<double>& v);

// overlapping occurrence count of pattern in sequence
std::int64_t count_occurrences(const std::vector<int>& sequence,
                               const std::vector<int>& pattern);

}  // namespace overdx
