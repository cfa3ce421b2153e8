#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "overdx/repeats.hpp"

namespace overdx {

// A variant reduced to its encoded activity sequence and trace count.
struct VariantSeq {
  std::vector<int> activities;
  std::int64_t frequency = 1;
};

struct MiningParams {
  double dependency_threshold = 0.5;  // in [0,1)
  std::int64_t min_pair_observations = 1;
};

// Directly-follows model: transitions kept after dependency filtering plus
// the observed start/end activity sets.
struct ProcessModel {
  std::set<std::pair<int, int>> edges;
  std::set<int> starts;
  std::set<int> ends;
  std::map<std::pair<int, int>, std::int64_t> pair_counts;  // all observed

  double dependency(int a, int b) const;
  bool has_edge(int a, int b) const { return edges.count({a, b}) > 0; }
};

ProcessModel mine(const std::vector<VariantSeq>& variants,
                  const MiningParams& params = {});

// n+1 checks for a trace of length n: first activity in starts, each
// consecutive pair an edge, last activity in ends.
double replay_fitness(const std::vector<int>& activities,
                      const ProcessModel& model);

// frequency-weighted mean of replay_fitness
double log_fitness(const std::vector<VariantSeq>& variants,
                   const ProcessModel& model);

void write_dot(const ProcessModel& model, const ActivityIndex& names,
               std::ostream& out, const std::string& title = "");

}  // namespace overdx
