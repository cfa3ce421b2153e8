#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "overdx/procmodel.hpp"

namespace overdx {

enum class Sampling { Frequency, Distance };

struct ClusteringConfig {
  double target_fitness = 0.95;     // in [0,1]
  int max_clusters = 24;
  std::int64_t min_cluster_size = 4;  // counted in traces (summed frequencies)
  double window = 0.5;              // in (0,1]
  Sampling sampling = Sampling::Distance;
  MiningParams mining;
  int threads = 1;
};

// Abstraction point for the model family driving acceptance decisions; the
// default mines a directly-follows model and replays against it.
class FitnessEvaluator {
 public:
  virtual ~FitnessEvaluator() = default;
  virtual ProcessModel mine(const std::vector<VariantSeq>& variants) const = 0;
  virtual double trace_fitness(const std::vector<int>& activities,
                               const ProcessModel& model) const = 0;
  virtual double log_fitness(const std::vector<VariantSeq>& variants,
                             const ProcessModel& model) const = 0;
};

class DirectlyFollowsEvaluator final : public FitnessEvaluator {
 public:
  explicit DirectlyFollowsEvaluator(MiningParams params = {})
      : params_(params) {}
  ProcessModel mine(const std::vector<VariantSeq>& variants) const override {
    return overdx::mine(variants, params_);
  }
  double trace_fitness(const std::vector<int>& activities,
                       const ProcessModel& model) const override {
    return replay_fitness(activities, model);
  }
  double log_fitness(const std::vector<VariantSeq>& variants,
                     const ProcessModel& model) const override {
    return overdx::log_fitness(variants, model);
  }

 private:
  MiningParams params_;
};

struct Cluster {
  int id = 0;
  std::vector<std::size_t> member_indices;  // into the input variant order
  ProcessModel model;
  double fitness = 0.0;
};

struct ClusteringResult {
  std::vector<Cluster> clusters;
  std::vector<std::size_t> residual_indices;
};

// Three-phase active trace clustering. `variants` must be in canonical order
// (frequency descending, lexicographic ascending) and `vectors` aligned to it.
ClusteringResult cluster(const std::vector<VariantSeq>& variants,
                         const ClusteringConfig& config,
                         const FitnessEvaluator& evaluator,
                         const std::vector<std::vector<double>>& vectors);

}  // namespace overdx
