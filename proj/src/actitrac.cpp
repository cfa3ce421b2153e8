#include "overdx/actitrac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "overdx/error.hpp"
#include "overdx/parallel.hpp"
#include "overdx/repeats.hpp"

namespace overdx {

namespace {

void validate(const ClusteringConfig& config,
              const std::vector<VariantSeq>& variants,
              const std::vector<std::vector<double>>& vectors) {
  if (config.target_fitness < 0.0 || config.target_fitness > 1.0)
    throw ConfigError("target_fitness must be in [0,1]");
  if (config.max_clusters < 0)
    throw ConfigError("max_clusters must be non-negative");
  if (config.min_cluster_size < 1)
    throw ConfigError("min_cluster_size must be positive");
  if (config.window <= 0.0 || config.window > 1.0)
    throw ConfigError("window must be in (0,1]");
  if (config.threads < 1) throw ConfigError("threads must be positive");
  if (config.sampling == Sampling::Distance &&
      vectors.size() != variants.size())
    throw ConfigError("vectors must align with variants");
}

double mean_distance_to_members(const std::vector<double>& candidate,
                                const std::vector<std::size_t>& members,
                                const std::vector<std::vector<double>>& vectors) {
  double sum = 0.0;
  for (std::size_t m : members) sum += euclidean(candidate, vectors[m]);
  return sum / static_cast<double>(members.size());
}

}  // namespace

ClusteringResult cluster(const std::vector<VariantSeq>& variants,
                         const ClusteringConfig& config,
                         const FitnessEvaluator& evaluator,
                         const std::vector<std::vector<double>>& vectors) {
  validate(config, variants, vectors);

  ClusteringResult result;
  if (variants.empty()) return result;

  // canonical order = input order; unassigned stays sorted by index
  std::vector<std::size_t> unassigned(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) unassigned[i] = i;
  std::vector<std::size_t> residual_pool;

  auto seqs_of = [&](const std::vector<std::size_t>& indices) {
    std::vector<VariantSeq> seqs;
    seqs.reserve(indices.size());
    for (std::size_t i : indices) seqs.push_back(variants[i]);
    return seqs;
  };

  while (static_cast<int>(result.clusters.size()) < config.max_clusters &&
         !unassigned.empty()) {
    const std::size_t seed = unassigned.front();
    std::vector<std::size_t> members{seed};
    ProcessModel model = evaluator.mine({variants[seed]});

    // Phase 1: selective sampling over a window frozen at cluster start.
    const std::size_t remaining = unassigned.size() - 1;
    const std::size_t window_size = static_cast<std::size_t>(
        std::ceil(config.window * static_cast<double>(remaining)));
    std::vector<std::size_t> window(unassigned.begin() + 1,
                                    unassigned.begin() + 1 + window_size);
    std::vector<bool> examined(window.size(), false);
    std::size_t n_examined = 0;

    while (n_examined < window.size()) {
      std::size_t pick = window.size();
      if (config.sampling == Sampling::Frequency) {
        for (std::size_t w = 0; w < window.size(); ++w) {
          if (!examined[w]) {
            pick = w;
            break;
          }
        }
      } else {
        // distances are per-candidate slots, so the argmin scan below is
        // identical for any thread count
        std::vector<double> dist(window.size(),
                                 std::numeric_limits<double>::infinity());
        parallel_for(window.size(), config.threads, [&](std::size_t w) {
          if (!examined[w])
            dist[w] = mean_distance_to_members(vectors[window[w]], members,
                                               vectors);
        });
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < window.size(); ++w) {
          if (!examined[w] && dist[w] < best) {
            best = dist[w];
            pick = w;
          }
        }
      }
      const std::size_t candidate = window[pick];
      examined[pick] = true;
      ++n_examined;

      // accept iff the candidate replays on the current model and the
      // re-mined model keeps whole-cluster fitness at target
      if (evaluator.trace_fitness(variants[candidate].activities, model) <
          config.target_fitness)
        continue;
      std::vector<std::size_t> tentative(members);
      tentative.push_back(candidate);
      ProcessModel remined = evaluator.mine(seqs_of(tentative));
      if (evaluator.log_fitness(seqs_of(tentative), remined) >=
          config.target_fitness) {
        members = std::move(tentative);
        model = std::move(remined);
      }
    }

    // Phase 2: look-ahead with the phase-1 model frozen.
    {
      std::vector<std::size_t> candidates;
      for (std::size_t i : unassigned) {
        if (std::find(members.begin(), members.end(), i) == members.end())
          candidates.push_back(i);
      }
      std::vector<char> fits(candidates.size(), 0);
      parallel_for(candidates.size(), config.threads, [&](std::size_t c) {
        fits[c] = evaluator.trace_fitness(variants[candidates[c]].activities,
                                          model) >= config.target_fitness;
      });
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (fits[c]) members.push_back(candidates[c]);
      }
    }

    // Phase 3: dissolve clusters that miss the size or fitness bar; the seed
    // is exiled so the loop always shrinks the unassigned set.
    std::int64_t trace_count = 0;
    for (std::size_t i : members) trace_count += variants[i].frequency;
    const double final_fitness = evaluator.log_fitness(seqs_of(members), model);
    if (trace_count < config.min_cluster_size ||
        final_fitness < config.target_fitness) {
      residual_pool.push_back(seed);
      unassigned.erase(std::find(unassigned.begin(), unassigned.end(), seed));
    } else {
      std::sort(members.begin(), members.end());
      Cluster c;
      c.id = static_cast<int>(result.clusters.size());
      c.fitness = final_fitness;
      c.model = std::move(model);
      c.member_indices = members;
      result.clusters.push_back(std::move(c));
      std::vector<std::size_t> rest;
      rest.reserve(unassigned.size() - members.size());
      for (std::size_t i : unassigned) {
        if (!std::binary_search(members.begin(), members.end(), i))
          rest.push_back(i);
      }
      unassigned = std::move(rest);
    }
  }

  result.residual_indices = std::move(residual_pool);
  result.residual_indices.insert(result.residual_indices.end(),
                                 unassigned.begin(), unassigned.end());
  std::sort(result.residual_indices.begin(), result.residual_indices.end());
  return result;
}

}  // namespace overdx
