#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "overdx/eventlog.hpp"

namespace overdx {

struct OutcomeDistribution {
  double sofa_mean = 4.0;
  double sofa_sd = 2.0;
  double mortality = 0.08;
};

struct FamilyTemplate {
  std::vector<std::string> sequence;  // linear activity template
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
};

struct PlantedOverdx {
  int family = 0;
  std::int64_t n_tp_cases = 25;  // drawn from the family's positives
};

struct SynthConfig {
  std::vector<FamilyTemplate> families;
  PlantedOverdx planted;
  double noise_rate = 0.05;  // probability of one insertion/swap per trace
  std::uint64_t seed = 1;
  OutcomeDistribution negative_outcomes{4.0, 2.0, 0.08};
  OutcomeDistribution positive_outcomes{9.0, 3.0, 0.30};
};

struct PlantedTruth {
  std::map<std::string, int> family_of;
  std::set<std::string> overdiagnosed_case_ids;
};

struct SynthOutput {
  std::vector<Event> events;  // flat event stream, case-major
  EventLog log;
  AttributeMap attrs;
  PlantedTruth truth;
};

// 4 families over the 13-activity vocabulary, ~1,200 traces, 25 planted
// overdiagnosed TP cases in a negative-dominated family.
SynthConfig default_synth_config(std::uint64_t seed = 1);

SynthOutput generate(const SynthConfig& config);

void write_truth_csv(const PlantedTruth& truth, std::ostream& out);

}  // namespace overdx
