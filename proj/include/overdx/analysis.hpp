#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "overdx/eventlog.hpp"
#include "overdx/stats.hpp"

namespace overdx {

struct ClusterOutcomeSummary {
  int cluster_id = 0;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
  double pos_share = 0.0;
  bool tests_applicable = false;  // both outcome groups non-empty
  TestResult sofa_test;
  TestResult mortality_test;
  std::int64_t deaths_pos = 0;
  std::int64_t deaths_neg = 0;
  // descriptive only; proportions per group sum to 1 when non-empty
  std::map<std::string, double> discharge_pos;
  std::map<std::string, double> discharge_neg;
};

struct FlagRule {
  double max_pos_share = 0.5;
  std::int64_t min_pos = 10;
  double alpha = 0.05;
  bool continuity = true;  // Yates correction for the proportion test
};

struct OverdiagnosisReport {
  std::vector<ClusterOutcomeSummary> summaries;
  std::vector<int> flagged_cluster_ids;
  std::vector<std::string> flagged_case_ids;  // sorted
  std::int64_t count = 0;
  std::int64_t total_positive = 0;  // clusters + residual
  double rate = 0.0;
  std::int64_t residual_cases = 0;
  std::int64_t residual_positive = 0;
};

ClusterOutcomeSummary summarize_cluster(int cluster_id,
                                        const std::vector<std::string>& case_ids,
                                        const AttributeMap& attrs,
                                        bool continuity = true);

std::vector<int> flag_candidates(
    const std::vector<ClusterOutcomeSummary>& summaries, const FlagRule& rule);

// `cluster_cases[i]` = case ids of cluster i; residual cases are excluded
// from flagging but counted in the rate denominator.
OverdiagnosisReport overdiagnosis_report(
    const std::vector<std::vector<std::string>>& cluster_cases,
    const std::vector<std::string>& residual_cases, const AttributeMap& attrs,
    const FlagRule& rule = {});

}  // namespace overdx
