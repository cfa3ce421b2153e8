#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "overdx/actitrac.hpp"
#include "overdx/analysis.hpp"
#include "overdx/classifier.hpp"
#include "overdx/eventlog.hpp"
#include "overdx/repeats.hpp"

namespace overdx {

// The structured run configuration behind `--config`. Unknown keys anywhere
// in the document are rejected.
struct RunConfig {
  ClusteringConfig clustering;
  FilterPolicy cohort;
  bool strict_vocab = false;
  FlagRule flag_rule;
  GbmParams classifier;
  std::size_t select_k = 13;
  int folds = 5;
  std::uint64_t seed = 1;
};

RunConfig parse_run_config(const nlohmann::json& doc);
nlohmann::json run_config_to_json(const RunConfig& config);

struct ClusteringArtifacts {
  std::vector<TraceVariant> trace_variants;  // canonical order
  ActivityIndex index;
  std::vector<VariantSeq> seqs;
  FeatureBasis basis;
  std::vector<std::vector<double>> vectors;
  ClusteringResult result;
};

// variants -> MRA features -> active clustering
ClusteringArtifacts run_clustering(const EventLog& filtered_log,
                                   const ClusteringConfig& config);

// case ids per cluster, in cluster order; residual separately
std::vector<std::vector<std::string>> cluster_case_ids(
    const ClusteringArtifacts& artifacts);
std::vector<std::string> residual_case_ids(const ClusteringArtifacts& artifacts);

// `case_id,cluster_id` rows; residual cases get cluster_id "residual"
std::string assignments_csv(const ClusteringArtifacts& artifacts);
std::map<std::string, std::string> parse_assignments_csv(std::istream& in);

nlohmann::json report_to_json(const OverdiagnosisReport& report,
                              const RunConfig& config,
                              const std::map<std::string, std::string>& digests,
                              const FilterStats* filter_stats = nullptr);

std::string report_text_summary(const OverdiagnosisReport& report);
std::string report_cluster_csv(const OverdiagnosisReport& report);

}  // namespace overdx
