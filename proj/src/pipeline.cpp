#include "overdx/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "overdx/csv.hpp"
#include "overdx/error.hpp"

namespace overdx {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::vector<std::string>& known,
                    const std::string& where) {
  if (!obj.is_object())
    throw ConfigError("config: \"" + where + "\" must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for \"") + key + "\"");
    }
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  RunConfig config;
  reject_unknown(doc, {"clustering", "mining", "cohort", "flag_rule",
                       "classifier", "seed", "threads", "strict_vocab"},
                 "document root");

  if (doc.contains("clustering")) {
    const json& c = doc.at("clustering");
    reject_unknown(c, {"target_fitness", "max_clusters", "min_cluster_size",
                       "window", "sampling"},
                   "clustering");
    read_field(c, "target_fitness", config.clustering.target_fitness);
    read_field(c, "max_clusters", config.clustering.max_clusters);
    read_field(c, "min_cluster_size", config.clustering.min_cluster_size);
    read_field(c, "window", config.clustering.window);
    if (c.contains("sampling")) {
      std::string s = c.at("sampling").get<std::string>();
      if (s == "frequency") config.clustering.sampling = Sampling::Frequency;
      else if (s == "distance") config.clustering.sampling = Sampling::Distance;
      else throw ConfigError("config: sampling must be frequency|distance");
    }
  }
  if (doc.contains("mining")) {
    const json& m = doc.at("mining");
    reject_unknown(m, {"dependency_threshold", "min_pair_observations"},
                   "mining");
    read_field(m, "dependency_threshold",
               config.clustering.mining.dependency_threshold);
    read_field(m, "min_pair_observations",
               config.clustering.mining.min_pair_observations);
  }
  if (doc.contains("cohort")) {
    const json& c = doc.at("cohort");
    reject_unknown(c, {"min_distinct", "strict_missing_attrs"}, "cohort");
    read_field(c, "min_distinct", config.cohort.min_distinct);
    read_field(c, "strict_missing_attrs", config.cohort.strict_missing_attrs);
  }
  if (doc.contains("flag_rule")) {
    const json& f = doc.at("flag_rule");
    reject_unknown(f, {"max_pos_share", "min_pos", "alpha", "continuity"},
                   "flag_rule");
    read_field(f, "max_pos_share", config.flag_rule.max_pos_share);
    read_field(f, "min_pos", config.flag_rule.min_pos);
    read_field(f, "alpha", config.flag_rule.alpha);
    read_field(f, "continuity", config.flag_rule.continuity);
  }
  if (doc.contains("classifier")) {
    const json& c = doc.at("classifier");
    reject_unknown(c, {"rounds", "learning_rate", "select_k", "folds"},
                   "classifier");
    read_field(c, "rounds", config.classifier.rounds);
    read_field(c, "learning_rate", config.classifier.learning_rate);
    read_field(c, "select_k", config.select_k);
    read_field(c, "folds", config.folds);
  }
  read_field(doc, "seed", config.seed);
  read_field(doc, "threads", config.clustering.threads);
  read_field(doc, "strict_vocab", config.strict_vocab);
  return config;
}

json run_config_to_json(const RunConfig& config) {
  json doc;
  doc["clustering"] = {
      {"target_fitness", config.clustering.target_fitness},
      {"max_clusters", config.clustering.max_clusters},
      {"min_cluster_size", config.clustering.min_cluster_size},
      {"window", config.clustering.window},
      {"sampling", config.clustering.sampling == Sampling::Distance
                       ? "distance"
                       : "frequency"},
  };
  doc["mining"] = {
      {"dependency_threshold", config.clustering.mining.dependency_threshold},
      {"min_pair_observations", config.clustering.mining.min_pair_observations},
  };
  doc["cohort"] = {
      {"min_distinct", config.cohort.min_distinct},
      {"strict_missing_attrs", config.cohort.strict_missing_attrs},
  };
  doc["flag_rule"] = {
      {"max_pos_share", config.flag_rule.max_pos_share},
      {"min_pos", config.flag_rule.min_pos},
      {"alpha", config.flag_rule.alpha},
      {"continuity", config.flag_rule.continuity},
  };
  doc["classifier"] = {
      {"rounds", config.classifier.rounds},
      {"learning_rate", config.classifier.learning_rate},
      {"select_k", config.select_k},
      {"folds", config.folds},
  };
  doc["seed"] = config.seed;
  doc["threads"] = config.clustering.threads;
  doc["strict_vocab"] = config.strict_vocab;
  return doc;
}

ClusteringArtifacts run_clustering(const EventLog& filtered_log,
                                   const ClusteringConfig& config) {
  ClusteringArtifacts art;
  art.trace_variants = variants(filtered_log);
  art.index = ActivityIndex::from_vocabulary(filtered_log.vocabulary);

  std::vector<std::vector<int>> sequences;
  for (const TraceVariant& v : art.trace_variants) {
    VariantSeq seq;
    seq.activities = art.index.encode(v.activities);
    seq.frequency = v.frequency;
    sequences.push_back(seq.activities);
    art.seqs.push_back(std::move(seq));
  }
  art.basis = build_basis(log_repeats(sequences));
  art.vectors.reserve(sequences.size());
  for (const auto& s : sequences) art.vectors.push_back(vectorize(s, art.basis));

  DirectlyFollowsEvaluator evaluator(config.mining);
  art.result = cluster(art.seqs, config, evaluator, art.vectors);
  return art;
}

std::vector<std::vector<std::string>> cluster_case_ids(
    const ClusteringArtifacts& artifacts) {
  std::vector<std::vector<std::string>> out;
  for (const Cluster& c : artifacts.result.clusters) {
    std::vector<std::string> ids;
    for (std::size_t v : c.member_indices) {
      const auto& members = artifacts.trace_variants[v].member_case_ids;
      ids.insert(ids.end(), members.begin(), members.end());
    }
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  return out;
}

std::vector<std::string> residual_case_ids(
    const ClusteringArtifacts& artifacts) {
  std::vector<std::string> ids;
  for (std::size_t v : artifacts.result.residual_indices) {
    const auto& members = artifacts.trace_variants[v].member_case_ids;
    ids.insert(ids.end(), members.begin(), members.end());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string assignments_csv(const ClusteringArtifacts& artifacts) {
  std::vector<std::pair<std::string, std::string>> rows;
  auto clusters = cluster_case_ids(artifacts);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (const auto& cid : clusters[i]) rows.emplace_back(cid, std::to_string(i));
  }
  for (const auto& cid : residual_case_ids(artifacts))
    rows.emplace_back(cid, "residual");
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out << "case_id,cluster_id\n";
  for (const auto& [cid, cl] : rows) out << csv::join({cid, cl}) << "\n";
  return out.str();
}

std::map<std::string, std::string> parse_assignments_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("empty assignments csv");
  if (rows[0].fields != std::vector<std::string>{"case_id", "cluster_id"})
    throw ValidationError("assignments csv must have header case_id,cluster_id");
  std::map<std::string, std::string> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != 2)
      throw ValidationError("ragged row at line " +
                            std::to_string(row.line_number));
    if (!out.emplace(row.fields[0], row.fields[1]).second)
      throw ValidationError("duplicate case_id \"" + row.fields[0] +
                            "\" in assignments csv");
  }
  return out;
}

namespace {

json test_to_json(const TestResult& t, bool applicable) {
  json out;
  out["applicable"] = applicable;
  if (applicable) {
    out["statistic"] = t.statistic;
    out["p_value"] = t.p_value;
    out["method"] = t.method;
  }
  return out;
}

}  // namespace

json report_to_json(const OverdiagnosisReport& report, const RunConfig& config,
                    const std::map<std::string, std::string>& digests,
                    const FilterStats* filter_stats) {
  json doc;
  doc["config"] = run_config_to_json(config);
  doc["inputs"] = json::object();
  for (const auto& [name, digest] : digests) doc["inputs"][name] = digest;
  if (filter_stats) {
    doc["cohort_filter"] = {
        {"kept_positive", filter_stats->kept_positive},
        {"kept_negative", filter_stats->kept_negative},
        {"dropped_label_mismatch", filter_stats->dropped_label_mismatch},
        {"dropped_short", filter_stats->dropped_short},
        {"dropped_missing_attrs", filter_stats->dropped_missing_attrs},
    };
  }
  doc["clusters"] = json::array();
  for (const auto& s : report.summaries) {
    json c;
    c["cluster_id"] = s.cluster_id;
    c["n_pos"] = s.n_pos;
    c["n_neg"] = s.n_neg;
    c["pos_share"] = s.pos_share;
    c["deaths_pos"] = s.deaths_pos;
    c["deaths_neg"] = s.deaths_neg;
    c["sofa_test"] = test_to_json(s.sofa_test, s.tests_applicable);
    c["mortality_test"] = test_to_json(s.mortality_test, s.tests_applicable);
    c["discharge_pos"] = s.discharge_pos;
    c["discharge_neg"] = s.discharge_neg;
    c["flagged"] = std::find(report.flagged_cluster_ids.begin(),
                             report.flagged_cluster_ids.end(),
                             s.cluster_id) != report.flagged_cluster_ids.end();
    doc["clusters"].push_back(std::move(c));
  }
  doc["residual"] = {
      {"n_cases", report.residual_cases},
      {"n_pos", report.residual_positive},
  };
  doc["flagged_cluster_ids"] = report.flagged_cluster_ids;
  doc["flagged_case_ids"] = report.flagged_case_ids;
  doc["count"] = report.count;
  doc["total_positive"] = report.total_positive;
  // denominator = positives of the clustering cohort, clusters + residual
  doc["rate"] = report.rate;
  return doc;
}

std::string report_text_summary(const OverdiagnosisReport& report) {
  std::ostringstream out;
  out << "clusters analysed: " << report.summaries.size() << "\n";
  out << "residual cases: " << report.residual_cases << " ("
      << report.residual_positive << " positive)\n";
  out << "flagged clusters:";
  if (report.flagged_cluster_ids.empty()) out << " none";
  for (int id : report.flagged_cluster_ids) out << " " << id;
  out << "\n";
  out << "potential overdiagnosis cases: " << report.count << " of "
      << report.total_positive << " positives (rate " << report.rate << ")\n";
  return out.str();
}

std::string report_cluster_csv(const OverdiagnosisReport& report) {
  std::ostringstream out;
  out << "cluster_id,n_pos,n_neg,pos_share,deaths_pos,deaths_neg,"
         "sofa_p,mortality_p,flagged\n";
  for (const auto& s : report.summaries) {
    bool flagged = std::find(report.flagged_cluster_ids.begin(),
                             report.flagged_cluster_ids.end(),
                             s.cluster_id) != report.flagged_cluster_ids.end();
    out << s.cluster_id << "," << s.n_pos << "," << s.n_neg << ","
        << s.pos_share << "," << s.deaths_pos << "," << s.deaths_neg << ",";
    if (s.tests_applicable)
      out << s.sofa_test.p_value << "," << s.mortality_test.p_value;
    else
      out << "na,na";
    out << "," << (flagged ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace overdx
