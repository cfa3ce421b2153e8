#include "overdx/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "overdx/csv.hpp"
#include "overdx/digest.hpp"
#include "overdx/error.hpp"
#include "overdx/pipeline.hpp"
#include "overdx/procmodel.hpp"
#include "overdx/synth.hpp"

namespace overdx {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool debug_log() {
  const char* env = std::getenv("OVERDX_LOG");
  return env && std::string(env) == "debug";
}

void log_debug(const std::string& msg) {
  if (debug_log()) std::cerr << "[overdx] " << msg << "\n";
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << content;
}

struct CommonOpts {
  std::string config_path;
  std::string events_path;
  std::string attrs_path;
  std::string predictions_path;
  std::string out_path;
  bool xes = false;
  bool emit_csv = false;
  bool strict_vocab = false;
  int threads = 0;  // 0 = from config
};

RunConfig load_config(const CommonOpts& opts) {
  RunConfig config;
  if (!opts.config_path.empty()) {
    std::ifstream in = open_input(opts.config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    config = parse_run_config(doc);
  }
  if (opts.threads > 0) config.clustering.threads = opts.threads;
  if (opts.strict_vocab) config.strict_vocab = true;
  return config;
}

EventLog load_events(const CommonOpts& opts, const RunConfig& config) {
  if (opts.events_path.empty())
    throw ValidationError("--events is required");
  std::ifstream in = open_input(opts.events_path);
  if (opts.xes) return parse_xes(in);
  return parse_event_csv(in, {},
                         config.strict_vocab ? VocabPolicy::Strict
                                             : VocabPolicy::Extend);
}

AttributeMap load_attrs(const CommonOpts& opts) {
  if (opts.attrs_path.empty())
    throw ValidationError("--attrs is required");
  std::ifstream in = open_input(opts.attrs_path);
  AttributeMap attrs = parse_attrs_csv(in);
  if (!opts.predictions_path.empty()) {
    std::ifstream pin = open_input(opts.predictions_path);
    auto preds = import_predictions(pin);
    for (auto& [cid, attr] : attrs) {
      auto it = preds.find(cid);
      if (it != preds.end()) attr.y_pred = it->second.second;
    }
  }
  return attrs;
}

std::map<std::string, std::string> input_digests(const CommonOpts& opts) {
  std::map<std::string, std::string> out;
  if (!opts.events_path.empty()) out["events"] = digest_file(opts.events_path);
  if (!opts.attrs_path.empty()) out["attrs"] = digest_file(opts.attrs_path);
  if (!opts.predictions_path.empty())
    out["predictions"] = digest_file(opts.predictions_path);
  if (!opts.config_path.empty()) out["config"] = digest_file(opts.config_path);
  return out;
}

int cmd_ingest(const CommonOpts& opts) {
  RunConfig config = load_config(opts);
  EventLog log = load_events(opts, config);
  AttributeMap attrs = load_attrs(opts);
  FilterStats stats;
  EventLog filtered = filter_cohort(log, attrs, config.cohort, &stats);
  if (stats.dropped_missing_attrs > 0)
    std::cerr << "warning: dropped " << stats.dropped_missing_attrs
              << " case(s) without attributes\n";

  json echo = {
      {"kept_positive", stats.kept_positive},
      {"kept_negative", stats.kept_negative},
      {"dropped_label_mismatch", stats.dropped_label_mismatch},
      {"dropped_short", stats.dropped_short},
      {"dropped_missing_attrs", stats.dropped_missing_attrs},
      {"kept_traces", filtered.traces.size()},
  };
  std::ostringstream csv_out;
  write_event_csv(filtered, csv_out);
  if (!opts.out_path.empty()) {
    fs::path dir(opts.out_path);
    write_file(dir / "filtered_events.csv", csv_out.str());
    write_file(dir / "cohort_stats.json", echo.dump(2) + "\n");
  }
  std::cout << echo.dump(2) << "\n";
  return 0;
}

int cmd_variants(const CommonOpts& opts) {
  RunConfig config = load_config(opts);
  EventLog log = load_events(opts, config);
  auto vars = variants(log);
  std::ostringstream out;
  out << "activities,frequency\n";
  for (const auto& v : vars) {
    std::string joined;
    for (std::size_t i = 0; i < v.activities.size(); ++i) {
      if (i) joined += "|";
      joined += v.activities[i];
    }
    out << csv::join({joined, std::to_string(v.frequency)}) << "\n";
  }
  if (!opts.out_path.empty()) write_file(opts.out_path, out.str());
  else std::cout << out.str();
  return 0;
}

int cmd_classify(const CommonOpts& opts, const std::string& features_path,
                 std::uint64_t seed_flag, bool seed_given) {
  RunConfig config = load_config(opts);
  std::uint64_t seed = seed_given ? seed_flag : config.seed;
  std::ifstream in = open_input(features_path);
  TabularDataset data = read_feature_csv(in);

  TabularDataset balanced = undersample(data, seed);
  log_debug("undersampled to " + std::to_string(balanced.size()) + " cases");
  std::size_t k = std::min(config.select_k, data.width());
  auto selected = greedy_forward_select(balanced, k, config.folds, seed,
                                        config.classifier);
  std::vector<std::vector<double>> sub_rows;
  TabularDataset train_set;
  train_set.case_ids = balanced.case_ids;
  train_set.labels = balanced.labels;
  for (const auto& row : balanced.features) {
    std::vector<double> sub;
    for (std::size_t f : selected) sub.push_back(row[f]);
    train_set.features.push_back(std::move(sub));
  }
  GbmModel model = train(train_set, config.classifier);
  std::vector<std::vector<double>> all_rows;
  for (const auto& row : data.features) {
    std::vector<double> sub;
    for (std::size_t f : selected) sub.push_back(row[f]);
    all_rows.push_back(std::move(sub));
  }
  auto scores = model.predict(all_rows);
  ModelMetrics m = metrics(scores, data.labels);

  std::ostringstream out;
  out << "case_id,score,y_pred\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::ostringstream s;
    s << scores[i];
    out << csv::join({data.case_ids[i], s.str(),
                      scores[i] >= 0.5 ? "1" : "0"})
        << "\n";
  }
  if (!opts.out_path.empty()) write_file(opts.out_path, out.str());
  else std::cout << out.str();

  json summary = {{"auroc", m.auroc},
                  {"mcc", m.mcc},
                  {"selected_features", json::array()}};
  for (std::size_t f : selected)
    summary["selected_features"].push_back(
        f < data.feature_names.size() ? data.feature_names[f]
                                      : "f" + std::to_string(f));
  std::cerr << summary.dump(2) << "\n";
  return 0;
}

ClusteringArtifacts cluster_from_inputs(const CommonOpts& opts,
                                        const RunConfig& config,
                                        FilterStats* stats) {
  EventLog log = load_events(opts, config);
  AttributeMap attrs = load_attrs(opts);
  EventLog filtered = filter_cohort(log, attrs, config.cohort, stats);
  if (filtered.traces.empty())
    throw ValidationError("empty event log after cohort filtering");
  log_debug("clustering " + std::to_string(filtered.traces.size()) + " traces");
  return run_clustering(filtered, config.clustering);
}

int cmd_cluster(const CommonOpts& opts) {
  RunConfig config = load_config(opts);
  FilterStats stats;
  ClusteringArtifacts art = cluster_from_inputs(opts, config, &stats);
  std::string csv_text = assignments_csv(art);
  if (!opts.out_path.empty()) {
    fs::path dir(opts.out_path);
    write_file(dir / "assignments.csv", csv_text);
    for (const Cluster& c : art.result.clusters) {
      std::ostringstream dot;
      write_dot(c.model, art.index, dot,
                "cluster " + std::to_string(c.id));
      write_file(dir / ("cluster_" + std::to_string(c.id) + ".dot"),
                 dot.str());
    }
  } else {
    std::cout << csv_text;
  }
  std::cerr << art.result.clusters.size() << " cluster(s), "
            << art.result.residual_indices.size() << " residual variant(s)\n";
  return 0;
}

int cmd_analyze(const CommonOpts& opts, const std::string& assignments_path) {
  RunConfig config = load_config(opts);
  AttributeMap attrs = load_attrs(opts);
  std::ifstream in = open_input(assignments_path);
  auto assignment = parse_assignments_csv(in);

  std::map<std::string, std::vector<std::string>> groups;
  std::vector<std::string> residual;
  for (const auto& [cid, cluster_id] : assignment) {
    if (cluster_id == "residual") residual.push_back(cid);
    else groups[cluster_id].push_back(cid);
  }
  // numeric cluster order
  std::vector<std::pair<long, std::string>> order;
  for (const auto& [cl, ids] : groups) {
    char* end = nullptr;
    long n = std::strtol(cl.c_str(), &end, 10);
    if (!end || *end != '\0')
      throw ValidationError("non-numeric cluster id \"" + cl + "\"");
    order.emplace_back(n, cl);
  }
  std::sort(order.begin(), order.end());
  std::vector<std::vector<std::string>> cluster_cases;
  for (const auto& [n, cl] : order) cluster_cases.push_back(groups[cl]);

  OverdiagnosisReport report =
      overdiagnosis_report(cluster_cases, residual, attrs, config.flag_rule);
  auto digests = input_digests(opts);
  digests["assignments"] = digest_file(assignments_path);
  json doc = report_to_json(report, config, digests);
  if (!opts.out_path.empty()) write_file(opts.out_path, doc.dump(2) + "\n");
  else std::cout << doc.dump(2) << "\n";
  std::cerr << report_text_summary(report);
  return 0;
}

int cmd_report(const CommonOpts& opts, bool with_timestamp) {
  RunConfig config = load_config(opts);
  FilterStats stats;
  ClusteringArtifacts art = cluster_from_inputs(opts, config, &stats);
  OverdiagnosisReport report = overdiagnosis_report(
      cluster_case_ids(art), residual_case_ids(art), load_attrs(opts),
      config.flag_rule);
  json doc = report_to_json(report, config, input_digests(opts), &stats);
  if (with_timestamp) doc["generated_at"] = format_timestamp(std::time(nullptr));

  fs::path dir(opts.out_path.empty() ? "." : opts.out_path);
  write_file(dir / "report.json", doc.dump(2) + "\n");
  write_file(dir / "assignments.csv", assignments_csv(art));
  if (opts.emit_csv) write_file(dir / "clusters.csv", report_cluster_csv(report));
  std::cout << report_text_summary(report);
  return 0;
}

int cmd_synth(const CommonOpts& opts, std::uint64_t seed) {
  SynthConfig config = default_synth_config(seed);
  SynthOutput out = generate(config);
  fs::path dir(opts.out_path.empty() ? "." : opts.out_path);

  std::ostringstream events;
  events << "case_id,activity,timestamp\n";
  for (const Event& e : out.events)
    events << csv::join({e.case_id, e.activity, format_timestamp(e.timestamp)})
           << "\n";
  write_file(dir / "events.csv", events.str());

  std::ostringstream attrs;
  write_attrs_csv(out.attrs, attrs);
  write_file(dir / "attrs.csv", attrs.str());

  std::ostringstream truth;
  write_truth_csv(out.truth, truth);
  write_file(dir / "truth.csv", truth.str());

  std::cerr << "wrote " << out.log.traces.size() << " traces, "
            << out.truth.overdiagnosed_case_ids.size()
            << " planted overdiagnosed case(s)\n";
  return 0;
}

int cmd_export_dot(const CommonOpts& opts, int cluster_id) {
  RunConfig config = load_config(opts);
  FilterStats stats;
  ClusteringArtifacts art = cluster_from_inputs(opts, config, &stats);
  std::ostringstream dot;
  if (cluster_id < 0) {
    ProcessModel model = mine(art.seqs, config.clustering.mining);
    write_dot(model, art.index, dot, "whole log");
  } else {
    if (cluster_id >= static_cast<int>(art.result.clusters.size()))
      throw ValidationError("no cluster with id " + std::to_string(cluster_id));
    write_dot(art.result.clusters[cluster_id].model, art.index, dot,
              "cluster " + std::to_string(cluster_id));
  }
  if (!opts.out_path.empty()) write_file(opts.out_path, dot.str());
  else std::cout << dot.str();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"preemptive overdiagnosis audit for ML diagnostic models"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string features_path, assignments_path;
  std::uint64_t seed = 1;
  bool with_timestamp = false;
  int dot_cluster = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "run configuration JSON");
    sub->add_option("--events", opts.events_path, "events CSV (or XES with --xes)");
    sub->add_option("--attrs", opts.attrs_path, "case attributes CSV");
    sub->add_option("--predictions", opts.predictions_path,
                    "external predictions CSV, overrides y_pred");
    sub->add_option("--out", opts.out_path, "output file or directory");
    sub->add_option("--threads", opts.threads, "worker threads");
    sub->add_flag("--xes", opts.xes, "events input is XES XML");
    sub->add_flag("--emit-csv", opts.emit_csv, "also emit per-cluster CSV table");
    sub->add_flag("--strict-vocab", opts.strict_vocab,
                  "reject activities outside the vocabulary");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "parse, validate and filter the cohort");
  add_common(ingest);
  CLI::App* vars = app.add_subcommand("variants", "emit frequency-weighted trace variants");
  add_common(vars);
  CLI::App* classify = app.add_subcommand("classify", "baseline classifier pipeline");
  add_common(classify);
  classify->add_option("--features", features_path, "feature CSV: case_id,label,f1..fn")
      ->required();
  auto* classify_seed = classify->add_option("--seed", seed, "RNG seed");
  CLI::App* clus = app.add_subcommand("cluster", "active trace clustering");
  add_common(clus);
  CLI::App* analyze = app.add_subcommand("analyze", "outcome analysis of an existing clustering");
  add_common(analyze);
  analyze->add_option("--assignments", assignments_path, "assignments CSV")->required();
  CLI::App* report = app.add_subcommand("report", "full pipeline: ingest, cluster, analyze");
  add_common(report);
  report->add_flag("--timestamp", with_timestamp,
                   "include a generation timestamp (breaks byte determinism)");
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort with planted truth");
  add_common(synth);
  synth->add_option("--seed", seed, "RNG seed");
  CLI::App* dot = app.add_subcommand("export-dot", "DOT export of a trajectory model");
  add_common(dot);
  dot->add_option("--cluster", dot_cluster, "cluster id (default: whole log)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(opts);
    if (vars->parsed()) return cmd_variants(opts);
    if (classify->parsed())
      return cmd_classify(opts, features_path, seed, classify_seed->count() > 0);
    if (clus->parsed()) return cmd_cluster(opts);
    if (analyze->parsed()) return cmd_analyze(opts, assignments_path);
    if (report->parsed()) return cmd_report(opts, with_timestamp);
    if (synth->parsed()) return cmd_synth(opts, seed);
    if (dot->parsed()) return cmd_export_dot(opts, dot_cluster);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace overdx
