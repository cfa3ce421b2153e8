#include <doctest.h>

#include <sstream>

#include "overdx/error.hpp"
#include "overdx/pipeline.hpp"
#include "overdx/synth.hpp"

using namespace overdx;
using nlohmann::json;

TEST_CASE("run config rejects unknown keys at every level") {
  CHECK_THROWS_WITH_AS(parse_run_config(json{{"clusterin", json::object()}}),
                       doctest::Contains("clusterin"), ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"clustering", {{"target", 0.9}}}}),
      ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"mining", {{"thresh", 0.5}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"flag_rule", {{"p", 0.05}}}}),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"clustering", {{"sampling", "random"}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"clustering", {{"target_fitness", "high"}}}}),
      ConfigError);
}

TEST_CASE("run config round trips through json") {
  json doc = {
      {"clustering",
       {{"target_fitness", 0.9},
        {"max_clusters", 7},
        {"min_cluster_size", 2},
        {"window", 0.25},
        {"sampling", "frequency"}}},
      {"mining", {{"dependency_threshold", 0.6}, {"min_pair_observations", 3}}},
      {"cohort", {{"min_distinct", 4}, {"strict_missing_attrs", true}}},
      {"flag_rule",
       {{"max_pos_share", 0.4},
        {"min_pos", 5},
        {"alpha", 0.01},
        {"continuity", false}}},
      {"classifier",
       {{"rounds", 50}, {"learning_rate", 0.2}, {"select_k", 6}, {"folds", 3}}},
      {"seed", 42},
      {"threads", 4},
      {"strict_vocab", true},
  };
  RunConfig config = parse_run_config(doc);
  CHECK(config.clustering.target_fitness == 0.9);
  CHECK(config.clustering.sampling == Sampling::Frequency);
  CHECK(config.clustering.mining.dependency_threshold == 0.6);
  CHECK(config.cohort.min_distinct == 4);
  CHECK(config.flag_rule.alpha == 0.01);
  CHECK(config.classifier.rounds == 50);
  CHECK(config.select_k == 6);
  CHECK(config.seed == 42);
  CHECK(config.clustering.threads == 4);
  CHECK(config.strict_vocab);
  CHECK(run_config_to_json(config) == doc);

  // defaults survive an empty document
  RunConfig defaults = parse_run_config(json::object());
  CHECK(defaults.clustering.target_fitness == 0.95);
  CHECK(defaults.clustering.max_clusters == 24);
  CHECK(defaults.flag_rule.min_pos == 10);
}

TEST_CASE("clustering artifacts partition the cohort's cases") {
  SynthOutput synth = generate(default_synth_config(6));
  EventLog cohort = filter_cohort(synth.log, synth.attrs);
  ClusteringArtifacts art = run_clustering(cohort, ClusteringConfig{});

  auto clusters = cluster_case_ids(art);
  auto residual = residual_case_ids(art);
  std::size_t total = residual.size();
  for (const auto& c : clusters) total += c.size();
  CHECK(total == cohort.traces.size());

  std::map<std::string, std::string> seen = [&] {
    std::istringstream in(assignments_csv(art));
    return parse_assignments_csv(in);
  }();
  CHECK(seen.size() == cohort.traces.size());
  for (const auto& cid : residual) CHECK(seen.at(cid) == "residual");
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (const auto& cid : clusters[i])
      CHECK(seen.at(cid) == std::to_string(i));
}

TEST_CASE("assignments csv parse errors") {
  std::istringstream bad_header("case,cluster\nc1,0\n");
  CHECK_THROWS_AS(parse_assignments_csv(bad_header), ValidationError);
  std::istringstream dup("case_id,cluster_id\nc1,0\nc1,1\n");
  CHECK_THROWS_AS(parse_assignments_csv(dup), ValidationError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_assignments_csv(empty), ValidationError);
}

TEST_CASE("report json carries config echo, inputs, clusters, and totals") {
  SynthOutput synth = generate(default_synth_config(6));
  EventLog cohort = filter_cohort(synth.log, synth.attrs);
  ClusteringArtifacts art = run_clustering(cohort, ClusteringConfig{});
  OverdiagnosisReport report = overdiagnosis_report(
      cluster_case_ids(art), residual_case_ids(art), synth.attrs);

  RunConfig config;
  json doc = report_to_json(report, config, {{"events", "abc123"}});
  CHECK(doc.at("config") == run_config_to_json(config));
  CHECK(doc.at("inputs").at("events") == "abc123");
  REQUIRE(doc.at("clusters").size() == report.summaries.size());
  const json& first = doc.at("clusters").at(0);
  CHECK(first.contains("n_pos"));
  CHECK(first.contains("sofa_test"));
  CHECK(first.contains("flagged"));
  CHECK(doc.at("count").get<std::int64_t>() == report.count);
  CHECK(doc.at("total_positive").get<std::int64_t>() == report.total_positive);
  CHECK(doc.at("residual").at("n_cases").get<std::int64_t>() ==
        report.residual_cases);
  CHECK_FALSE(doc.contains("cohort_filter"));

  FilterStats stats;
  stats.kept_positive = 7;
  json with_stats = report_to_json(report, config, {}, &stats);
  CHECK(with_stats.at("cohort_filter").at("kept_positive") == 7);

  // serialized form is key-sorted, hence byte-stable
  CHECK(doc.dump(2) == report_to_json(report, config, {{"events", "abc123"}})
                           .dump(2));

  std::string text = report_text_summary(report);
  CHECK(text.find("flagged clusters:") != std::string::npos);
  std::string csv = report_cluster_csv(report);
  CHECK(csv.rfind("cluster_id,", 0) == 0);
}
