#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "overdx/error.hpp"
#include "overdx/eventlog.hpp"

using namespace overdx;

namespace {

CaseAttributes attrs_for(const std::string& cid, int y_true, int y_pred) {
  CaseAttributes a;
  a.case_id = cid;
  a.y_true = y_true;
  a.y_pred = y_pred;
  a.sofa_24h = 5;
  a.discharge_location = "home";
  return a;
}

}  // namespace

TEST_CASE("timestamps parse and format") {
  CHECK(parse_timestamp("1970-01-01T00:00:00") == 0);
  CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_timestamp("1970-01-02 00:00:01") == 86401);
  CHECK(parse_timestamp("2023-01-01T00:00:00Z") == 1672531200);
  CHECK(parse_timestamp("2023-01-01T01:00:00+01:00") == 1672531200);
  CHECK(parse_timestamp("2023-01-01T00:00:00.123Z") == 1672531200);
  CHECK(format_timestamp(1672531200) == "2023-01-01T00:00:00Z");
  CHECK_THROWS_AS(parse_timestamp("yesterday"), ValidationError);
  CHECK_THROWS_AS(parse_timestamp("2023-13-01T00:00:00"), ValidationError);
}

TEST_CASE("parse_event_csv groups and sorts one case") {
  std::istringstream in(
      "case_id,activity,timestamp\n"
      "c1,a,2023-01-01T00:00:00Z\n"
      "c1,b,2023-01-01T01:00:00Z\n"
      "c1,c,2023-01-01T02:00:00Z\n");
  EventLog log = parse_event_csv(in);
  REQUIRE(log.traces.size() == 1);
  CHECK(log.traces[0].activities == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("out-of-order rows are sorted by timestamp, ties keep input order") {
  std::istringstream in(
      "case_id,activity,timestamp\n"
      "c1,late,2023-01-01T05:00:00Z\n"
      "c1,first,2023-01-01T01:00:00Z\n"
      "c1,tie1,2023-01-01T03:00:00Z\n"
      "c1,tie2,2023-01-01T03:00:00Z\n");
  EventLog log = parse_event_csv(in);
  CHECK(log.traces[0].activities ==
        std::vector<std::string>{"first", "tie1", "tie2", "late"});
}

TEST_CASE("unknown activity in strict mode names the line") {
  std::istringstream in(
      "case_id,activity,timestamp\n"
      "c1,lactate,2023-01-01T00:00:00Z\n"
      "c1,xyz,2023-01-01T01:00:00Z\n");
  try {
    parse_event_csv(in, {}, VocabPolicy::Strict);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("xyz") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}

TEST_CASE("missing column and bad timestamp errors") {
  std::istringstream missing("case_id,activity\nc1,a\n");
  CHECK_THROWS_WITH_AS(parse_event_csv(missing),
                       doctest::Contains("timestamp"), ValidationError);
  std::istringstream bad(
      "case_id,activity,timestamp\n"
      "c1,a,not-a-time\n");
  CHECK_THROWS_WITH_AS(parse_event_csv(bad), doctest::Contains("line 2"),
                       ValidationError);
  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(parse_event_csv(empty),
                       doctest::Contains("empty event log"), ValidationError);
}

TEST_CASE("parse_xes minimal log") {
  std::istringstream in(R"(<?xml version="1.0"?>
<log xes.version="1.0">
  <trace>
    <string key="concept:name" value="c1"/>
    <event>
      <string key="concept:name" value="a"/>
      <date key="time:timestamp" value="2023-01-01T00:00:00Z"/>
    </event>
    <event>
      <string key="concept:name" value="b"/>
      <date key="time:timestamp" value="2023-01-01T01:00:00Z"/>
    </event>
    <event>
      <string key="concept:name" value="c"/>
      <date key="time:timestamp" value="2023-01-01T02:00:00Z"/>
    </event>
  </trace>
</log>)");
  EventLog log = parse_xes(in);
  REQUIRE(log.traces.size() == 1);
  CHECK(log.traces[0].case_id == "c1");
  CHECK(log.traces[0].activities == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("parse_xes errors and empty log") {
  std::istringstream missing(R"(<log><trace>
    <string key="concept:name" value="c1"/>
    <event><date key="time:timestamp" value="2023-01-01T00:00:00Z"/></event>
  </trace></log>)");
  CHECK_THROWS_WITH_AS(parse_xes(missing), doctest::Contains("concept:name"),
                       ValidationError);

  std::istringstream malformed("<log><trace></log>");
  CHECK_THROWS_AS(parse_xes(malformed), ValidationError);

  std::istringstream empty("<log/>");
  CHECK(parse_xes(empty).traces.empty());
}

TEST_CASE("filter_cohort applies the label and distinct-activity rules") {
  EventLog log;
  log.traces = {
      {"fp", {"a", "b", "c"}},     // false positive: dropped
      {"short", {"a", "b", "a", "b"}},  // 2 distinct: dropped
      {"tp", {"a", "b", "c"}},
      {"tn", {"a", "b", "c", "a"}},
      {"orphan", {"a", "b", "c"}},  // no attributes
  };
  log.vocabulary = {"a", "b", "c"};
  AttributeMap attrs;
  attrs.emplace("fp", attrs_for("fp", 0, 1));
  attrs.emplace("short", attrs_for("short", 1, 1));
  attrs.emplace("tp", attrs_for("tp", 1, 1));
  attrs.emplace("tn", attrs_for("tn", 0, 0));

  FilterStats stats;
  EventLog out = filter_cohort(log, attrs, {}, &stats);
  REQUIRE(out.traces.size() == 2);
  CHECK(out.traces[0].case_id == "tp");
  CHECK(out.traces[1].case_id == "tn");
  CHECK(stats.kept_positive == 1);
  CHECK(stats.kept_negative == 1);
  CHECK(stats.dropped_label_mismatch == 1);
  CHECK(stats.dropped_short == 1);
  CHECK(stats.dropped_missing_attrs == 1);

  FilterPolicy strict;
  strict.strict_missing_attrs = true;
  CHECK_THROWS_WITH_AS(filter_cohort(log, attrs, strict),
                       doctest::Contains("orphan"), ValidationError);

  // idempotence
  EventLog twice = filter_cohort(out, attrs);
  CHECK(twice == out);
}

TEST_CASE("variants: counting, ordering, tie rule") {
  EventLog log;
  log.traces = {{"c1", {"a", "b", "c"}},
                {"c2", {"a", "b", "c"}},
                {"c3", {"x", "y", "z"}}};
  log.vocabulary = {"a", "b", "c", "x", "y", "z"};
  auto vars = variants(log);
  REQUIRE(vars.size() == 2);
  CHECK(vars[0].activities == std::vector<std::string>{"a", "b", "c"});
  CHECK(vars[0].frequency == 2);
  CHECK(vars[0].member_case_ids == std::vector<std::string>{"c1", "c2"});
  CHECK(vars[1].frequency == 1);

  CHECK(variants(EventLog{}).empty());

  // equal frequency: lexicographically smaller first
  EventLog tie;
  tie.traces = {{"c1", {"x", "y"}}, {"c2", {"a", "b"}}};
  auto tied = variants(tie);
  CHECK(tied[0].activities == std::vector<std::string>{"a", "b"});
}

TEST_CASE("variants order is shuffle-invariant and frequencies conserve") {
  std::mt19937 rng(42);
  EventLog log;
  log.vocabulary = {"a", "b", "c", "d"};
  std::vector<std::string> acts = {"a", "b", "c", "d"};
  for (int i = 0; i < 40; ++i) {
    Trace t;
    t.case_id = "c" + std::to_string(i);
    int len = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < len; ++j) t.activities.push_back(acts[rng() % 4]);
    log.traces.push_back(std::move(t));
  }
  auto base = variants(log);
  std::int64_t total = 0;
  for (const auto& v : base) total += v.frequency;
  CHECK(total == 40);

  EventLog shuffled = log;
  std::shuffle(shuffled.traces.begin(), shuffled.traces.end(), rng);
  auto again = variants(shuffled);
  REQUIRE(again.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(again[i].activities == base[i].activities);
    CHECK(again[i].frequency == base[i].frequency);
    CHECK(again[i].member_case_ids == base[i].member_case_ids);
  }
}

TEST_CASE("csv export round-trips") {
  std::istringstream in(
      "case_id,activity,timestamp\n"
      "c1,lactate,2023-01-01T02:00:00Z\n"
      "c1,fluids crystalloids,2023-01-01T00:00:00Z\n"
      "c2,vancomycin,2023-01-01T00:00:00Z\n");
  EventLog log = parse_event_csv(in);
  std::ostringstream out;
  write_event_csv(log, out);
  std::istringstream back(out.str());
  CHECK(parse_event_csv(back) == log);
}

TEST_CASE("attrs csv validation") {
  std::istringstream good(
      "case_id,y_true,y_pred,sofa_24h,died,discharge_location\n"
      "c1,1,0,7,0,home\n");
  auto attrs = parse_attrs_csv(good);
  CHECK(attrs.at("c1").sofa_24h == 7);

  std::istringstream bad_sofa(
      "case_id,y_true,y_pred,sofa_24h,died,discharge_location\n"
      "c1,1,0,25,0,home\n");
  CHECK_THROWS_AS(parse_attrs_csv(bad_sofa), ValidationError);

  std::istringstream dup(
      "case_id,y_true,y_pred,sofa_24h,died,discharge_location\n"
      "c1,1,1,5,0,home\nc1,0,0,5,0,home\n");
  CHECK_THROWS_AS(parse_attrs_csv(dup), ValidationError);
}
