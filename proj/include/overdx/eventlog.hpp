#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace overdx {

using Timestamp = std::int64_t;  // seconds since the Unix epoch, UTC

struct Event {
  std::string case_id;
  std::string activity;
  Timestamp timestamp = 0;
};

// One ICU stay: timestamp-ordered activity names. Timestamps are dropped
// after ordering; ties keep input order.
struct Trace {
  std::string case_id;
  std::vector<std::string> activities;

  bool operator==(const Trace&) const = default;
};

struct CaseAttributes {
  std::string case_id;
  int y_true = 0;
  int y_pred = 0;
  int sofa_24h = 0;
  int died = 0;
  std::string discharge_location;
};

struct TraceVariant {
  std::vector<std::string> activities;
  std::int64_t frequency = 0;
  std::vector<std::string> member_case_ids;  // sorted ascending
};

struct EventLog {
  std::vector<Trace> traces;
  std::set<std::string> vocabulary;

  bool operator==(const EventLog&) const = default;
};

using AttributeMap = std::map<std::string, CaseAttributes>;

struct ColumnMap {
  std::string case_id = "case_id";
  std::string activity = "activity";
  std::string timestamp = "timestamp";
};

enum class VocabPolicy {
  Strict,  // unknown activity is an error
  Extend,  // unknown activities are added to the vocabulary
};

struct FilterPolicy {
  int min_distinct = 3;             // minimum distinct activity names per trace
  bool strict_missing_attrs = false;  // error (vs drop) when attrs are missing
};

struct FilterStats {
  std::int64_t kept_positive = 0;
  std::int64_t kept_negative = 0;
  std::int64_t dropped_label_mismatch = 0;
  std::int64_t dropped_short = 0;
  std::int64_t dropped_missing_attrs = 0;
};

// The 13 activities of the default clinical vocabulary.
const std::vector<std::string>& default_vocabulary();

Timestamp parse_timestamp(const std::string& text);  // ISO-8601, second resolution
std::string format_timestamp(Timestamp t);           // UTC, trailing Z

EventLog parse_event_csv(std::istream& in, const ColumnMap& columns = {},
                         VocabPolicy policy = VocabPolicy::Extend,
                         const std::vector<std::string>& vocabulary =
                             default_vocabulary());

// XES core subset: log/trace/event with concept:name and time:timestamp.
EventLog parse_xes(std::istream& in);

AttributeMap parse_attrs_csv(std::istream& in);

EventLog filter_cohort(const EventLog& log, const AttributeMap& attrs,
                       const FilterPolicy& policy = {},
                       FilterStats* stats = nullptr);

// Deduplicate into variants; canonical order is frequency descending,
// ties by lexicographic activity sequence ascending.
std::vector<TraceVariant> variants(const EventLog& log);

// Synthetic timestamps (one second per event); re-parsing gives back an
// identical EventLog.
void write_event_csv(const EventLog& log, std::ostream& out);
void write_attrs_csv(const AttributeMap& attrs, std::ostream& out);

}  // namespace overdx
