#include "overdx/eventlog.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "overdx/csv.hpp"
#include "overdx/error.hpp"

namespace overdx {

const std::vector<std::string>& default_vocabulary() {
  static const std::vector<std::string> vocab = {
      "lactate",
      "fluids crystalloids",
      "norepinephrine",
      "epinephrine",
      "vasopressin",
      "dopamine",
      "dobutamine",
      "vancomycin",
      "other antibiotics",
      "cefepime",
      "piperacillin-tazobactam",
      "ceftriaxone",
      "cefazolin",
  };
  return vocab;
}

namespace {

// days since epoch for a civil date (Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

bool parse_int_at(const std::string& s, std::size_t pos, std::size_t len,
                  int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

Timestamp parse_timestamp(const std::string& text) {
  // YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|±HH:MM|±HHMM]
  int Y, M, D, h, mi, s;
  if (!parse_int_at(text, 0, 4, Y) || text.size() < 19 || text[4] != '-' ||
      text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':' || !parse_int_at(text, 5, 2, M) ||
      !parse_int_at(text, 8, 2, D) || !parse_int_at(text, 11, 2, h) ||
      !parse_int_at(text, 14, 2, mi) || !parse_int_at(text, 17, 2, s)) {
    throw ValidationError("invalid timestamp: " + text);
  }
  if (M < 1 || M > 12 || D < 1 || D > 31 || h > 23 || mi > 59 || s > 60) {
    throw ValidationError("invalid timestamp: " + text);
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) throw ValidationError("invalid timestamp: " + text);
  }
  std::int64_t offset = 0;
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = 0, om = 0;
      if (!parse_int_at(text, pos + 1, 2, oh))
        throw ValidationError("invalid timestamp: " + text);
      std::size_t mpos = pos + 3;
      if (mpos < text.size() && text[mpos] == ':') ++mpos;
      if (!parse_int_at(text, mpos, 2, om))
        throw ValidationError("invalid timestamp: " + text);
      offset = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
      pos = mpos + 2;
    }
    if (pos != text.size())
      throw ValidationError("invalid timestamp: " + text);
  }
  std::int64_t days = days_from_civil(Y, M, D);
  return days * 86400 + h * 3600 + mi * 60 + s - offset;
}

std::string format_timestamp(Timestamp t) {
  std::int64_t days = t / 86400;
  std::int64_t sod = t % 86400;
  if (sod < 0) {
    sod += 86400;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m,
                d, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60),
                static_cast<long long>(sod % 60));
  return buf;
}

namespace {

EventLog build_log(std::vector<Event>& events, VocabPolicy policy,
                   const std::vector<std::string>& vocabulary,
                   const std::vector<std::size_t>& lines) {
  EventLog log;
  log.vocabulary.insert(vocabulary.begin(), vocabulary.end());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!log.vocabulary.count(e.activity)) {
      if (policy == VocabPolicy::Strict) {
        std::ostringstream msg;
        msg << "unknown activity \"" << e.activity << "\"";
        if (i < lines.size() && lines[i]) msg << " at line " << lines[i];
        throw ValidationError(msg.str());
      }
      log.vocabulary.insert(e.activity);
    }
  }
  // group by case id, first-seen order of cases; stable sort keeps input
  // order on timestamp ties
  std::vector<std::string> case_order;
  std::unordered_map<std::string, std::vector<std::pair<Timestamp, std::string>>>
      by_case;
  for (const Event& e : events) {
    auto it = by_case.find(e.case_id);
    if (it == by_case.end()) {
      case_order.push_back(e.case_id);
      it = by_case.emplace(e.case_id, decltype(by_case)::mapped_type{}).first;
    }
    it->second.emplace_back(e.timestamp, e.activity);
  }
  for (const std::string& cid : case_order) {
    auto& evs = by_case[cid];
    std::stable_sort(evs.begin(), evs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Trace t;
    t.case_id = cid;
    for (auto& [ts, act] : evs) t.activities.push_back(std::move(act));
    log.traces.push_back(std::move(t));
  }
  return log;
}

}  // namespace

EventLog parse_event_csv(std::istream& in, const ColumnMap& columns,
                         VocabPolicy policy,
                         const std::vector<std::string>& vocabulary) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("empty event log");
  const auto& header = rows[0].fields;
  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ValidationError("missing column \"" + name + "\" in event csv");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t ci = find_col(columns.case_id);
  std::size_t ai = find_col(columns.activity);
  std::size_t ti = find_col(columns.timestamp);
  std::size_t width = std::max({ci, ai, ti}) + 1;

  std::vector<Event> events;
  std::vector<std::size_t> lines;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() < width) {
      throw ValidationError("short row at line " + std::to_string(row.line_number));
    }
    Event e;
    e.case_id = row.fields[ci];
    e.activity = row.fields[ai];
    if (e.activity.empty())
      throw ValidationError("empty activity at line " +
                            std::to_string(row.line_number));
    try {
      e.timestamp = parse_timestamp(row.fields[ti]);
    } catch (const ValidationError&) {
      throw ValidationError("unparsable timestamp \"" + row.fields[ti] +
                            "\" at line " + std::to_string(row.line_number));
    }
    events.push_back(std::move(e));
    lines.push_back(row.line_number);
  }
  if (events.empty()) throw ValidationError("empty event log");
  return build_log(events, policy, vocabulary, lines);
}

// ---------------------------------------------------------------------------
// XES subset parser. Hand-rolled pull parser for the element structure the
// XES core schema uses: nested elements with attributes, no mixed content.

namespace {

struct XmlNode {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::vector<XmlNode> children;
};

class XmlParser {
 public:
  explicit XmlParser(const std::string& text) : text_(text) {}

  XmlNode parse_document() {
    skip_misc();
    XmlNode root = parse_element();
    skip_misc();
    if (pos_ != text_.size()) fail("trailing content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ValidationError("malformed XML: " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (text_.compare(pos_, 2, "<?") == 0) {
        auto end = text_.find("?>", pos_);
        if (end == std::string::npos) fail("unterminated processing instruction");
        pos_ = end + 2;
      } else if (text_.compare(pos_, 4, "<!--") == 0) {
        auto end = text_.find("-->", pos_);
        if (end == std::string::npos) fail("unterminated comment");
        pos_ = end + 3;
      } else if (text_.compare(pos_, 2, "<!") == 0) {
        auto end = text_.find('>', pos_);
        if (end == std::string::npos) fail("unterminated declaration");
        pos_ = end + 1;
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == ':' || text_[pos_] == '_' || text_[pos_] == '-' ||
            text_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail("expected name at offset " + std::to_string(pos_));
    return text_.substr(start, pos_ - start);
  }

  std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '&') {
        out.push_back(s[i]);
        continue;
      }
      auto semi = s.find(';', i);
      if (semi == std::string::npos) fail("bad entity reference");
      std::string ent = s.substr(i + 1, semi - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else fail("unknown entity &" + ent + ";");
      i = semi;
    }
    return out;
  }

  XmlNode parse_element() {
    if (pos_ >= text_.size() || text_[pos_] != '<') fail("expected element");
    ++pos_;
    XmlNode node;
    node.name = parse_name();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) fail("unterminated start tag <" + node.name);
      if (text_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (text_.compare(pos_, 2, "/>") == 0) {
        pos_ += 2;
        return node;
      }
      std::string key = parse_name();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected =");
      ++pos_;
      skip_ws();
      if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
        fail("expected quoted attribute value");
      char quote = text_[pos_++];
      auto end = text_.find(quote, pos_);
      if (end == std::string::npos) fail("unterminated attribute value");
      node.attrs[key] = unescape(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
    }
    // content: child elements and ignorable text
    for (;;) {
      skip_misc();
      if (pos_ >= text_.size()) fail("unterminated element <" + node.name + ">");
      if (text_.compare(pos_, 2, "</") == 0) {
        pos_ += 2;
        std::string close = parse_name();
        if (close != node.name)
          fail("mismatched close tag </" + close + "> for <" + node.name + ">");
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '>') fail("expected >");
        ++pos_;
        return node;
      }
      if (text_[pos_] == '<') {
        node.children.push_back(parse_element());
      } else {
        // skip character data (XES carries values in attributes)
        while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

const std::string* xes_attr(const XmlNode& node, const std::string& key) {
  for (const XmlNode& child : node.children) {
    auto it = child.attrs.find("key");
    if (it != child.attrs.end() && it->second == key) {
      auto v = child.attrs.find("value");
      if (v != child.attrs.end()) return &v->second;
    }
  }
  return nullptr;
}

}  // namespace

EventLog parse_xes(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  XmlParser parser(text);
  XmlNode root = parser.parse_document();
  if (root.name != "log") throw ValidationError("XES: root element is not <log>");

  std::vector<Event> events;
  int anonymous = 0;
  for (const XmlNode& tr : root.children) {
    if (tr.name != "trace") continue;
    const std::string* cid = xes_attr(tr, "concept:name");
    std::string case_id =
        cid ? *cid : "trace-" + std::to_string(anonymous++);
    bool has_event = false;
    for (const XmlNode& ev : tr.children) {
      if (ev.name != "event") continue;
      const std::string* name = xes_attr(ev, "concept:name");
      if (!name)
        throw ValidationError("XES: event without concept:name in trace \"" +
                              case_id + "\"");
      const std::string* ts = xes_attr(ev, "time:timestamp");
      Event e;
      e.case_id = case_id;
      e.activity = *name;
      // events without a timestamp keep document order
      e.timestamp = ts ? parse_timestamp(*ts)
                       : static_cast<Timestamp>(events.size());
      events.push_back(std::move(e));
      has_event = true;
    }
    if (!has_event) {
      // preserve empty traces? XES allows them, our Trace does not; skip.
      continue;
    }
  }
  if (events.empty()) return EventLog{};
  return build_log(events, VocabPolicy::Extend, {}, {});
}

AttributeMap parse_attrs_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("empty attributes csv");
  const std::vector<std::string> expected = {"case_id", "y_true",   "y_pred",
                                             "sofa_24h", "died",
                                             "discharge_location"};
  const auto& header = rows[0].fields;
  std::vector<std::size_t> idx;
  for (const auto& name : expected) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ValidationError("missing column \"" + name + "\" in attributes csv");
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  auto parse_binary = [](const std::string& s, const std::string& what,
                         std::size_t line) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ValidationError(what + " must be 0 or 1 at line " +
                          std::to_string(line));
  };
  AttributeMap out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() < header.size())
      throw ValidationError("short row at line " +
                            std::to_string(row.line_number));
    CaseAttributes a;
    a.case_id = row.fields[idx[0]];
    a.y_true = parse_binary(row.fields[idx[1]], "y_true", row.line_number);
    a.y_pred = parse_binary(row.fields[idx[2]], "y_pred", row.line_number);
    char* end = nullptr;
    long sofa = std::strtol(row.fields[idx[3]].c_str(), &end, 10);
    if (!end || *end != '\0' || sofa < 0 || sofa > 24)
      throw ValidationError("sofa_24h must be an integer in [0,24] at line " +
                            std::to_string(row.line_number));
    a.sofa_24h = static_cast<int>(sofa);
    a.died = parse_binary(row.fields[idx[4]], "died", row.line_number);
    a.discharge_location = row.fields[idx[5]];
    if (out.count(a.case_id))
      throw ValidationError("duplicate case_id \"" + a.case_id +
                            "\" in attributes csv");
    out.emplace(a.case_id, std::move(a));
  }
  return out;
}

EventLog filter_cohort(const EventLog& log, const AttributeMap& attrs,
                       const FilterPolicy& policy, FilterStats* stats) {
  FilterStats local;
  EventLog out;
  out.vocabulary = log.vocabulary;
  for (const Trace& t : log.traces) {
    auto it = attrs.find(t.case_id);
    if (it == attrs.end()) {
      if (policy.strict_missing_attrs)
        throw ValidationError("no attributes for case \"" + t.case_id + "\"");
      ++local.dropped_missing_attrs;
      continue;
    }
    const CaseAttributes& a = it->second;
    if (a.y_true != a.y_pred) {
      ++local.dropped_label_mismatch;
      continue;
    }
    std::set<std::string> distinct(t.activities.begin(), t.activities.end());
    if (static_cast<int>(distinct.size()) < policy.min_distinct) {
      ++local.dropped_short;
      continue;
    }
    if (a.y_true) ++local.kept_positive;
    else ++local.kept_negative;
    out.traces.push_back(t);
  }
  if (stats) *stats = local;
  return out;
}

std::vector<TraceVariant> variants(const EventLog& log) {
  std::map<std::vector<std::string>, std::vector<std::string>> groups;
  for (const Trace& t : log.traces) groups[t.activities].push_back(t.case_id);
  std::vector<TraceVariant> out;
  out.reserve(groups.size());
  for (auto& [acts, cases] : groups) {
    TraceVariant v;
    v.activities = acts;
    v.frequency = static_cast<std::int64_t>(cases.size());
    std::sort(cases.begin(), cases.end());
    v.member_case_ids = std::move(cases);
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), [](const TraceVariant& a, const TraceVariant& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.activities < b.activities;
  });
  return out;
}

void write_event_csv(const EventLog& log, std::ostream& out) {
  out << "case_id,activity,timestamp\n";
  for (const Trace& t : log.traces) {
    Timestamp ts = 0;
    for (const std::string& act : t.activities) {
      out << csv::join({t.case_id, act, format_timestamp(ts)}) << "\n";
      ts += 1;
    }
  }
}

void write_attrs_csv(const AttributeMap& attrs, std::ostream& out) {
  out << "case_id,y_true,y_pred,sofa_24h,died,discharge_location\n";
  for (const auto& [cid, a] : attrs) {
    out << csv::join({cid, std::to_string(a.y_true), std::to_string(a.y_pred),
                      std::to_string(a.sofa_24h), std::to_string(a.died),
                      a.discharge_location})
        << "\n";
  }
}

}  // namespace overdx
