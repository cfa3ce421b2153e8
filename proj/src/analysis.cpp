#include "overdx/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "overdx/error.hpp"

namespace overdx {

ClusterOutcomeSummary summarize_cluster(int cluster_id,
                                        const std::vector<std::string>& case_ids,
                                        const AttributeMap& attrs,
                                        bool continuity) {
  ClusterOutcomeSummary s;
  s.cluster_id = cluster_id;

  std::vector<double> sofa_pos, sofa_neg;
  std::vector<std::string> missing;
  for (const std::string& cid : case_ids) {
    auto it = attrs.find(cid);
    if (it == attrs.end()) {
      missing.push_back(cid);
      continue;
    }
    const CaseAttributes& a = it->second;
    if (a.y_true) {
      ++s.n_pos;
      sofa_pos.push_back(static_cast<double>(a.sofa_24h));
      s.deaths_pos += a.died;
      s.discharge_pos[a.discharge_location] += 1.0;
    } else {
      ++s.n_neg;
      sofa_neg.push_back(static_cast<double>(a.sofa_24h));
      s.deaths_neg += a.died;
      s.discharge_neg[a.discharge_location] += 1.0;
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "missing attributes for case(s):";
    for (const auto& cid : missing) msg << " " << cid;
    throw ValidationError(msg.str());
  }
  const std::int64_t total = s.n_pos + s.n_neg;
  s.pos_share = total > 0 ? static_cast<double>(s.n_pos) / total : 0.0;
  for (auto& [loc, v] : s.discharge_pos) v /= static_cast<double>(s.n_pos);
  for (auto& [loc, v] : s.discharge_neg) v /= static_cast<double>(s.n_neg);

  s.tests_applicable = s.n_pos > 0 && s.n_neg > 0;
  if (s.tests_applicable) {
    s.sofa_test = wilcoxon_rank_sum(sofa_pos, sofa_neg);
    s.mortality_test =
        two_proportion_test(s.deaths_pos, s.n_pos, s.deaths_neg, s.n_neg,
                            continuity);
  }
  return s;
}

std::vector<int> flag_candidates(
    const std::vector<ClusterOutcomeSummary>& summaries, const FlagRule& rule) {
  std::vector<int> flagged;
  for (const auto& s : summaries) {
    if (!s.tests_applicable) continue;
    if (s.pos_share >= rule.max_pos_share) continue;
    if (s.n_pos < rule.min_pos) continue;
    if (s.sofa_test.p_value <= rule.alpha) continue;
    if (s.mortality_test.p_value <= rule.alpha) continue;
    flagged.push_back(s.cluster_id);
  }
  return flagged;
}

OverdiagnosisReport overdiagnosis_report(
    const std::vector<std::vector<std::string>>& cluster_cases,
    const std::vector<std::string>& residual_cases, const AttributeMap& attrs,
    const FlagRule& rule) {
  OverdiagnosisReport report;
  for (std::size_t i = 0; i < cluster_cases.size(); ++i) {
    report.summaries.push_back(summarize_cluster(
        static_cast<int>(i), cluster_cases[i], attrs, rule.continuity));
    report.total_positive += report.summaries.back().n_pos;
  }
  report.residual_cases = static_cast<std::int64_t>(residual_cases.size());
  for (const std::string& cid : residual_cases) {
    auto it = attrs.find(cid);
    if (it == attrs.end())
      throw ValidationError("missing attributes for case(s): " + cid);
    if (it->second.y_true) ++report.residual_positive;
  }
  report.total_positive += report.residual_positive;

  report.flagged_cluster_ids = flag_candidates(report.summaries, rule);
  for (int id : report.flagged_cluster_ids) {
    for (const std::string& cid : cluster_cases[static_cast<std::size_t>(id)]) {
      if (attrs.at(cid).y_true) report.flagged_case_ids.push_back(cid);
    }
  }
  std::sort(report.flagged_case_ids.begin(), report.flagged_case_ids.end());
  report.count = static_cast<std::int64_t>(report.flagged_case_ids.size());
  report.rate = report.total_positive > 0
                    ? static_cast<double>(report.count) / report.total_positive
                    : 0.0;
  return report;
}

}  // namespace overdx
