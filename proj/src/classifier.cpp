#include "overdx/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "overdx/csv.hpp"
#include "overdx/error.hpp"

namespace overdx {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TabularDataset select_rows(const TabularDataset& d,
                           const std::vector<std::size_t>& rows) {
  TabularDataset out;
  out.feature_names = d.feature_names;
  for (std::size_t r : rows) {
    out.case_ids.push_back(d.case_ids[r]);
    out.features.push_back(d.features[r]);
    out.labels.push_back(d.labels[r]);
  }
  return out;
}

TabularDataset select_columns(const TabularDataset& d,
                              const std::vector<std::size_t>& cols) {
  TabularDataset out;
  out.case_ids = d.case_ids;
  out.labels = d.labels;
  for (std::size_t c : cols)
    out.feature_names.push_back(c < d.feature_names.size()
                                    ? d.feature_names[c]
                                    : "f" + std::to_string(c));
  out.features.reserve(d.features.size());
  for (const auto& row : d.features) {
    std::vector<double> sub;
    sub.reserve(cols.size());
    for (std::size_t c : cols) sub.push_back(row[c]);
    out.features.push_back(std::move(sub));
  }
  return out;
}

}  // namespace

TabularDataset undersample(const TabularDataset& dataset, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    (dataset.labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw ValidationError("undersample: both classes must be present");

  std::vector<std::size_t>& majority = pos.size() > neg.size() ? pos : neg;
  const std::size_t keep = std::min(pos.size(), neg.size());
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);

  std::vector<std::size_t> rows(pos);
  rows.insert(rows.end(), neg.begin(), neg.end());
  std::sort(rows.begin(), rows.end());  // keep original row order
  return select_rows(dataset, rows);
}

GbmModel train(const TabularDataset& dataset, const GbmParams& params) {
  const std::size_t n = dataset.size();
  const std::size_t width = dataset.width();
  std::int64_t n_pos = std::accumulate(dataset.labels.begin(),
                                       dataset.labels.end(), std::int64_t{0});
  if (n_pos == 0 || n_pos == static_cast<std::int64_t>(n))
    throw ValidationError("train: both classes must be present");

  GbmModel model;
  model.learning_rate = params.learning_rate;
  model.feature_mean.assign(width, 0.0);
  model.feature_scale.assign(width, 1.0);
  for (std::size_t f = 0; f < width; ++f) {
    double mean = 0.0;
    for (const auto& row : dataset.features) mean += row[f];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& row : dataset.features) {
      double d = row[f] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    model.feature_mean[f] = mean;
    model.feature_scale[f] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  std::vector<std::vector<double>> x(n, std::vector<double>(width));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < width; ++f)
      x[i][f] = (dataset.features[i][f] - model.feature_mean[f]) /
                model.feature_scale[f];

  const double prior = static_cast<double>(n_pos) / static_cast<double>(n);
  model.bias = std::log(prior / (1.0 - prior));

  // per-feature sort orders, computed once
  std::vector<std::vector<std::size_t>> order(width);
  for (std::size_t f = 0; f < width; ++f) {
    order[f].resize(n);
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
  }

  std::vector<double> score(n, model.bias);
  std::vector<double> residual(n), hessian(n);

  for (int round = 0; round < params.rounds; ++round) {
    double rsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(score[i]);
      residual[i] = dataset.labels[i] - p;
      hessian[i] = std::max(p * (1.0 - p), 1e-12);
      rsum += residual[i];
    }

    // least-squares stump on the residuals; ties keep the earliest
    // feature/threshold
    double best_gain = 0.0;
    std::size_t best_f = 0;
    std::size_t best_cut = 0;  // split after position cut-1 in sort order
    bool found = false;
    for (std::size_t f = 0; f < width; ++f) {
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_sum += residual[order[f][k]];
        if (x[order[f][k]][f] == x[order[f][k + 1]][f]) continue;
        double nl = static_cast<double>(k + 1);
        double nr = static_cast<double>(n - k - 1);
        double right_sum = rsum - left_sum;
        double gain = left_sum * left_sum / nl + right_sum * right_sum / nr;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_f = f;
          best_cut = k + 1;
          found = true;
        }
      }
    }

    GbmModel::Stump stump;
    if (found) {
      stump.feature = best_f;
      const auto& ord = order[best_f];
      stump.threshold = 0.5 * (x[ord[best_cut - 1]][best_f] +
                               x[ord[best_cut]][best_f]);
      double gl = 0.0, hl = 0.0, gr = 0.0, hr = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = ord[k];
        if (k < best_cut) {
          gl += residual[i];
          hl += hessian[i];
        } else {
          gr += residual[i];
          hr += hessian[i];
        }
      }
      stump.left_value = std::clamp(gl / hl, -4.0, 4.0);
      stump.right_value = std::clamp(gr / hr, -4.0, 4.0);
    } else {
      // no informative split; Newton step on the whole sample
      double h = 0.0;
      for (std::size_t i = 0; i < n; ++i) h += hessian[i];
      double v = std::clamp(rsum / h, -4.0, 4.0);
      stump.left_value = stump.right_value = v;
      stump.threshold = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double v = x[i][stump.feature] < stump.threshold ? stump.left_value
                                                       : stump.right_value;
      score[i] += params.learning_rate * v;
    }
    model.stumps.push_back(stump);
  }
  return model;
}

std::vector<double> GbmModel::predict(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    double f = bias;
    for (const Stump& s : stumps) {
      double v = (row[s.feature] - feature_mean[s.feature]) /
                 feature_scale[s.feature];
      f += learning_rate * (v < s.threshold ? s.left_value : s.right_value);
    }
    out.push_back(sigmoid(f));
  }
  return out;
}

Predictions train_predict(const TabularDataset& dataset,
                          const GbmParams& params) {
  std::int64_t n_pos = std::accumulate(dataset.labels.begin(),
                                       dataset.labels.end(), std::int64_t{0});
  std::int64_t n_neg = static_cast<std::int64_t>(dataset.size()) - n_pos;
  if (n_pos < 2 || n_neg < 2)
    throw ValidationError("train_predict: need at least 2 cases per class");
  GbmModel model = train(dataset, params);
  Predictions out;
  out.scores = model.predict(dataset.features);
  for (double s : out.scores) out.predicted.push_back(s >= 0.5 ? 1 : 0);
  return out;
}

std::vector<std::size_t> greedy_forward_select(const TabularDataset& dataset,
                                               std::size_t k, int folds,
                                               std::uint64_t seed,
                                               const GbmParams& params) {
  if (k > dataset.width())
    throw ValidationError("greedy_forward_select: k exceeds feature count");
  if (k == 0) return {};
  if (folds < 2) throw ValidationError("greedy_forward_select: folds < 2");

  // stratified fold assignment, seeded
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    (dataset.labels[i] ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<int> fold_of(dataset.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i)
    fold_of[pos[i]] = static_cast<int>(i % folds);
  for (std::size_t i = 0; i < neg.size(); ++i)
    fold_of[neg[i]] = static_cast<int>(i % folds);

  auto cv_auroc = [&](const std::vector<std::size_t>& cols) {
    TabularDataset sub = select_columns(dataset, cols);
    double total = 0.0;
    int used_folds = 0;
    for (int fold = 0; fold < folds; ++fold) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < sub.size(); ++i)
        (fold_of[i] == fold ? test_rows : train_rows).push_back(i);
      TabularDataset test = select_rows(sub, test_rows);
      std::int64_t test_pos = std::accumulate(test.labels.begin(),
                                              test.labels.end(), std::int64_t{0});
      if (test_pos == 0 || test_pos == static_cast<std::int64_t>(test.size()))
        continue;  // AUROC undefined on a one-class fold
      GbmModel model = train(select_rows(sub, train_rows), params);
      total += metrics(model.predict(test.features), test.labels).auroc;
      ++used_folds;
    }
    if (used_folds == 0)
      throw ValidationError("greedy_forward_select: no usable folds");
    return total / used_folds;
  };

  std::vector<std::size_t> selected;
  std::vector<bool> used(dataset.width(), false);
  for (std::size_t step = 0; step < k; ++step) {
    double best = -1.0;
    std::size_t best_f = dataset.width();
    for (std::size_t f = 0; f < dataset.width(); ++f) {
      if (used[f]) continue;
      std::vector<std::size_t> cols(selected);
      cols.push_back(f);
      double score = cv_auroc(cols);
      if (score > best + 1e-12) {
        best = score;
        best_f = f;
      }
    }
    selected.push_back(best_f);
    used[best_f] = true;
  }
  return selected;
}

ModelMetrics metrics(const std::vector<double>& scores,
                     const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw ValidationError("metrics: size mismatch");
  ModelMetrics m;
  std::int64_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool pred = scores[i] >= 0.5;
    if (labels[i]) {
      ++n_pos;
      pred ? ++m.tp : ++m.fn;
    } else {
      ++n_neg;
      pred ? ++m.fp : ++m.tn;
    }
  }
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError("metrics: AUROC needs both classes");

  // AUROC via the rank formulation with midranks
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  std::vector<double> ranks(scores.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  double rank_pos = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t)
    if (labels[t]) rank_pos += ranks[t];
  m.auroc = (rank_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
            (static_cast<double>(n_pos) * static_cast<double>(n_neg));

  double tp = static_cast<double>(m.tp), tn = static_cast<double>(m.tn);
  double fp = static_cast<double>(m.fp), fn = static_cast<double>(m.fn);
  double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  m.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
  return m;
}

std::map<std::string, std::pair<double, int>> import_predictions(
    std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("empty predictions csv");
  const auto& header = rows[0].fields;
  auto col_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? header.size()
                              : static_cast<std::size_t>(it - header.begin());
  };
  std::size_t cid_col = col_of("case_id");
  std::size_t score_col = col_of("score");
  std::size_t pred_col = col_of("y_pred");
  if (cid_col == header.size())
    throw ValidationError("predictions csv: missing column \"case_id\"");
  if (score_col == header.size() && pred_col == header.size())
    throw ValidationError("predictions csv: need \"score\" or \"y_pred\"");

  std::map<std::string, std::pair<double, int>> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() < header.size())
      throw ValidationError("short row at line " +
                            std::to_string(row.line_number));
    const std::string& cid = row.fields[cid_col];
    if (out.count(cid))
      throw ValidationError("duplicate case_id \"" + cid +
                            "\" in predictions csv");
    double score;
    int pred;
    if (score_col != header.size()) {
      char* end = nullptr;
      score = std::strtod(row.fields[score_col].c_str(), &end);
      if (!end || *end != '\0')
        throw ValidationError("bad score at line " +
                              std::to_string(row.line_number));
      if (score < 0.0 || score > 1.0)
        throw ValidationError("score outside [0,1] at line " +
                              std::to_string(row.line_number));
      pred = score >= 0.5 ? 1 : 0;
    } else {
      const std::string& p = row.fields[pred_col];
      if (p != "0" && p != "1")
        throw ValidationError("y_pred must be 0 or 1 at line " +
                              std::to_string(row.line_number));
      pred = p == "1" ? 1 : 0;
      score = pred;
    }
    out.emplace(cid, std::make_pair(score, pred));
  }
  return out;
}

TabularDataset read_feature_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("empty feature csv");
  const auto& header = rows[0].fields;
  if (header.size() < 2 || header[0] != "case_id" || header[1] != "label")
    throw ValidationError("feature csv must start with case_id,label");
  TabularDataset out;
  out.feature_names.assign(header.begin() + 2, header.end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != header.size())
      throw ValidationError("ragged row at line " +
                            std::to_string(row.line_number));
    out.case_ids.push_back(row.fields[0]);
    if (row.fields[1] != "0" && row.fields[1] != "1")
      throw ValidationError("label must be 0 or 1 at line " +
                            std::to_string(row.line_number));
    out.labels.push_back(row.fields[1] == "1" ? 1 : 0);
    std::vector<double> feats;
    for (std::size_t c = 2; c < row.fields.size(); ++c) {
      char* end = nullptr;
      double v = std::strtod(row.fields[c].c_str(), &end);
      if (!end || *end != '\0')
        throw ValidationError("bad feature value at line " +
                              std::to_string(row.line_number));
      feats.push_back(v);
    }
    out.features.push_back(std::move(feats));
  }
  return out;
}

}  // namespace overdx
