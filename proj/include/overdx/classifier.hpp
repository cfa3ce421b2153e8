#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace overdx {

struct TabularDataset {
  std::vector<std::string> case_ids;
  std::vector<std::vector<double>> features;  // row-major, consistent width
  std::vector<int> labels;                    // 0/1
  std::vector<std::string> feature_names;

  std::size_t size() const { return case_ids.size(); }
  std::size_t width() const {
    return features.empty() ? feature_names.size() : features[0].size();
  }
};

struct ModelMetrics {
  double auroc = 0.0;
  double mcc = 0.0;
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

struct GbmParams {
  int rounds = 200;
  double learning_rate = 0.1;
};

// Gradient-boosted depth-1 trees over standardized features, logistic loss.
class GbmModel {
 public:
  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const;

  struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    double left_value = 0.0;   // feature < threshold
    double right_value = 0.0;
  };

  double bias = 0.0;
  double learning_rate = 0.1;
  std::vector<Stump> stumps;
  std::vector<double> feature_mean, feature_scale;
};

// Random downsample of the majority class to minority size, seeded.
TabularDataset undersample(const TabularDataset& dataset, std::uint64_t seed);

// Adds the feature maximizing cross-validated AUROC of the baseline learner,
// k times. Ties break on the smaller feature index.
std::vector<std::size_t> greedy_forward_select(const TabularDataset& dataset,
                                               std::size_t k, int folds,
                                               std::uint64_t seed,
                                               const GbmParams& params = {});

GbmModel train(const TabularDataset& dataset, const GbmParams& params = {});

struct Predictions {
  std::vector<double> scores;      // in [0,1]
  std::vector<int> predicted;      // threshold 0.5
};

Predictions train_predict(const TabularDataset& dataset,
                          const GbmParams& params = {});

ModelMetrics metrics(const std::vector<double>& scores,
                     const std::vector<int>& labels);

// CSV with case_id plus either score (in [0,1]) or y_pred (0/1).
std::map<std::string, std::pair<double, int>> import_predictions(
    std::istream& in);

// CSV: case_id,label,f1..fn
TabularDataset read_feature_csv(std::istream& in);

}  // namespace overdx
