#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "overdx/classifier.hpp"
#include "overdx/error.hpp"

using namespace overdx;

namespace {

TabularDataset make_dataset(std::size_t n, std::size_t width,
                            std::uint64_t seed,
                            double (*signal)(std::mt19937_64&, int)) {
  TabularDataset d;
  std::mt19937_64 rng(seed);
  for (std::size_t f = 0; f < width; ++f)
    d.feature_names.push_back("f" + std::to_string(f));
  for (std::size_t i = 0; i < n; ++i) {
    int label = static_cast<int>(rng() % 2);
    std::vector<double> row(width);
    for (std::size_t f = 0; f < width; ++f)
      row[f] = static_cast<double>(rng() % 1000) / 1000.0;
    row[0] = signal(rng, label);
    d.case_ids.push_back("c" + std::to_string(i));
    d.features.push_back(std::move(row));
    d.labels.push_back(label);
  }
  return d;
}

double separable(std::mt19937_64& rng, int label) {
  return label + static_cast<double>(rng() % 100) / 400.0;
}

}  // namespace

TEST_CASE("undersample balances classes and keeps row order") {
  TabularDataset d;
  for (int i = 0; i < 110; ++i) {
    d.case_ids.push_back("c" + std::to_string(i));
    d.features.push_back({static_cast<double>(i)});
    d.labels.push_back(i < 10 ? 1 : 0);
  }
  TabularDataset out = undersample(d, 7);
  CHECK(out.size() == 20);
  CHECK(std::count(out.labels.begin(), out.labels.end(), 1) == 10);
  CHECK(std::count(out.labels.begin(), out.labels.end(), 0) == 10);
  // rows keep their original relative order
  std::vector<double> firsts;
  for (const auto& row : out.features) firsts.push_back(row[0]);
  CHECK(std::is_sorted(firsts.begin(), firsts.end()));

  TabularDataset again = undersample(d, 7);
  CHECK(again.case_ids == out.case_ids);
  TabularDataset other = undersample(d, 8);
  CHECK(other.case_ids != out.case_ids);

  TabularDataset one_class;
  one_class.case_ids = {"a"};
  one_class.features = {{1.0}};
  one_class.labels = {1};
  CHECK_THROWS_AS(undersample(one_class, 1), ValidationError);
}

TEST_CASE("greedy selection finds the informative feature first") {
  TabularDataset d = make_dataset(200, 6, 99, separable);
  auto picked = greedy_forward_select(d, 3, 5, 1);
  REQUIRE(picked.size() == 3);
  CHECK(picked[0] == 0);
  // no duplicates
  std::vector<std::size_t> uniq = picked;
  std::sort(uniq.begin(), uniq.end());
  CHECK(std::adjacent_find(uniq.begin(), uniq.end()) == uniq.end());

  CHECK(greedy_forward_select(d, 0, 5, 1).empty());
  CHECK(greedy_forward_select(d, d.width(), 5, 1).size() == d.width());
  CHECK_THROWS_AS(greedy_forward_select(d, 99, 5, 1), ValidationError);
  CHECK_THROWS_AS(greedy_forward_select(d, 2, 1, 1), ValidationError);
}

TEST_CASE("boosted stumps separate an easy dataset") {
  TabularDataset d = make_dataset(300, 4, 5, separable);
  Predictions p = train_predict(d);
  ModelMetrics m = metrics(p.scores, d.labels);
  CHECK(m.auroc == 1.0);
  CHECK(m.mcc == 1.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(p.predicted[i] == d.labels[i]);
}

TEST_CASE("constant features fall back to the class prior") {
  TabularDataset d;
  for (int i = 0; i < 40; ++i) {
    d.case_ids.push_back("c" + std::to_string(i));
    d.features.push_back({1.0, 2.0});
    d.labels.push_back(i < 10 ? 1 : 0);
  }
  d.feature_names = {"a", "b"};
  Predictions p = train_predict(d);
  for (double s : p.scores) CHECK(s == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("training requires both classes") {
  TabularDataset d;
  for (int i = 0; i < 5; ++i) {
    d.case_ids.push_back("c" + std::to_string(i));
    d.features.push_back({static_cast<double>(i)});
    d.labels.push_back(1);
  }
  CHECK_THROWS_AS(train(d), ValidationError);
}

TEST_CASE("metrics hand values") {
  ModelMetrics perfect = metrics({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0});
  CHECK(perfect.auroc == 1.0);
  CHECK(perfect.mcc == 1.0);
  CHECK(perfect.tp == 2);
  CHECK(perfect.tn == 2);

  ModelMetrics inverted = metrics({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0});
  CHECK(inverted.auroc == 0.0);
  CHECK(inverted.mcc == -1.0);

  // one discordant pair of four: AUROC 3/4
  ModelMetrics mixed = metrics({0.9, 0.3, 0.4, 0.1}, {1, 1, 0, 0});
  CHECK(mixed.auroc == doctest::Approx(0.75));

  // tied scores count half
  ModelMetrics tied = metrics({0.5, 0.5}, {1, 0});
  CHECK(tied.auroc == doctest::Approx(0.5));

  // all predicted positive: MCC defined as 0
  ModelMetrics onesided = metrics({0.9, 0.8}, {1, 0});
  CHECK(onesided.tn == 0);
  CHECK(onesided.mcc == 0.0);
}

TEST_CASE("auroc is invariant to monotone score transforms") {
  std::mt19937_64 rng(77);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    scores.push_back(static_cast<double>(rng() % 1000) / 1000.0);
    labels.push_back(static_cast<int>(rng() % 2));
  }
  std::vector<double> squashed;
  for (double s : scores) squashed.push_back(s * s * 0.5);
  CHECK(metrics(scores, labels).auroc ==
        doctest::Approx(metrics(squashed, labels).auroc).epsilon(1e-12));
}

TEST_CASE("import_predictions parses scores and hard labels") {
  std::istringstream score_csv("case_id,score\nc1,0.7\nc2,0.2\n");
  auto scores = import_predictions(score_csv);
  CHECK(scores.at("c1").first == doctest::Approx(0.7));
  CHECK(scores.at("c1").second == 1);
  CHECK(scores.at("c2").second == 0);

  std::istringstream pred_csv("case_id,y_pred\nc1,1\nc2,0\n");
  auto preds = import_predictions(pred_csv);
  CHECK(preds.at("c1").second == 1);

  std::istringstream dup("case_id,score\nc1,0.7\nc1,0.2\n");
  CHECK_THROWS_AS(import_predictions(dup), ValidationError);
  std::istringstream range("case_id,score\nc1,1.7\n");
  CHECK_THROWS_AS(import_predictions(range), ValidationError);
}

TEST_CASE("feature csv round trip") {
  std::istringstream in(
      "case_id,label,f1,f2\n"
      "c1,1,0.5,2\n"
      "c2,0,0.25,3\n");
  TabularDataset d = read_feature_csv(in);
  CHECK(d.size() == 2);
  CHECK(d.feature_names == std::vector<std::string>{"f1", "f2"});
  CHECK(d.features[1] == std::vector<double>{0.25, 3.0});
  CHECK(d.labels == std::vector<int>{1, 0});

  std::istringstream bad("id,label,f1\nc1,1,0.5\n");
  CHECK_THROWS_AS(read_feature_csv(bad), ValidationError);
  std::istringstream badlabel("case_id,label,f1\nc1,2,0.5\n");
  CHECK_THROWS_AS(read_feature_csv(badlabel), ValidationError);
}
