#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "malstat/error.hpp"
#include "malstat/eval.hpp"
#include "malstat/folds.hpp"

using namespace malstat;

namespace {

Dataset perfect_feature_dataset(int n) {
  Dataset ds;
  ds.schema = {{"copy", AttributeKind::binary, {}}, {"noise", AttributeKind::numeric, {}}};
  ds.class_names = {"neg", "pos"};
  std::mt19937 rng(1);
  for (int i = 0; i < n; ++i) {
    FeatureVector fv;
    fv.sample_id = "s" + std::to_string(i);
    fv.label = i % 2;
    fv.values = {static_cast<double>(i % 2), std::uniform_real_distribution<>(0, 1)(rng)};
    ds.samples.push_back(fv);
  }
  return ds;
}

}  // namespace

TEST_CASE("cross_validate: perfect feature reaches 100% with c45") {
  Dataset ds = perfect_feature_dataset(40);
  ModelSpec spec;
  spec.method = "c45";
  EvalReport report = cross_validate(ds, spec, 5, 42);
  CHECK(report.mean_accuracy == doctest::Approx(100.0));
  CHECK(report.pooled_accuracy == doctest::Approx(100.0));
  REQUIRE(report.fold_accuracy.size() == 5);

  // Confusion matrix rows sum to the per-class test counts (20 each).
  CHECK(report.confusion[0][0] + report.confusion[0][1] == 20);
  CHECK(report.confusion[1][0] + report.confusion[1][1] == 20);
}

TEST_CASE("cross_validate is deterministic and parallel matches serial") {
  Dataset ds = perfect_feature_dataset(30);
  ModelSpec spec;
  spec.method = "naive_bayes";
  EvalReport a = cross_validate(ds, spec, 5, 7);
  EvalReport b = cross_validate(ds, spec, 5, 7);
  EvalReport c = cross_validate_serial(ds, spec, 5, 7);
  CHECK(a.fold_accuracy == b.fold_accuracy);
  CHECK(a.confusion == b.confusion);
  CHECK(a.fold_accuracy == c.fold_accuracy);
  CHECK(a.confusion == c.confusion);
}

TEST_CASE("cross_validate: shuffled labels hover near chance") {
  std::mt19937 rng(2024);
  Dataset ds;
  ds.schema = {{"f1", AttributeKind::numeric, {}}, {"f2", AttributeKind::numeric, {}}};
  ds.class_names = {"neg", "pos"};
  for (int i = 0; i < 200; ++i) {
    FeatureVector fv;
    fv.sample_id = "s" + std::to_string(i);
    fv.label = i % 2;  // balanced
    fv.values = {std::uniform_real_distribution<>(0, 1)(rng),
                 std::uniform_real_distribution<>(0, 1)(rng)};
    ds.samples.push_back(fv);
  }
  ModelSpec spec;
  spec.method = "naive_bayes";
  EvalReport report = cross_validate(ds, spec, 5, 3);
  CHECK(report.mean_accuracy > 40.0);
  CHECK(report.mean_accuracy < 60.0);
}

TEST_CASE("cross_validate propagates training errors with the fold index") {
  Dataset ds = perfect_feature_dataset(10);
  ds.class_names.push_back("третий");
  ds.class_names[2] = "third";
  ds.samples[9].label = 2;  // lone sample of a third class
  ModelSpec spec;
  spec.method = "svm";  // requires exactly 2 classes
  try {
    cross_validate(ds, spec, 5, 1);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
}

TEST_CASE("no test-fold leakage: removing a test sample leaves the model unchanged") {
  Dataset ds = perfect_feature_dataset(20);
  auto folds = stratified_folds(ds, 5, 11);
  std::vector<int> train_rows;
  for (size_t f = 1; f < folds.size(); ++f) {
    train_rows.insert(train_rows.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  Dataset train = ds.subset(train_rows);

  ModelSpec spec;
  spec.method = "knn";
  std::string before = train_model(train, spec).save_string();

  // Delete a fold-0 (test) sample and retrain on the same training rows.
  Dataset ds2 = ds;
  ds2.samples.erase(ds2.samples.begin() + folds[0][0]);
  // Recompute the same training subset by sample id.
  std::vector<int> train_rows2;
  for (size_t i = 0; i < ds2.samples.size(); ++i) {
    for (int r : train_rows) {
      if (ds2.samples[i].sample_id == ds.samples[r].sample_id) {
        train_rows2.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  Dataset train2 = ds2.subset(train_rows2);
  std::string after = train_model(train2, spec).save_string();
  CHECK(before == after);
}

TEST_CASE("grid report renders 2-decimal cells, best flags, and missing cells") {
  EvalReport a;
  a.mean_accuracy = 97.631;
  EvalReport b;
  b.mean_accuracy = 90.0;
  std::vector<std::vector<std::optional<EvalReport>>> cells = {{a, b, std::nullopt}};
  GridReport grid = grid_report({"Bn_vs_Ml000"}, {"c45", "knn", "svm"}, cells);
  std::string csv = grid.to_csv();
  CHECK(csv.find("97.63") != std::string::npos);
  CHECK(csv.find("90.00") != std::string::npos);
  CHECK(csv.find("—") != std::string::npos);
  CHECK(csv.find(",c45\n") != std::string::npos);  // best column

  std::string md = grid.to_markdown();
  CHECK(md.find("**97.63**") != std::string::npos);
}

TEST_CASE("grid report flags ties for best") {
  EvalReport a;
  a.mean_accuracy = 88.0;
  EvalReport b;
  b.mean_accuracy = 88.0;
  std::vector<std::vector<std::optional<EvalReport>>> cells = {{a, b}};
  GridReport grid = grid_report({"t"}, {"m1", "m2"}, cells);
  CHECK(grid.to_csv().find("m1;m2") != std::string::npos);
}

TEST_CASE("grid report single row arity") {
  EvalReport a;
  a.mean_accuracy = 50.0;
  EvalReport b;
  b.mean_accuracy = 60.0;
  std::vector<std::vector<std::optional<EvalReport>>> cells = {{a, b}};
  GridReport grid = grid_report({"only"}, {"x", "y"}, cells);
  REQUIRE(grid.mean_accuracy.size() == 1);
  CHECK(grid.mean_accuracy[0].size() == 2);
}

TEST_CASE("frequency report: top tokens with side-by-side fractions") {
  NgramVocabulary vocab;
  vocab.n = 1;
  for (int i = 0; i < 5; ++i) vocab.tokens.push_back(GramToken{{"op" + std::to_string(i)}});
  std::vector<double> ref = {1.0, 0.75, 0.5, 0.25, 0.0};
  std::vector<double> other = {0.0, 0.5, 0.5, 1.0, 0.0};
  FrequencyReport report = frequency_report(vocab, {{"benign", ref}, {"malware", other}}, 3);
  REQUIRE(report.tokens.size() == 3);
  CHECK(report.tokens[0].text() == "op0");
  CHECK(report.fractions[0][0] == 1.0);
  CHECK(report.fractions[0][1] == 0.0);
  std::string csv = report.to_csv();
  CHECK(csv.find("ngram,benign,malware") != std::string::npos);
}

TEST_CASE("frequency report emits all tokens when fewer than requested") {
  NgramVocabulary vocab;
  vocab.n = 1;
  vocab.tokens = {GramToken{{"a"}}, GramToken{{"b"}}};
  FrequencyReport report = frequency_report(vocab, {{"c", {0.5, 0.25}}}, 20);
  CHECK(report.tokens.size() == 2);
}

TEST_CASE("frequency report fractions match an independent recount") {
  // Build sequences, compute class_frequency per token, then recount inline.
  std::vector<Sequence> files = {{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "c"}};
  NgramVocabulary vocab;
  vocab.n = 1;
  vocab.tokens = {GramToken{{"a"}}, GramToken{{"b"}}, GramToken{{"c"}}};
  std::vector<double> fractions;
  for (const auto& t : vocab.tokens) fractions.push_back(class_frequency(t, files));
  FrequencyReport report = frequency_report(vocab, {{"cls", fractions}}, 3);
  for (size_t i = 0; i < report.tokens.size(); ++i) {
    const std::string sym = report.tokens[i].parts[0];
    int count = 0;
    for (const auto& f : files) {
      bool found = false;
      for (const auto& s : f) found |= s == sym;
      count += found;
    }
    CHECK(report.fractions[i][0] == doctest::Approx(static_cast<double>(count) / files.size()));
  }
}
