#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "malstat/error.hpp"
#include "malstat/feature_select.hpp"
#include "oracles.hpp"

using namespace malstat;

namespace {

AttributeSpec nominal_attr(const std::string& name, int cats) {
  AttributeSpec a;
  a.name = name;
  a.kind = AttributeKind::nominal;
  for (int c = 0; c < cats; ++c) a.categories.push_back("v" + std::to_string(c));
  return a;
}

Dataset symbolic_dataset(std::mt19937& rng, int n_attrs, int n_samples, int arity = 3) {
  Dataset ds;
  ds.class_names = {"A", "B"};
  for (int a = 0; a < n_attrs; ++a) ds.schema.push_back(nominal_attr("f" + std::to_string(a), arity));
  for (int i = 0; i < n_samples; ++i) {
    FeatureVector fv;
    fv.sample_id = "s" + std::to_string(i);
    fv.label = std::uniform_int_distribution<int>(0, 1)(rng);
    for (int a = 0; a < n_attrs; ++a) {
      fv.values.push_back(std::uniform_int_distribution<int>(0, arity - 1)(rng));
    }
    ds.samples.push_back(fv);
  }
  ds.samples[0].label = 0;
  ds.samples[1 % n_samples].label = 1;
  return ds;
}

}  // namespace

TEST_CASE("entropy basics") {
  std::vector<int> pure = {0, 0, 0};
  CHECK(entropy(pure, 1) == 0.0);
  std::vector<int> uniform = {0, 1};
  CHECK(entropy(uniform, 2) == doctest::Approx(1.0));
  std::vector<int> skewed = {0, 0, 1, 1, 1, 1};
  CHECK(entropy(skewed, 2) == doctest::Approx(0.9183).epsilon(1e-4));
  std::vector<int> empty;
  CHECK_THROWS_AS(entropy(empty, 2), Error);
}

TEST_CASE("info_gain: perfect predictor reaches class entropy") {
  Dataset ds;
  ds.class_names = {"A", "B"};
  ds.schema.push_back(nominal_attr("copy", 2));
  for (int i = 0; i < 6; ++i) {
    FeatureVector fv;
    fv.label = i % 2;
    fv.values = {static_cast<double>(i % 2)};
    ds.samples.push_back(fv);
  }
  std::vector<int> labels = {0, 1, 0, 1, 0, 1};
  CHECK(info_gain(ds, 0) == doctest::Approx(entropy(labels, 2)));
}

TEST_CASE("info_gain: constant attribute gains nothing") {
  Dataset ds;
  ds.class_names = {"A", "B"};
  ds.schema.push_back(nominal_attr("const", 2));
  for (int i = 0; i < 6; ++i) {
    FeatureVector fv;
    fv.label = i % 2;
    fv.values = {0.0};
    ds.samples.push_back(fv);
  }
  CHECK(info_gain(ds, 0) == doctest::Approx(0.0));
}

TEST_CASE("info_gain matches partition oracle on random datasets") {
  std::mt19937 rng(42);
  for (int iter = 0; iter < 100; ++iter) {
    Dataset ds = symbolic_dataset(rng, 3, 12);
    // sprinkle missing values
    for (auto& s : ds.samples) {
      if (std::uniform_real_distribution<>(0, 1)(rng) < 0.15) s.values[0] = missing_value();
    }
    for (int a = 0; a < 3; ++a) {
      CHECK(info_gain(ds, a) == doctest::Approx(oracle::info_gain_by_partition(ds, a)).epsilon(1e-9));
    }
  }
}

TEST_CASE("info_gain is invariant to sample order") {
  std::mt19937 rng(10);
  Dataset ds = symbolic_dataset(rng, 2, 20);
  double before = info_gain(ds, 0);
  std::shuffle(ds.samples.begin(), ds.samples.end(), rng);
  CHECK(info_gain(ds, 0) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("select_by_threshold reproduces the published-style cut") {
  FeatureRanking r;
  r.merits = {0.377, 0.278, 0.118, 0.099};
  r.ordering = {0, 1, 2, 3};
  FeatureSubset s = select_by_threshold(r, 0.1);
  CHECK(s.attributes == std::vector<int>{0, 1, 2});
  CHECK(select_by_threshold(r, 0.0).attributes.size() == 4);
  CHECK(select_by_threshold(r, 0.5).attributes.empty());
}

TEST_CASE("rank_features: parallel equals serial, ordered by merit") {
  std::mt19937 rng(3);
  Dataset ds = symbolic_dataset(rng, 6, 40);
  FeatureRanking par_r = rank_features(ds);
  FeatureRanking ser_r = rank_features_serial(ds);
  CHECK(par_r.merits == ser_r.merits);
  CHECK(par_r.ordering == ser_r.ordering);
  for (size_t i = 1; i < par_r.ordering.size(); ++i) {
    CHECK(par_r.merits[par_r.ordering[i - 1]] >= par_r.merits[par_r.ordering[i]]);
  }
}

TEST_CASE("symmetric uncertainty bounds and self-correlation") {
  std::mt19937 rng(8);
  Dataset ds = symbolic_dataset(rng, 4, 30);
  for (int a = 0; a < 4; ++a) {
    CHECK(symmetric_uncertainty(ds, a, a) == doctest::Approx(1.0));
    for (int b = 0; b < 4; ++b) {
      double su = symmetric_uncertainty(ds, a, b);
      CHECK(su >= 0.0);
      CHECK(su <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("cfs: single informative attribute is selected alone") {
  std::mt19937 rng(21);
  Dataset ds;
  ds.class_names = {"A", "B"};
  ds.schema.push_back(nominal_attr("signal", 2));
  ds.schema.push_back(nominal_attr("noise1", 3));
  ds.schema.push_back(nominal_attr("noise2", 3));
  for (int i = 0; i < 40; ++i) {
    FeatureVector fv;
    fv.label = i % 2;
    fv.values = {static_cast<double>(i % 2),
                 static_cast<double>(std::uniform_int_distribution<int>(0, 2)(rng)),
                 static_cast<double>(std::uniform_int_distribution<int>(0, 2)(rng))};
    ds.samples.push_back(fv);
  }
  FeatureSubset s = cfs_select(ds);
  REQUIRE(s.attributes.size() == 1);
  CHECK(s.attributes[0] == 0);
}

TEST_CASE("cfs: duplicate class copies are not both kept") {
  Dataset ds;
  ds.class_names = {"A", "B"};
  ds.schema.push_back(nominal_attr("copy1", 2));
  ds.schema.push_back(nominal_attr("copy2", 2));
  ds.schema.push_back(nominal_attr("noise", 2));
  std::mt19937 rng(4);
  for (int i = 0; i < 30; ++i) {
    FeatureVector fv;
    fv.label = i % 2;
    double v = i % 2;
    fv.values = {v, v, static_cast<double>(std::uniform_int_distribution<int>(0, 1)(rng))};
    ds.samples.push_back(fv);
  }
  FeatureSubset s = cfs_select(ds);
  int copies = 0;
  for (int a : s.attributes) copies += (a == 0 || a == 1);
  CHECK(copies == 1);
}

TEST_CASE("cfs: all-constant attributes yield an empty subset") {
  Dataset ds;
  ds.class_names = {"A", "B"};
  ds.schema.push_back(nominal_attr("c1", 2));
  ds.schema.push_back(nominal_attr("c2", 2));
  for (int i = 0; i < 10; ++i) {
    FeatureVector fv;
    fv.label = i % 2;
    fv.values = {0.0, 1.0};
    ds.samples.push_back(fv);
  }
  FeatureSubset s = cfs_select(ds);
  CHECK(s.attributes.empty());
}

TEST_CASE("cfs greedy beats rejected single-attribute subsets (exhaustive oracle)") {
  std::mt19937 rng(55);
  for (int iter = 0; iter < 25; ++iter) {
    int p = std::uniform_int_distribution<int>(2, 5)(rng);
    Dataset ds = symbolic_dataset(rng, p, 24, 2);
    // Plant some label correlation so merits are not all zero.
    for (auto& s : ds.samples) {
      if (std::uniform_real_distribution<>(0, 1)(rng) < 0.7) s.values[0] = s.label;
    }
    FeatureSubset greedy = cfs_select(ds);

    for (int a = 0; a < p; ++a) {
      double single = symmetric_uncertainty(ds, a, -1);
      bool rejected = std::find(greedy.attributes.begin(), greedy.attributes.end(), a) ==
                      greedy.attributes.end();
      if (rejected) CHECK(greedy.merit + 1e-9 >= single);
    }
  }
}

TEST_CASE("cfs best-first search can only match or improve greedy") {
  std::mt19937 rng(66);
  Dataset ds = symbolic_dataset(rng, 4, 40, 2);
  for (auto& s : ds.samples) {
    if (std::uniform_real_distribution<>(0, 1)(rng) < 0.8) s.values[1] = s.label;
  }
  CfsOptions bf;
  bf.search = CfsSearch::best_first;
  FeatureSubset a = cfs_select(ds);
  FeatureSubset b = cfs_select(ds, bf);
  CHECK(b.merit + 1e-12 >= a.merit);
}

TEST_CASE("cfs greedy merit dominates the best single attribute") {
  std::mt19937 rng(91);
  for (int iter = 0; iter < 10; ++iter) {
    Dataset ds = symbolic_dataset(rng, 5, 40, 2);
    for (auto& s : ds.samples) {
      if (std::uniform_real_distribution<>(0, 1)(rng) < 0.6) s.values[2] = s.label;
    }
    FeatureSubset greedy = cfs_select(ds);
    double best_single = 0;
    for (int a = 0; a < 5; ++a) best_single = std::max(best_single, symmetric_uncertainty(ds, a, -1));
    CHECK(greedy.merit + 1e-9 >= best_single);
  }
}
