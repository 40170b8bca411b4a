#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"
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

AttributeSpec numeric_attr(const std::string& name) { return {name, AttributeKind::numeric, {}}; }

AttributeSpec binary_attr(const std::string& name) { return {name, AttributeKind::binary, {}}; }

Dataset make_dataset(std::vector<AttributeSpec> schema, std::vector<std::string> classes,
                     const std::vector<std::pair<std::vector<double>, int>>& rows) {
  Dataset ds;
  ds.schema = std::move(schema);
  ds.class_names = std::move(classes);
  int i = 0;
  for (const auto& [values, label] : rows) {
    FeatureVector fv;
    fv.sample_id = "s" + std::to_string(i++);
    fv.label = label;
    fv.values = values;
    ds.samples.push_back(fv);
  }
  return ds;
}

Dataset random_symbolic(std::mt19937& rng, int max_attrs = 4, int max_samples = 10) {
  int p = std::uniform_int_distribution<int>(1, max_attrs)(rng);
  int n = std::uniform_int_distribution<int>(2, max_samples)(rng);
  std::vector<AttributeSpec> schema;
  for (int a = 0; a < p; ++a) {
    schema.push_back(nominal_attr("f" + std::to_string(a), std::uniform_int_distribution<int>(2, 3)(rng)));
  }
  std::vector<std::pair<std::vector<double>, int>> rows;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v;
    for (int a = 0; a < p; ++a) {
      v.push_back(std::uniform_int_distribution<int>(0, static_cast<int>(schema[a].categories.size()) - 1)(rng));
    }
    rows.push_back({v, std::uniform_int_distribution<int>(0, 1)(rng)});
  }
  rows[0].second = 0;
  rows[1].second = 1;
  return make_dataset(schema, {"neg", "pos"}, rows);
}

// Two linearly separable Gaussian blobs in 2-D.
Dataset blob_dataset(std::mt19937& rng, int per_class) {
  std::vector<std::pair<std::vector<double>, int>> rows;
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int i = 0; i < per_class; ++i) {
    rows.push_back({{-2.0 + noise(rng), -2.0 + noise(rng)}, 0});
    rows.push_back({{2.0 + noise(rng), 2.0 + noise(rng)}, 1});
  }
  return make_dataset({numeric_attr("x"), numeric_attr("y")}, {"neg", "pos"}, rows);
}

double training_accuracy(const TrainedModel& model, const Dataset& ds) {
  int correct = 0;
  for (const FeatureVector& s : ds.samples) {
    if (model.classify(s).class_index == s.label) ++correct;
  }
  return static_cast<double>(correct) / ds.size();
}

Dataset xor_dataset() {
  return make_dataset({binary_attr("x1"), binary_attr("x2")}, {"zero", "one"},
                      {{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}});
}

}  // namespace

// ---------------------------------------------------------------------- NB

TEST_CASE("naive bayes: single-class training set always answers that class") {
  Dataset ds = make_dataset({nominal_attr("f", 2)}, {"only"}, {{{0}, 0}, {{1}, 0}});
  auto model = train_naive_bayes(ds);
  FeatureVector q;
  q.values = {1.0};
  Prediction p = model.classify(q);
  CHECK(p.class_index == 0);
  CHECK(p.scores[0] == doctest::Approx(1.0));
}

TEST_CASE("naive bayes: deterministic counts with laplace 0") {
  Dataset ds = make_dataset({nominal_attr("v", 2)}, {"C1", "C2"}, {{{0}, 0}, {{1}, 1}});
  auto model = train_naive_bayes(ds, 0.0);
  FeatureVector q;
  q.values = {0.0};
  Prediction p = model.classify(q);
  CHECK(p.class_index == 0);
  CHECK(p.scores[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("naive bayes matches the count oracle on random datasets") {
  std::mt19937 rng(2025);
  for (int iter = 0; iter < 100; ++iter) {
    Dataset ds = random_symbolic(rng);
    auto model = train_naive_bayes(ds, 0.0);
    for (const FeatureVector& s : ds.samples) {
      Prediction p = model.classify(s);
      std::vector<double> expect = oracle::naive_bayes_posterior_by_counts(ds, s.values);
      for (size_t k = 0; k < expect.size(); ++k) {
        CHECK(p.scores[k] == doctest::Approx(expect[k]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("naive bayes posteriors sum to one") {
  std::mt19937 rng(7);
  Dataset ds = random_symbolic(rng, 4, 10);
  auto model = train_naive_bayes(ds);
  for (const FeatureVector& s : ds.samples) {
    Prediction p = model.classify(s);
    double sum = 0;
    for (double v : p.scores) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("naive bayes: uninformative features give uniform posteriors") {
  Dataset ds = make_dataset({nominal_attr("f", 2)}, {"A", "B"},
                            {{{0}, 0}, {{1}, 0}, {{0}, 1}, {{1}, 1}});
  auto model = train_naive_bayes(ds);
  FeatureVector q;
  q.values = {0.0};
  Prediction p = model.classify(q);
  CHECK(p.scores[0] == doctest::Approx(0.5));
  CHECK(p.scores[1] == doctest::Approx(0.5));
  CHECK(p.class_index == 0);  // tie resolves to the lowest class index
}

// ---------------------------------------------------------------- BayesNet

TEST_CASE("bayes net (naive) predicts identically to naive bayes") {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 100; ++iter) {
    Dataset ds = random_symbolic(rng);
    auto nb = train_naive_bayes(ds, 1.0);
    auto bn = train_bayes_net(ds, "naive");
    for (const FeatureVector& s : ds.samples) {
      Prediction a = nb.classify(s);
      Prediction b = bn.classify(s);
      CHECK(a.class_index == b.class_index);
      for (size_t k = 0; k < a.scores.size(); ++k) {
        CHECK(a.scores[k] == doctest::Approx(b.scores[k]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("bayes net tan links duplicated features and matches CPT enumeration") {
  // B is a copy of A; C is independent noise.
  std::mt19937 rng(3);
  std::vector<std::pair<std::vector<double>, int>> rows;
  for (int i = 0; i < 40; ++i) {
    double a = std::uniform_int_distribution<int>(0, 1)(rng);
    double c = std::uniform_int_distribution<int>(0, 1)(rng);
    int label = (std::uniform_real_distribution<>(0, 1)(rng) < 0.8) ? static_cast<int>(a) : 1 - static_cast<int>(a);
    rows.push_back({{a, a, c}, label});
  }
  Dataset ds = make_dataset({binary_attr("A"), binary_attr("B"), binary_attr("C")}, {"n", "p"}, rows);
  auto bn = train_bayes_net(ds, "tan");

  // The copy pair must be linked in the tree.
  bool linked = bn.parent[1] == 0 || bn.parent[0] == 1;
  CHECK(linked);

  // Classify must equal direct enumeration of the factorization:
  // P(c|x) proportional to prior(c) * prod_a CPT_a(x_a | x_parent, c).
  for (const FeatureVector& s : ds.samples) {
    Prediction p = bn.classify(s);
    std::vector<double> post(2);
    for (int k = 0; k < 2; ++k) {
      double prod = bn.priors[k];
      for (size_t a = 0; a < 3; ++a) {
        int v = static_cast<int>(s.values[a]);
        int pa = bn.parent[a];
        if (pa >= 0) {
          prod *= bn.cpt[a][static_cast<int>(s.values[pa])][v][k];
        } else {
          prod *= bn.marginal[a][v][k];
        }
      }
      post[k] = prod;
    }
    double total = post[0] + post[1];
    CHECK(p.scores[0] == doctest::Approx(post[0] / total).epsilon(1e-9));
    CHECK(p.scores[1] == doctest::Approx(post[1] / total).epsilon(1e-9));
  }
}

TEST_CASE("bayes net with no features returns class priors") {
  Dataset ds;
  ds.class_names = {"A", "B", "C"};
  for (int i = 0; i < 6; ++i) {
    FeatureVector fv;
    fv.label = i % 3;
    ds.samples.push_back(fv);
  }
  auto bn = train_bayes_net(ds, "naive");
  FeatureVector q;
  Prediction p = bn.classify(q);
  for (int k = 0; k < 3; ++k) CHECK(p.scores[k] == doctest::Approx(bn.priors[k]));
}

TEST_CASE("bayes net tan with one feature falls back to naive") {
  Dataset ds = make_dataset({binary_attr("only")}, {"A", "B"}, {{{0}, 0}, {{1}, 1}});
  auto bn = train_bayes_net(ds, "tan");
  CHECK(bn.fell_back_to_naive);
  CHECK(bn.parent[0] == -1);
}

// --------------------------------------------------------------------- C45

TEST_CASE("c45 fits XOR with a depth-2 tree at 100% training accuracy") {
  Dataset ds = xor_dataset();
  auto model = train_c45(ds, 2, 0.0);  // pruning off
  CHECK(model.depth() == 2);
  CHECK(training_accuracy(TrainedModel(model), ds) == 1.0);
}

TEST_CASE("c45 root split lands on the midpoint threshold") {
  Dataset ds = make_dataset({numeric_attr("f")}, {"A", "B"},
                            {{{1}, 0}, {{2}, 0}, {{9}, 1}, {{10}, 1}});
  auto model = train_c45(ds, 2, 0.25);
  REQUIRE(!model.root().leaf);
  CHECK(model.root().attr == 0);
  CHECK(model.root().numeric_split);
  CHECK(model.root().threshold == doctest::Approx(5.5));
}

TEST_CASE("c45 collapses a pure dataset to a single leaf") {
  Dataset ds = make_dataset({nominal_attr("f", 2)}, {"A"}, {{{0}, 0}, {{1}, 0}, {{0}, 0}});
  auto model = train_c45(ds);
  CHECK(model.root().leaf);
  CHECK(model.nodes.size() == 1);
}

TEST_CASE("unpruned c45 reaches 100% training accuracy on consistent data") {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 20; ++iter) {
    // Labels as a deterministic function of the attributes: consistent.
    int p = std::uniform_int_distribution<int>(2, 3)(rng);
    std::vector<AttributeSpec> schema;
    for (int a = 0; a < p; ++a) schema.push_back(nominal_attr("f" + std::to_string(a), 2));
    std::vector<std::pair<std::vector<double>, int>> rows;
    bool seen0 = false, seen1 = false;
    for (int i = 0; i < 24; ++i) {
      std::vector<double> v;
      int acc = 0;
      for (int a = 0; a < p; ++a) {
        int bit = std::uniform_int_distribution<int>(0, 1)(rng);
        v.push_back(bit);
        acc ^= bit;
      }
      (acc ? seen1 : seen0) = true;
      rows.push_back({v, acc});
    }
    if (!seen0 || !seen1) continue;
    Dataset ds = make_dataset(schema, {"zero", "one"}, rows);
    auto model = train_c45(ds, 2, 0.0);
    CHECK(training_accuracy(TrainedModel(model), ds) == 1.0);
  }
}

TEST_CASE("c45 pruning can only shrink the tree") {
  std::mt19937 rng(13);
  Dataset ds = blob_dataset(rng, 30);
  // add label noise so pruning has something to remove
  for (auto& s : ds.samples) {
    if (std::uniform_real_distribution<>(0, 1)(rng) < 0.15) s.label = 1 - s.label;
  }
  auto unpruned = train_c45(ds, 2, 0.0);
  auto pruned = train_c45(ds, 2, 0.25);
  int unpruned_leaves = 0, pruned_leaves = 0;
  for (const auto& n : unpruned.nodes) unpruned_leaves += n.leaf;
  for (const auto& n : pruned.nodes) pruned_leaves += n.leaf;
  CHECK(pruned_leaves <= unpruned_leaves);
}

// --------------------------------------------------------------------- kNN

TEST_CASE("knn k=1 returns the label of an exact training point") {
  std::mt19937 rng(17);
  Dataset ds = blob_dataset(rng, 10);
  auto model = train_knn(ds, 1);
  for (const FeatureVector& s : ds.samples) {
    CHECK(model.classify(s).class_index == s.label);
  }
}

TEST_CASE("knn k=3 majority vote") {
  Dataset ds = make_dataset({numeric_attr("x")}, {"A", "B"},
                            {{{0.0}, 0}, {{0.1}, 0}, {{0.2}, 1}, {{5.0}, 1}});
  auto model = train_knn(ds, 3);
  FeatureVector q;
  q.values = {0.05};
  CHECK(model.classify(q).class_index == 0);  // neighbors A, A, B
}

TEST_CASE("knn matches the all-pairs oracle on random 2-D data") {
  std::mt19937 rng(23);
  Dataset ds = blob_dataset(rng, 10);  // 20 points
  auto model = train_knn(ds, 5);

  // Oracle: recompute scaled distances directly.
  double minx[2], maxx[2];
  for (int a = 0; a < 2; ++a) {
    minx[a] = 1e300;
    maxx[a] = -1e300;
    for (auto& s : ds.samples) {
      minx[a] = std::min(minx[a], s.values[a]);
      maxx[a] = std::max(maxx[a], s.values[a]);
    }
  }
  auto scale = [&](double v, int a) { return (v - minx[a]) / (maxx[a] - minx[a]); };

  for (int q = 0; q < 50; ++q) {
    FeatureVector query;
    query.values = {std::uniform_real_distribution<>(-3, 3)(rng),
                    std::uniform_real_distribution<>(-3, 3)(rng)};
    std::vector<std::pair<double, int>> dist;
    for (size_t i = 0; i < ds.size(); ++i) {
      double dx = scale(query.values[0], 0) - scale(ds.samples[i].values[0], 0);
      double dy = scale(query.values[1], 1) - scale(ds.samples[i].values[1], 1);
      dist.push_back({std::sqrt(dx * dx + dy * dy), ds.samples[i].label});
    }
    std::stable_sort(dist.begin(), dist.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    int votes[2] = {0, 0};
    for (int r = 0; r < 5; ++r) votes[dist[r].second]++;
    int expect = votes[1] > votes[0] ? 1 : 0;
    CHECK(model.classify(query).class_index == expect);
  }
}

TEST_CASE("knn rejects k greater than the instance count at classify time") {
  Dataset ds = make_dataset({numeric_attr("x")}, {"A", "B"}, {{{0.0}, 0}, {{1.0}, 1}});
  auto model = train_knn(ds, 5);
  FeatureVector q;
  q.values = {0.5};
  CHECK_THROWS_AS(model.classify(q), Error);
}

// --------------------------------------------------------------------- SVM

TEST_CASE("svm symmetric pair: w=(1,0), b=0, both points support vectors") {
  Dataset ds = make_dataset({numeric_attr("x"), numeric_attr("y")}, {"neg", "pos"},
                            {{{-1, 0}, 0}, {{1, 0}, 1}});
  auto model = train_svm(ds, 100.0, "linear");
  CHECK(model.converged);
  CHECK(model.support_vectors.size() == 2);
  auto [w, b] = model.linear_weights();
  CHECK(std::fabs(w[0] - 1.0) <= 1e-3);
  CHECK(std::fabs(w[1]) <= 1e-3);
  CHECK(std::fabs(b) <= 1e-3);
  double norm = std::sqrt(w[0] * w[0] + w[1] * w[1]);
  CHECK(2.0 / norm == doctest::Approx(2.0).epsilon(1e-3));  // margin width
}

TEST_CASE("svm flipped label with small C leaves slack on the flipped point") {
  Dataset ds = make_dataset({numeric_attr("x")}, {"neg", "pos"},
                            {{{-1.0}, 0}, {{-0.8}, 0}, {{0.8}, 1}, {{1.0}, 1}, {{-0.9}, 1}});
  auto model = train_svm(ds, 0.5, "linear");
  // slack of the flipped point (class pos at x=-0.9): xi = max(0, 1 - y f(x))
  FeatureVector flipped;
  flipped.values = {-0.9};
  double xi = std::max(0.0, 1.0 - model.margin(flipped));
  CHECK(xi > 0.0);
}

TEST_CASE("svm: rbf solves XOR, linear cannot") {
  Dataset ds = xor_dataset();
  auto rbf = train_svm(ds, 100.0, "rbf", 1.0);
  CHECK(training_accuracy(TrainedModel(rbf), ds) == 1.0);
  auto linear = train_svm(ds, 100.0, "linear");
  CHECK(training_accuracy(TrainedModel(linear), ds) < 1.0);
}

TEST_CASE("svm KKT conditions hold on random separable problems") {
  std::mt19937 rng(41);
  for (int prob = 0; prob < 10; ++prob) {
    Dataset ds = blob_dataset(rng, 15);
    auto model = train_svm(ds, 1.0, "linear");
    CHECK(model.converged);
    // 0 <= alpha <= C and sum alpha_i y_i == 0
    double sum_ay = 0;
    for (double ay : model.alpha_y) {
      CHECK(std::fabs(ay) <= model.c + 1e-9);
      sum_ay += ay;
    }
    CHECK(std::fabs(sum_ay) <= 1e-6);
  }
}

TEST_CASE("svm rejects single-class and multi-class inputs") {
  Dataset single = make_dataset({numeric_attr("x")}, {"only"}, {{{0.0}, 0}, {{1.0}, 0}});
  CHECK_THROWS_AS(train_svm(single), TrainError);
  Dataset three = make_dataset({numeric_attr("x")}, {"a", "b", "c"},
                               {{{0.0}, 0}, {{1.0}, 1}, {{2.0}, 2}});
  CHECK_THROWS_AS(train_svm(three), TrainError);
}

// --------------------------------------------------------------------- ANN

TEST_CASE("ann gradients match central finite differences on a 2-3-2 net") {
  std::mt19937 rng(55);
  Dataset ds = blob_dataset(rng, 5);  // 10 samples
  auto model = train_ann(ds, {3}, 0, 0.3, 0.99, 7);  // zero epochs: random init only

  const double eps = 1e-5;
  double max_rel_err = 0;
  for (const FeatureVector& s : ds.samples) {
    std::vector<double> input = model.encoder.encode(s.values);
    std::vector<double> target(2, 0.0);
    target[s.label] = 1.0;

    std::vector<std::vector<std::vector<double>>> gw;
    std::vector<std::vector<double>> gb;
    model.gradients(input, target, gw, gb);

    for (size_t l = 0; l < model.weights.size(); ++l) {
      for (size_t t = 0; t < model.weights[l].size(); ++t) {
        for (size_t f = 0; f < model.weights[l][t].size(); ++f) {
          AnnModel probe = model;
          probe.weights[l][t][f] += eps;
          double up = probe.sample_loss(input, target);
          probe.weights[l][t][f] -= 2 * eps;
          double down = probe.sample_loss(input, target);
          double numeric = (up - down) / (2 * eps);
          double denom = std::max(1e-8, std::fabs(numeric) + std::fabs(gw[l][t][f]));
          max_rel_err = std::max(max_rel_err, std::fabs(numeric - gw[l][t][f]) / denom);
        }
        AnnModel probe = model;
        probe.biases[l][t] += eps;
        double up = probe.sample_loss(input, target);
        probe.biases[l][t] -= 2 * eps;
        double down = probe.sample_loss(input, target);
        double numeric = (up - down) / (2 * eps);
        double denom = std::max(1e-8, std::fabs(numeric) + std::fabs(gb[l][t]));
        max_rel_err = std::max(max_rel_err, std::fabs(numeric - gb[l][t]) / denom);
      }
    }
  }
  CHECK(max_rel_err <= 1e-4);
}

TEST_CASE("ann learns separable blobs with default hyperparameters") {
  std::mt19937 rng(77);
  Dataset ds = blob_dataset(rng, 100);
  ModelSpec spec;
  spec.method = "ann";
  spec.seed = 13;
  TrainedModel model = train_model(ds, spec);
  CHECK(training_accuracy(model, ds) >= 0.99);

  // Loss non-increasing on at least 95% of epochs.
  const AnnModel* ann = model.as<AnnModel>();
  REQUIRE(ann != nullptr);
  int non_increasing = 0;
  for (size_t e = 1; e < ann->epoch_loss.size(); ++e) {
    if (ann->epoch_loss[e] <= ann->epoch_loss[e - 1] + 1e-12) ++non_increasing;
  }
  CHECK(non_increasing >= static_cast<int>(0.95 * (ann->epoch_loss.size() - 1)));
}

TEST_CASE("ann with zero epochs is reproducible from the seed") {
  std::mt19937 rng(88);
  Dataset ds = blob_dataset(rng, 10);
  auto a = train_ann(ds, {4}, 0, 0.3, 0.99, 42);
  auto b = train_ann(ds, {4}, 0, 0.3, 0.99, 42);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
  auto c = train_ann(ds, {4}, 0, 0.3, 0.99, 43);
  CHECK(a.weights != c.weights);
}

// ------------------------------------------------------------- common bits

TEST_CASE("classify is deterministic for a fixed model") {
  std::mt19937 rng(5);
  Dataset ds = blob_dataset(rng, 10);
  for (const std::string method : {"naive_bayes", "bayes_net", "c45", "knn", "svm", "ann"}) {
    ModelSpec spec;
    spec.method = method;
    spec.ann_epochs = 20;
    TrainedModel model = train_model(ds, spec);
    Prediction p1 = model.classify(ds.samples[0]);
    Prediction p2 = model.classify(ds.samples[0]);
    CHECK(p1.class_index == p2.class_index);
    CHECK(p1.scores == p2.scores);
    CHECK(detail::argmax_lowest(p1.scores) == p1.class_index);
  }
}

TEST_CASE("classify rejects schema mismatches naming the attribute") {
  Dataset ds = make_dataset({nominal_attr("color", 2)}, {"A", "B"}, {{{0}, 0}, {{1}, 1}});
  ModelSpec spec;
  spec.method = "naive_bayes";
  TrainedModel model = train_model(ds, spec);
  FeatureVector bad;
  bad.values = {7.0};  // invalid category index
  try {
    model.classify(bad);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("color") != std::string::npos);
  }
}

TEST_CASE("naive bayes argmax is invariant to class-independent likelihood scaling") {
  std::mt19937 rng(31);
  for (int iter = 0; iter < 20; ++iter) {
    Dataset ds = random_symbolic(rng, 3, 10);
    auto model = train_naive_bayes(ds);
    auto scaled = model;
    // Scale attribute 0's likelihood columns by the same factor for every class.
    for (auto& row : scaled.tables[0]) {
      for (double& p : row) p *= 3.7;
    }
    for (const FeatureVector& s : ds.samples) {
      CHECK(model.classify(s).class_index == scaled.classify(s).class_index);
    }
  }
}

TEST_CASE("model save/load round trip preserves predictions") {
  std::mt19937 rng(8);
  Dataset ds = blob_dataset(rng, 12);
  // add a nominal attribute to cover the full schema encoding
  ds.schema.push_back(nominal_attr("tag", 3));
  for (auto& s : ds.samples) {
    s.values.push_back(std::uniform_int_distribution<int>(0, 2)(rng));
  }
  for (const std::string method : {"naive_bayes", "bayes_net", "c45", "knn", "svm", "ann"}) {
    CAPTURE(method);
    ModelSpec spec;
    spec.method = method;
    spec.ann_epochs = 10;
    if (method == "svm") {
      spec.svm_kernel = "rbf";
      spec.svm_gamma = 0.7;
    }
    TrainedModel model = train_model(ds, spec);
    std::string blob = model.save_string();
    TrainedModel back = TrainedModel::load_string(blob);
    CHECK(back.method() == method);
    for (const FeatureVector& s : ds.samples) {
      Prediction a = model.classify(s);
      Prediction b = back.classify(s);
      CHECK(a.class_index == b.class_index);
      for (size_t k = 0; k < a.scores.size(); ++k) {
        CHECK(a.scores[k] == doctest::Approx(b.scores[k]).epsilon(1e-12));
      }
    }
    CHECK(back.save_string() == blob);  // stable second serialization
  }
}

TEST_CASE("knn inverse-distance weighting favors the nearer neighbors") {
  // Two close A points vs three distant B points would tie under k=5 majority;
  // inverse-distance weighting must pick A.
  Dataset ds = make_dataset({numeric_attr("x")}, {"A", "B"},
                            {{{0.0}, 0}, {{0.2}, 0}, {{8.0}, 1}, {{8.5}, 1}, {{9.0}, 1}});
  FeatureVector q;
  q.values = {0.1};
  auto uniform = train_knn(ds, 5, "uniform");
  CHECK(uniform.classify(q).class_index == 1);  // 3 B votes beat 2 A votes
  auto weighted = train_knn(ds, 5, "inverse_distance");
  CHECK(weighted.classify(q).class_index == 0);
}

TEST_CASE("ann rejects zero-size hidden layers") {
  std::mt19937 rng(1);
  Dataset ds = blob_dataset(rng, 4);
  CHECK_THROWS_AS(train_ann(ds, {0}, 10, 0.3, 0.99, 1), TrainError);
}

TEST_CASE("ann paper3 preset builds three hidden layers") {
  std::mt19937 rng(2);
  Dataset ds = blob_dataset(rng, 6);
  ModelSpec spec;
  spec.method = "ann";
  spec.ann_paper3 = true;
  spec.ann_epochs = 5;
  TrainedModel model = train_model(ds, spec);
  const AnnModel* ann = model.as<AnnModel>();
  REQUIRE(ann != nullptr);
  // input + 3 hidden + output
  CHECK(ann->layer_sizes.size() == 5);
  int width = (2 + 2 + 1) / 2;  // ceil((p + classes)/2)
  for (int l = 1; l <= 3; ++l) CHECK(ann->layer_sizes[l] == width);
}
