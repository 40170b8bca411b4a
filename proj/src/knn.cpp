#include <algorithm>
#include <cmath>
#include <numeric>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"

namespace malstat {

namespace {

// Component distances: scaled numeric/binary difference, nominal 0/1
// mismatch, any missing side contributes the maximum difference of 1.
double component_distance(const AttributeSpec& spec, double a, double b) {
  if (is_missing(a) || is_missing(b)) return 1.0;
  if (spec.kind == AttributeKind::nominal) return a == b ? 0.0 : 1.0;
  return a - b;
}

}  // namespace

KnnModel train_knn(const Dataset& ds, int k, const std::string& weighting) {
  if (ds.size() == 0) throw TrainError("knn: empty training set");
  if (ds.n_classes() == 0) throw TrainError("knn: dataset has no classes");
  if (k < 1) throw TrainError("knn: k must be >= 1");
  if (weighting != "uniform" && weighting != "inverse_distance") {
    throw TrainError("knn: unknown weighting " + weighting);
  }

  KnnModel model;
  model.schema = ds.schema;
  model.class_names = ds.class_names;
  model.k = k;
  model.weighting = weighting;
  model.scaler = MinMaxScaler::fit(ds);

  Dataset scaled = model.scaler.transform(ds);
  model.instances.reserve(scaled.size());
  model.labels.reserve(scaled.size());
  for (const FeatureVector& s : scaled.samples) {
    if (s.label == kNoLabel) throw TrainError("knn: unlabeled sample");
    model.instances.push_back(s.values);
    model.labels.push_back(s.label);
  }
  return model;
}

Prediction KnnModel::classify(const FeatureVector& v) const {
  const int n = static_cast<int>(instances.size());
  if (k > n) {
    throw Error("knn: k (" + std::to_string(k) + ") exceeds stored instances (" + std::to_string(n) + ")");
  }

  std::vector<double> query(v.values.size());
  for (size_t a = 0; a < v.values.size(); ++a) {
    query[a] = schema[a].kind == AttributeKind::numeric ? scaler.transform_value(a, v.values[a])
                                                        : v.values[a];
  }

  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    for (size_t a = 0; a < query.size(); ++a) {
      double d = component_distance(schema[a], query[a], instances[i][a]);
      sum += d * d;
    }
    dist[i] = std::sqrt(sum);
  }

  // Distance ties resolve by training sample order.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] < dist[b]; });

  Prediction pred;
  pred.scores.assign(class_names.size(), 0.0);
  for (int r = 0; r < k; ++r) {
    int i = order[r];
    double w = weighting == "uniform" ? 1.0 : 1.0 / (dist[i] + 1e-12);
    pred.scores[labels[i]] += w;
  }
  double total = std::accumulate(pred.scores.begin(), pred.scores.end(), 0.0);
  if (total > 0) {
    for (double& s : pred.scores) s /= total;
  }
  pred.class_index = detail::argmax_lowest(pred.scores);
  return pred;
}

}  // namespace malstat
