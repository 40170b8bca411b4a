#include <cmath>
#include <limits>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"

namespace malstat {

namespace {

// Shared by the Bayes-network trainer: numeric attributes become
// equal-frequency bins fitted on the training data.
struct SymbolicData {
  Dataset data;
  std::vector<std::optional<Discretizer>> discretizers;
  std::vector<int> arity;
};

SymbolicData make_symbolic(const Dataset& ds, int bins) {
  SymbolicData out;
  DiscretizedDataset disc = discretize_numeric(ds, bins, DiscretizeMethod::equal_frequency);
  out.data = std::move(disc.data);
  out.discretizers = std::move(disc.discretizers);
  out.arity.resize(out.data.n_attrs());
  for (size_t a = 0; a < out.data.n_attrs(); ++a) {
    out.arity[a] = std::max(out.data.symbolic_arity(a), 1);
  }
  return out;
}

}  // namespace

NaiveBayesModel train_naive_bayes(const Dataset& ds, double laplace, int bins) {
  if (ds.size() == 0) throw TrainError("naive_bayes: empty training set");
  if (ds.n_classes() == 0) throw TrainError("naive_bayes: dataset has no classes");
  if (laplace < 0) throw TrainError("naive_bayes: negative laplace");

  SymbolicData sym = make_symbolic(ds, bins);
  const int m = static_cast<int>(ds.n_classes());
  const int p = static_cast<int>(ds.n_attrs());
  const int n = static_cast<int>(ds.size());

  NaiveBayesModel model;
  model.schema = ds.schema;
  model.class_names = ds.class_names;
  model.laplace = laplace;
  model.bins = bins;
  model.discretizers = sym.discretizers;
  model.arity = sym.arity;

  std::vector<int> class_counts(m, 0);
  for (const FeatureVector& s : sym.data.samples) {
    if (s.label == kNoLabel) throw TrainError("naive_bayes: unlabeled sample");
    class_counts[s.label]++;
  }
  model.priors.resize(m);
  for (int k = 0; k < m; ++k) {
    model.priors[k] = (class_counts[k] + laplace) / (n + laplace * m);
  }

  model.tables.resize(p);
  for (int a = 0; a < p; ++a) {
    const int arity = model.arity[a];
    // counts[value][class], then per-class,per-value smoothing over the
    // samples where the attribute is present.
    std::vector<std::vector<int>> counts(arity, std::vector<int>(m, 0));
    std::vector<int> present(m, 0);
    for (const FeatureVector& s : sym.data.samples) {
      double v = s.values[a];
      if (is_missing(v)) continue;
      int idx = static_cast<int>(v);
      counts.at(idx)[s.label]++;
      present[s.label]++;
    }
    model.tables[a].assign(arity, std::vector<double>(m, 0.0));
    for (int val = 0; val < arity; ++val) {
      for (int k = 0; k < m; ++k) {
        double denom = present[k] + laplace * arity;
        model.tables[a][val][k] = denom > 0 ? (counts[val][k] + laplace) / denom : 0.0;
      }
    }
  }
  return model;
}

Prediction NaiveBayesModel::classify(const FeatureVector& v) const {
  const int m = static_cast<int>(class_names.size());
  std::vector<double> logp(m);
  for (int k = 0; k < m; ++k) {
    logp[k] = priors[k] > 0 ? std::log(priors[k]) : -std::numeric_limits<double>::infinity();
  }
  for (size_t a = 0; a < schema.size(); ++a) {
    double raw = v.values[a];
    if (is_missing(raw)) continue;  // missing attribute contributes nothing
    int idx = discretizers[a].has_value() ? discretizers[a]->bin_of(raw) : static_cast<int>(raw);
    if (idx < 0 || idx >= static_cast<int>(tables[a].size())) continue;  // unseen symbol
    for (int k = 0; k < m; ++k) {
      double p = tables[a][idx][k];
      logp[k] += p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }
  }

  double mx = -std::numeric_limits<double>::infinity();
  for (double l : logp) mx = std::max(mx, l);
  Prediction pred;
  pred.scores.resize(m);
  if (!std::isfinite(mx)) {
    pred.scores = priors;  // no class retains mass: fall back to the priors
  } else {
    double total = 0;
    for (int k = 0; k < m; ++k) {
      pred.scores[k] = std::exp(logp[k] - mx);
      total += pred.scores[k];
    }
    for (double& s : pred.scores) s /= total;
  }
  pred.class_index = detail::argmax_lowest(pred.scores);
  return pred;
}

}  // namespace malstat
