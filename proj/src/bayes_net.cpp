#include <cmath>
#include <limits>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"

namespace malstat {

namespace {

constexpr double kLaplace = 1.0;

struct Counts {
  std::vector<int> class_counts;                       // per class
  std::vector<std::vector<std::vector<int>>> joint;  // [attr][value][class], present rows only
  std::vector<std::vector<int>> present;              // [attr][class]
};

Counts count_marginals(const Dataset& ds, const std::vector<int>& arity) {
  const int m = static_cast<int>(ds.n_classes());
  const int p = static_cast<int>(ds.n_attrs());
  Counts c;
  c.class_counts.assign(m, 0);
  c.joint.resize(p);
  c.present.assign(p, std::vector<int>(m, 0));
  for (int a = 0; a < p; ++a) c.joint[a].assign(arity[a], std::vector<int>(m, 0));
  for (const FeatureVector& s : ds.samples) {
    if (s.label == kNoLabel) throw TrainError("bayes_net: unlabeled sample");
    c.class_counts[s.label]++;
    for (int a = 0; a < p; ++a) {
      double v = s.values[a];
      if (is_missing(v)) continue;
      c.joint[a][static_cast<int>(v)][s.label]++;
      c.present[a][s.label]++;
    }
  }
  return c;
}

// Conditional mutual information I(Xa; Xb | C) in bits from raw relative
// frequencies over the rows where both attributes are present.
double conditional_mutual_information(const Dataset& ds, int a, int b, int arity_a, int arity_b) {
  const int m = static_cast<int>(ds.n_classes());
  std::vector<std::vector<std::vector<int>>> joint(
      m, std::vector<std::vector<int>>(arity_a, std::vector<int>(arity_b, 0)));
  std::vector<int> per_class(m, 0);
  int n = 0;
  for (const FeatureVector& s : ds.samples) {
    double va = s.values[a];
    double vb = s.values[b];
    if (is_missing(va) || is_missing(vb)) continue;
    joint[s.label][static_cast<int>(va)][static_cast<int>(vb)]++;
    per_class[s.label]++;
    ++n;
  }
  if (n == 0) return 0.0;
  double mi = 0.0;
  for (int c = 0; c < m; ++c) {
    if (per_class[c] == 0) continue;
    std::vector<int> ma(arity_a, 0), mb(arity_b, 0);
    for (int i = 0; i < arity_a; ++i) {
      for (int j = 0; j < arity_b; ++j) {
        ma[i] += joint[c][i][j];
        mb[j] += joint[c][i][j];
      }
    }
    for (int i = 0; i < arity_a; ++i) {
      for (int j = 0; j < arity_b; ++j) {
        int cnt = joint[c][i][j];
        if (cnt == 0) continue;
        double p_xy_c = static_cast<double>(cnt) / per_class[c];
        double p_x_c = static_cast<double>(ma[i]) / per_class[c];
        double p_y_c = static_cast<double>(mb[j]) / per_class[c];
        double p_c = static_cast<double>(per_class[c]) / n;
        mi += p_c * p_xy_c * std::log2(p_xy_c / (p_x_c * p_y_c));
      }
    }
  }
  return mi;
}

// Maximum spanning tree over the feature graph, rooted at attribute 0 with
// edges oriented away from the root. Ties break on the scan order (ascending
// candidate, ascending tree node).
std::vector<int> tan_parents(const Dataset& ds, const std::vector<int>& arity) {
  const int p = static_cast<int>(ds.n_attrs());
  std::vector<std::vector<double>> w(p, std::vector<double>(p, 0.0));
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      w[a][b] = w[b][a] = conditional_mutual_information(ds, a, b, arity[a], arity[b]);
    }
  }
  std::vector<int> parent(p, -1);
  std::vector<char> in_tree(p, 0);
  in_tree[0] = 1;
  for (int added = 1; added < p; ++added) {
    double best = -1.0;
    int best_v = -1, best_u = -1;
    for (int v = 0; v < p; ++v) {
      if (in_tree[v]) continue;
      for (int u = 0; u < p; ++u) {
        if (!in_tree[u]) continue;
        if (w[u][v] > best) {
          best = w[u][v];
          best_v = v;
          best_u = u;
        }
      }
    }
    parent[best_v] = best_u;
    in_tree[best_v] = 1;
  }
  return parent;
}

}  // namespace

BayesNetModel train_bayes_net(const Dataset& ds, const std::string& structure) {
  if (ds.size() == 0) throw TrainError("bayes_net: empty training set");
  if (ds.n_classes() == 0) throw TrainError("bayes_net: dataset has no classes");
  if (structure != "naive" && structure != "tan") {
    throw TrainError("bayes_net: unknown structure " + structure);
  }

  DiscretizedDataset disc = discretize_numeric(ds, 10, DiscretizeMethod::equal_frequency);
  const Dataset& sym = disc.data;
  const int m = static_cast<int>(ds.n_classes());
  const int p = static_cast<int>(ds.n_attrs());
  const int n = static_cast<int>(ds.size());

  BayesNetModel model;
  model.schema = ds.schema;
  model.class_names = ds.class_names;
  model.structure = structure;
  model.discretizers = disc.discretizers;
  model.arity.resize(p);
  for (int a = 0; a < p; ++a) model.arity[a] = std::max(sym.symbolic_arity(a), 1);

  model.parent.assign(p, -1);
  if (structure == "tan") {
    if (p < 2) {
      model.fell_back_to_naive = true;
    } else {
      model.parent = tan_parents(sym, model.arity);
    }
  }

  Counts counts = count_marginals(sym, model.arity);
  model.priors.resize(m);
  for (int k = 0; k < m; ++k) {
    model.priors[k] = (counts.class_counts[k] + kLaplace) / (n + kLaplace * m);
  }

  model.marginal.resize(p);
  for (int a = 0; a < p; ++a) {
    model.marginal[a].assign(model.arity[a], std::vector<double>(m, 0.0));
    for (int v = 0; v < model.arity[a]; ++v) {
      for (int k = 0; k < m; ++k) {
        double denom = counts.present[a][k] + kLaplace * model.arity[a];
        model.marginal[a][v][k] = (counts.joint[a][v][k] + kLaplace) / denom;
      }
    }
  }

  model.cpt.resize(p);
  for (int a = 0; a < p; ++a) {
    int pa = model.parent[a];
    int pa_arity = pa >= 0 ? model.arity[pa] : 1;
    model.cpt[a].assign(pa_arity, std::vector<std::vector<double>>(
                                      model.arity[a], std::vector<double>(m, 0.0)));
    if (pa < 0) {
      model.cpt[a][0] = model.marginal[a];
      continue;
    }
    // counts[pv][v][k] over rows where both the attribute and parent are present
    std::vector<std::vector<std::vector<int>>> cnt(
        pa_arity, std::vector<std::vector<int>>(model.arity[a], std::vector<int>(m, 0)));
    std::vector<std::vector<int>> cnt_pv(pa_arity, std::vector<int>(m, 0));
    for (const FeatureVector& s : sym.samples) {
      double v = s.values[a];
      double pv = s.values[pa];
      if (is_missing(v) || is_missing(pv)) continue;
      cnt[static_cast<int>(pv)][static_cast<int>(v)][s.label]++;
      cnt_pv[static_cast<int>(pv)][s.label]++;
    }
    for (int pv = 0; pv < pa_arity; ++pv) {
      for (int v = 0; v < model.arity[a]; ++v) {
        for (int k = 0; k < m; ++k) {
          double denom = cnt_pv[pv][k] + kLaplace * model.arity[a];
          model.cpt[a][pv][v][k] = (cnt[pv][v][k] + kLaplace) / denom;
        }
      }
    }
  }
  return model;
}

Prediction BayesNetModel::classify(const FeatureVector& v) const {
  const int m = static_cast<int>(class_names.size());
  std::vector<double> logp(m);
  for (int k = 0; k < m; ++k) {
    logp[k] = priors[k] > 0 ? std::log(priors[k]) : -std::numeric_limits<double>::infinity();
  }
  auto symbol_of = [&](size_t attr) -> int {
    double raw = v.values[attr];
    if (is_missing(raw)) return -1;
    int idx = discretizers[attr].has_value() ? discretizers[attr]->bin_of(raw) : static_cast<int>(raw);
    if (idx < 0 || idx >= arity[attr]) return -1;  // unseen symbol: skip
    return idx;
  };
  for (size_t a = 0; a < schema.size(); ++a) {
    int val = symbol_of(a);
    if (val < 0) continue;
    int pa = parent[a];
    int pv = pa >= 0 ? symbol_of(pa) : -1;
    for (int k = 0; k < m; ++k) {
      double p = pv >= 0 ? cpt[a][pv][val][k] : marginal[a][val][k];
      logp[k] += p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }
  }

  double mx = -std::numeric_limits<double>::infinity();
  for (double l : logp) mx = std::max(mx, l);
  Prediction pred;
  pred.scores.resize(m);
  if (!std::isfinite(mx)) {
    pred.scores = priors;
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
