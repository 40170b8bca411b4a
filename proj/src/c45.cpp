#include <algorithm>
#include <cmath>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"

namespace malstat {

namespace {

double entropy_counts(const std::vector<int>& counts, int total) {
  if (total <= 0) return 0.0;
  double h = 0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

// Acklam's rational approximation of the standard normal quantile.
double normal_inverse(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - plow) {
    double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// Pessimistic added errors for a leaf covering N samples with e mistakes,
// at confidence cf (C4.5-style upper confidence bound).
double added_errors(double n, double e, double cf) {
  if (n <= 0) return 0;
  if (e < 1) {
    double base = n * (1 - std::pow(cf, 1.0 / n));
    if (e == 0) return base;
    return base + e * (added_errors(n, 1, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  double z = normal_inverse(1 - cf);
  double f = (e + 0.5) / n;
  double r = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) /
             (1 + z * z / n);
  return r * n - e;
}

struct SplitCandidate {
  bool valid = false;
  int attr = -1;
  bool numeric = false;
  double threshold = 0.0;
  double gain = 0.0;
  double split_info = 0.0;
  std::vector<std::vector<int>> branches;  // non-missing rows only
};

struct TreeBuilder {
  const Dataset& ds;
  int min_leaf;
  std::vector<C45Node> nodes;

  std::vector<int> class_histogram(const std::vector<int>& rows) const {
    std::vector<int> counts(ds.n_classes(), 0);
    for (int r : rows) counts[ds.samples[r].label]++;
    return counts;
  }

  SplitCandidate evaluate_nominal(int attr, const std::vector<int>& rows) const {
    SplitCandidate cand;
    cand.attr = attr;
    const int arity = ds.symbolic_arity(attr);
    cand.branches.assign(arity, {});
    std::vector<int> present_rows;
    for (int r : rows) {
      double v = ds.samples[r].values[attr];
      if (is_missing(v)) continue;
      cand.branches[static_cast<int>(v)].push_back(r);
      present_rows.push_back(r);
    }
    int non_empty = 0;
    for (const auto& b : cand.branches) non_empty += !b.empty();
    if (non_empty < 2) return cand;

    const int n = static_cast<int>(present_rows.size());
    double h = entropy_counts(class_histogram(present_rows), n);
    double cond = 0, split_info = 0;
    for (const auto& b : cand.branches) {
      if (b.empty()) continue;
      double frac = static_cast<double>(b.size()) / n;
      cond += frac * entropy_counts(class_histogram(b), static_cast<int>(b.size()));
      split_info -= frac * std::log2(frac);
    }
    if (split_info <= 0) return cand;
    cand.gain = h - cond;
    cand.split_info = split_info;
    cand.valid = true;
    return cand;
  }

  SplitCandidate evaluate_numeric(int attr, const std::vector<int>& rows) const {
    SplitCandidate cand;
    cand.attr = attr;
    cand.numeric = true;
    std::vector<std::pair<double, int>> pts;  // (value, label)
    for (int r : rows) {
      double v = ds.samples[r].values[attr];
      if (is_missing(v)) continue;
      pts.emplace_back(v, ds.samples[r].label);
    }
    if (pts.size() < 2) return cand;
    std::sort(pts.begin(), pts.end());
    if (pts.front().first == pts.back().first) return cand;  // constant

    const int n = static_cast<int>(pts.size());
    const int m = static_cast<int>(ds.n_classes());
    std::vector<int> total(m, 0), left(m, 0);
    for (auto& [v, lbl] : pts) total[lbl]++;
    double h = entropy_counts(total, n);

    double best_gain = -1.0, best_threshold = 0.0;
    int i = 0;
    while (i < n) {
      int j = i;
      while (j < n && pts[j].first == pts[i].first) {
        left[pts[j].second]++;
        ++j;
      }
      if (j >= n) break;
      std::vector<int> right(m);
      for (int k = 0; k < m; ++k) right[k] = total[k] - left[k];
      double cond = static_cast<double>(j) / n * entropy_counts(left, j) +
                    static_cast<double>(n - j) / n * entropy_counts(right, n - j);
      double gain = h - cond;
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_threshold = (pts[i].first + pts[j].first) / 2.0;
      }
      i = j;
    }
    if (best_gain < 0) return cand;

    cand.threshold = best_threshold;
    cand.gain = best_gain;
    cand.branches.assign(2, {});
    for (int r : rows) {
      double v = ds.samples[r].values[attr];
      if (is_missing(v)) continue;
      cand.branches[v <= best_threshold ? 0 : 1].push_back(r);
    }
    double fl = static_cast<double>(cand.branches[0].size()) / n;
    double fr = static_cast<double>(cand.branches[1].size()) / n;
    cand.split_info = -(fl * std::log2(fl) + fr * std::log2(fr));
    if (cand.split_info <= 0) return cand;
    cand.valid = true;
    return cand;
  }

  int build(const std::vector<int>& rows, std::vector<char> used_nominal) {
    C45Node node;
    std::vector<int> counts = class_histogram(rows);
    node.class_counts.assign(counts.begin(), counts.end());
    int majority = 0;
    for (size_t k = 1; k < counts.size(); ++k) {
      if (counts[k] > counts[majority]) majority = static_cast<int>(k);
    }
    node.cls = majority;

    int non_zero_classes = 0;
    for (int c : counts) non_zero_classes += c > 0;
    bool pure = non_zero_classes <= 1;

    int node_idx = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (pure || static_cast<int>(rows.size()) < min_leaf) return node_idx;

    // Candidate splits: nominal attributes once per path, numeric freely.
    std::vector<SplitCandidate> candidates;
    for (size_t a = 0; a < ds.n_attrs(); ++a) {
      if (ds.schema[a].kind == AttributeKind::numeric) {
        candidates.push_back(evaluate_numeric(static_cast<int>(a), rows));
      } else {
        if (used_nominal[a]) continue;
        candidates.push_back(evaluate_nominal(static_cast<int>(a), rows));
      }
    }

    double positive_sum = 0;
    int positive_count = 0;
    for (const auto& c : candidates) {
      if (c.valid && c.gain > 1e-12) {
        positive_sum += c.gain;
        ++positive_count;
      }
    }
    double avg_gain = positive_count > 0 ? positive_sum / positive_count : 0.0;

    // Classic C4.5 restriction: only attributes with at least average gain
    // compete on gain ratio.
    int best = -1;
    double best_ratio = -1.0;
    for (size_t c = 0; c < candidates.size(); ++c) {
      const auto& cand = candidates[c];
      if (!cand.valid || cand.gain + 1e-12 < avg_gain) continue;
      double ratio = cand.gain / cand.split_info;
      if (ratio > best_ratio + 1e-12) {
        best_ratio = ratio;
        best = static_cast<int>(c);
      }
    }
    if (best < 0) return node_idx;

    SplitCandidate chosen = std::move(candidates[best]);

    // Route missing values with the majority branch (largest branch).
    int majority_branch = 0;
    for (size_t b = 1; b < chosen.branches.size(); ++b) {
      if (chosen.branches[b].size() > chosen.branches[majority_branch].size()) {
        majority_branch = static_cast<int>(b);
      }
    }
    for (int r : rows) {
      if (is_missing(ds.samples[r].values[chosen.attr])) {
        chosen.branches[majority_branch].push_back(r);
      }
    }

    if (!chosen.numeric) used_nominal[chosen.attr] = 1;

    nodes[node_idx].leaf = false;
    nodes[node_idx].attr = chosen.attr;
    nodes[node_idx].numeric_split = chosen.numeric;
    nodes[node_idx].threshold = chosen.threshold;
    nodes[node_idx].majority_branch = majority_branch;
    for (const auto& branch : chosen.branches) {
      int child;
      if (branch.empty()) {
        // Empty nominal branch: majority leaf of the parent.
        C45Node leafnode;
        leafnode.cls = nodes[node_idx].cls;
        leafnode.class_counts.assign(ds.n_classes(), 0.0);
        child = static_cast<int>(nodes.size());
        nodes.push_back(leafnode);
      } else {
        child = build(branch, used_nominal);
      }
      nodes[node_idx].children.push_back(child);
    }
    return node_idx;
  }

  double leaf_error_estimate(const C45Node& node, double cf) const {
    double n = 0, mx = 0;
    for (double c : node.class_counts) {
      n += c;
      mx = std::max(mx, c);
    }
    double e = n - mx;
    return e + added_errors(n, e, cf);
  }

  double prune(int idx, double cf) {
    C45Node& node = nodes[idx];
    if (node.leaf) return leaf_error_estimate(node, cf);
    double subtree = 0;
    for (int child : node.children) subtree += prune(child, cf);
    double as_leaf = leaf_error_estimate(node, cf);
    if (as_leaf <= subtree + 0.1) {
      node.leaf = true;
      node.children.clear();
      node.attr = -1;
      return as_leaf;
    }
    return subtree;
  }

  // Drop nodes orphaned by pruning, preserving pre-order numbering.
  void compact() {
    std::vector<C45Node> kept;
    std::vector<std::pair<int, int>> stack{{0, -1}};  // (old index, parent slot in kept)
    while (!stack.empty()) {
      auto [old_idx, parent_slot] = stack.back();
      stack.pop_back();
      int new_idx = static_cast<int>(kept.size());
      kept.push_back(nodes[old_idx]);
      kept[new_idx].children.clear();
      if (parent_slot >= 0) kept[parent_slot].children.push_back(new_idx);
      const auto& children = nodes[old_idx].children;
      for (auto it = children.rbegin(); it != children.rend(); ++it) {
        stack.emplace_back(*it, new_idx);
      }
    }
    nodes = std::move(kept);
  }
};

}  // namespace

C45Model train_c45(const Dataset& ds, int min_leaf, double prune_cf) {
  if (ds.size() == 0) throw TrainError("c45: empty training set");
  if (ds.n_classes() == 0) throw TrainError("c45: dataset has no classes");
  for (const FeatureVector& s : ds.samples) {
    if (s.label == kNoLabel) throw TrainError("c45: unlabeled sample");
  }
  if (min_leaf < 1) throw TrainError("c45: min_leaf must be >= 1");

  TreeBuilder builder{ds, min_leaf, {}};
  std::vector<int> all(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) all[i] = static_cast<int>(i);
  builder.build(all, std::vector<char>(ds.n_attrs(), 0));
  if (prune_cf > 0.0 && prune_cf < 1.0) {
    builder.prune(0, prune_cf);
    builder.compact();
  }

  C45Model model;
  model.schema = ds.schema;
  model.class_names = ds.class_names;
  model.min_leaf = min_leaf;
  model.prune_cf = prune_cf;
  model.nodes = std::move(builder.nodes);
  return model;
}

Prediction C45Model::classify(const FeatureVector& v) const {
  int idx = 0;
  while (!nodes[idx].leaf) {
    const C45Node& node = nodes[idx];
    double x = v.values[node.attr];
    int branch;
    if (is_missing(x)) {
      branch = node.majority_branch;
    } else if (node.numeric_split) {
      branch = x <= node.threshold ? 0 : 1;
    } else {
      branch = static_cast<int>(x);
      if (branch < 0 || branch >= static_cast<int>(node.children.size())) {
        branch = node.majority_branch;
      }
    }
    idx = node.children[branch];
  }

  const C45Node& leaf = nodes[idx];
  Prediction pred;
  double total = 0;
  for (double c : leaf.class_counts) total += c;
  pred.scores.resize(class_names.size());
  for (size_t k = 0; k < pred.scores.size(); ++k) {
    pred.scores[k] = total > 0 ? leaf.class_counts[k] / total : 0.0;
  }
  if (total <= 0) pred.scores[leaf.cls] = 1.0;
  pred.class_index = leaf.cls;
  return pred;
}

int C45Model::depth() const {
  // Iterative depth over the node array.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int depth = 0;
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    depth = std::max(depth, d);
    for (int child : nodes[idx].children) stack.emplace_back(child, d + 1);
  }
  return depth;
}

}  // namespace malstat
