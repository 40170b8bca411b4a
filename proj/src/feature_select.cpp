#include "malstat/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "malstat/error.hpp"
#include "malstat/parallel.hpp"

namespace malstat {

double entropy(std::span<const int> labels, int n_classes) {
  if (labels.empty()) throw Error("entropy: empty label set");
  std::vector<int> counts(n_classes, 0);
  for (int l : labels) counts.at(l)++;
  double h = 0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(labels.size());
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

double entropy_of_count_map(const std::map<int, int>& counts, int total) {
  if (total <= 0) return 0.0;
  double h = 0;
  for (const auto& [v, c] : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

void require_symbolic(const Dataset& ds, int attr) {
  if (attr < 0 || attr >= static_cast<int>(ds.n_attrs())) throw Error("attribute index out of range");
  if (ds.schema[attr].kind == AttributeKind::numeric) {
    throw Error("info_gain: attribute " + ds.schema[attr].name + " is numeric; discretize first");
  }
}

int symbolic_value(double v) { return static_cast<int>(v); }

}  // namespace

double info_gain(const Dataset& ds, int attr) {
  require_symbolic(ds, attr);
  std::map<int, std::map<int, int>> by_value;  // attr value -> class counts
  std::map<int, int> class_counts;
  int present = 0;
  for (const FeatureVector& s : ds.samples) {
    double v = s.values[attr];
    if (is_missing(v) || s.label == kNoLabel) continue;
    by_value[symbolic_value(v)][s.label]++;
    class_counts[s.label]++;
    ++present;
  }
  if (present == 0) return 0.0;
  double h = entropy_of_count_map(class_counts, present);
  double cond = 0;
  for (const auto& [v, counts] : by_value) {
    int nv = 0;
    for (const auto& [cls, c] : counts) nv += c;
    cond += static_cast<double>(nv) / present * entropy_of_count_map(counts, nv);
  }
  return h - cond;
}

namespace {

Dataset symbolic_view(const Dataset& ds) {
  bool any_numeric = false;
  for (const AttributeSpec& a : ds.schema) any_numeric |= a.kind == AttributeKind::numeric;
  if (!any_numeric) return ds;
  return discretize_numeric(ds, 0, DiscretizeMethod::supervised_threshold).data;
}

FeatureRanking rank_from_merits(std::vector<double> merits) {
  FeatureRanking r;
  r.ordering.resize(merits.size());
  std::iota(r.ordering.begin(), r.ordering.end(), 0);
  std::stable_sort(r.ordering.begin(), r.ordering.end(), [&](int a, int b) {
    if (merits[a] != merits[b]) return merits[a] > merits[b];
    return a < b;
  });
  r.merits = std::move(merits);
  return r;
}

}  // namespace

FeatureRanking rank_features_serial(const Dataset& ds) {
  Dataset sym = symbolic_view(ds);
  std::vector<double> merits(sym.n_attrs(), 0.0);
  for (size_t a = 0; a < sym.n_attrs(); ++a) merits[a] = info_gain(sym, static_cast<int>(a));
  return rank_from_merits(std::move(merits));
}

FeatureRanking rank_features(const Dataset& ds) {
  Dataset sym = symbolic_view(ds);
  std::vector<double> merits(sym.n_attrs(), 0.0);
  par::for_index(static_cast<std::int64_t>(sym.n_attrs()),
                 [&](std::int64_t a) { merits[a] = info_gain(sym, static_cast<int>(a)); });
  return rank_from_merits(std::move(merits));
}

FeatureSubset select_by_threshold(const FeatureRanking& ranking, double threshold) {
  FeatureSubset out;
  for (int attr : ranking.ordering) {
    if (ranking.merits[attr] >= threshold) out.attributes.push_back(attr);
  }
  return out;
}

namespace {

// Entropies/mutual information between two symbolic columns over the rows
// where both are present; column -1 denotes the class labels.
double su_between(const Dataset& ds, int a, int b) {
  auto value_of = [&](const FeatureVector& s, int col) -> double {
    return col < 0 ? (s.label == kNoLabel ? missing_value() : static_cast<double>(s.label))
                   : s.values[col];
  };
  std::map<int, int> ca, cb;
  std::map<std::pair<int, int>, int> cab;
  int n = 0;
  for (const FeatureVector& s : ds.samples) {
    double va = value_of(s, a);
    double vb = value_of(s, b);
    if (is_missing(va) || is_missing(vb)) continue;
    int ia = symbolic_value(va);
    int ib = symbolic_value(vb);
    ca[ia]++;
    cb[ib]++;
    cab[{ia, ib}]++;
    ++n;
  }
  if (n == 0) return 0.0;
  double ha = entropy_of_count_map(ca, n);
  double hb = entropy_of_count_map(cb, n);
  double hab = 0;
  for (const auto& [k, c] : cab) {
    double p = static_cast<double>(c) / n;
    hab -= p * std::log2(p);
  }
  double denom = ha + hb;
  if (denom <= 0) return 0.0;
  double ig = ha + hb - hab;
  return 2.0 * ig / denom;
}

struct SuTable {
  std::vector<double> with_class;       // per attribute
  std::vector<std::vector<double>> ff;  // pairwise, symmetric

  double pair(int a, int b) const { return a == b ? 1.0 : ff[std::min(a, b)][std::max(a, b)]; }
};

SuTable build_su_table(const Dataset& ds) {
  const int p = static_cast<int>(ds.n_attrs());
  SuTable t;
  t.with_class.resize(p, 0.0);
  t.ff.assign(p, std::vector<double>(p, 0.0));
  par::for_index(p, [&](std::int64_t a) { t.with_class[a] = su_between(ds, static_cast<int>(a), -1); });
  par::for_index(p, [&](std::int64_t a) {
    for (int b = static_cast<int>(a) + 1; b < p; ++b) {
      t.ff[a][b] = su_between(ds, static_cast<int>(a), b);
    }
  });
  return t;
}

double subset_merit(const std::vector<int>& subset, const SuTable& t) {
  const int k = static_cast<int>(subset.size());
  if (k == 0) return 0.0;
  double rcf = 0;
  for (int f : subset) rcf += t.with_class[f];
  rcf /= k;
  double rff = 0;
  if (k > 1) {
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) rff += t.pair(subset[i], subset[j]);
    }
    rff /= k * (k - 1) / 2.0;
  }
  return k * rcf / std::sqrt(k + k * (k - 1) * rff);
}

FeatureSubset greedy_search(int p, const SuTable& t) {
  FeatureSubset current;
  std::vector<char> used(p, 0);
  while (true) {
    int best_attr = -1;
    double best_merit = current.merit;
    for (int a = 0; a < p; ++a) {
      if (used[a]) continue;
      std::vector<int> candidate = current.attributes;
      candidate.push_back(a);
      double m = subset_merit(candidate, t);
      if (m > best_merit + 1e-12) {
        best_merit = m;
        best_attr = a;
      }
    }
    if (best_attr < 0) break;
    current.attributes.push_back(best_attr);
    current.merit = best_merit;
    used[best_attr] = 1;
  }
  std::sort(current.attributes.begin(), current.attributes.end());
  current.merit = subset_merit(current.attributes, t);
  return current;
}

FeatureSubset best_first_search(int p, const SuTable& t, int beam) {
  using Subset = std::vector<int>;  // sorted
  std::set<Subset> visited;
  // Open list ordered by (merit desc, subset asc) for determinism.
  auto cmp = [](const std::pair<double, Subset>& a, const std::pair<double, Subset>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::set<std::pair<double, Subset>, decltype(cmp)> open(cmp);
  open.insert({0.0, {}});
  visited.insert({});

  FeatureSubset best;
  int stale = 0;
  while (!open.empty() && stale < beam) {
    auto [merit, subset] = *open.begin();
    open.erase(open.begin());
    bool improved = false;
    for (int a = 0; a < p; ++a) {
      if (std::binary_search(subset.begin(), subset.end(), a)) continue;
      Subset child = subset;
      child.insert(std::lower_bound(child.begin(), child.end(), a), a);
      if (!visited.insert(child).second) continue;
      double m = subset_merit(child, t);
      open.insert({m, child});
      if (m > best.merit + 1e-12) {
        best.attributes = child;
        best.merit = m;
        improved = true;
      }
    }
    stale = improved ? 0 : stale + 1;
  }
  return best;
}

}  // namespace

double symmetric_uncertainty(const Dataset& ds, int attr_a, int attr_b) {
  if (attr_a >= 0) require_symbolic(ds, attr_a);
  if (attr_b >= 0) require_symbolic(ds, attr_b);
  return su_between(ds, attr_a, attr_b);
}

FeatureSubset cfs_select(const Dataset& ds, const CfsOptions& options) {
  if (ds.n_attrs() == 0) throw Error("cfs_select: dataset has no attributes");
  Dataset sym = symbolic_view(ds);
  SuTable table = build_su_table(sym);
  const int p = static_cast<int>(sym.n_attrs());
  if (options.search == CfsSearch::greedy) return greedy_search(p, table);
  return best_first_search(p, table, options.beam);
}

}  // namespace malstat
