#include "malstat/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "malstat/error.hpp"

namespace malstat {

const char* to_string(DiscretizeMethod m) {
  return m == DiscretizeMethod::equal_frequency ? "equal_frequency" : "supervised_threshold";
}

int Discretizer::bin_of(double v) const {
  int lo = 0;
  int hi = static_cast<int>(cuts.size());
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (cuts[mid] < v) lo = mid + 1; else hi = mid;
  }
  return lo;  // number of cuts strictly below v
}

namespace {

double entropy_of_counts(const std::vector<int>& counts, int total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<double> collect_numeric(const Dataset& ds, int attr) {
  std::vector<double> vals;
  vals.reserve(ds.samples.size());
  for (const FeatureVector& s : ds.samples) {
    double v = s.values.at(attr);
    if (!is_missing(v)) vals.push_back(v);
  }
  return vals;
}

Discretizer fit_equal_frequency(std::vector<double> vals, int bins) {
  Discretizer d;
  d.method = DiscretizeMethod::equal_frequency;
  std::sort(vals.begin(), vals.end());
  const int n = static_cast<int>(vals.size());
  if (n == 0) return d;
  for (int i = 1; i < bins; ++i) {
    int pos = static_cast<int>(static_cast<long long>(i) * n / bins);
    if (pos <= 0 || pos >= n) continue;
    if (vals[pos - 1] == vals[pos]) continue;  // tie straddles the cut: collapse
    double cut = (vals[pos - 1] + vals[pos]) / 2.0;
    if (!d.cuts.empty() && cut <= d.cuts.back()) continue;
    d.cuts.push_back(cut);
  }
  return d;
}

Discretizer fit_supervised(const Dataset& ds, int attr) {
  Discretizer d;
  d.method = DiscretizeMethod::supervised_threshold;
  std::vector<std::pair<double, int>> pts;
  for (const FeatureVector& s : ds.samples) {
    double v = s.values.at(attr);
    if (is_missing(v)) continue;
    if (s.label == kNoLabel) throw Error("supervised_threshold requires labels");
    pts.emplace_back(v, s.label);
  }
  if (pts.size() < 2) return d;
  std::sort(pts.begin(), pts.end());

  const int m = static_cast<int>(ds.n_classes());
  const int n = static_cast<int>(pts.size());
  std::vector<int> total_counts(m, 0);
  for (auto& [v, c] : pts) total_counts[c]++;
  const double h_all = entropy_of_counts(total_counts, n);

  std::vector<int> left(m, 0);
  double best_gain = -1.0;
  double best_cut = 0.0;
  int i = 0;
  while (i < n) {
    // advance over one run of equal values
    int j = i;
    while (j < n && pts[j].first == pts[i].first) {
      left[pts[j].second]++;
      ++j;
    }
    if (j >= n) break;
    double cut = (pts[i].first + pts[j].first) / 2.0;
    std::vector<int> right(m, 0);
    for (int c = 0; c < m; ++c) right[c] = total_counts[c] - left[c];
    double h_split = (static_cast<double>(j) / n) * entropy_of_counts(left, j) +
                     (static_cast<double>(n - j) / n) * entropy_of_counts(right, n - j);
    double gain = h_all - h_split;
    if (gain > best_gain + 1e-12) {
      best_gain = gain;
      best_cut = cut;
    }
    i = j;
  }
  if (best_gain >= 0.0) d.cuts.push_back(best_cut);
  return d;
}

}  // namespace

Discretizer fit_discretizer(const Dataset& ds, int attr, int bins, DiscretizeMethod method) {
  if (attr < 0 || attr >= static_cast<int>(ds.n_attrs())) throw Error("attribute index out of range");
  if (ds.schema[attr].kind != AttributeKind::numeric) {
    throw Error("attribute " + ds.schema[attr].name + " is not numeric");
  }
  if (method == DiscretizeMethod::equal_frequency) {
    if (bins < 2) throw Error("equal_frequency needs bins >= 2");
    return fit_equal_frequency(collect_numeric(ds, attr), bins);
  }
  return fit_supervised(ds, attr);
}

namespace {

AttributeSpec binned_spec(const AttributeSpec& src, const Discretizer& d) {
  AttributeSpec spec;
  spec.name = src.name;
  spec.kind = AttributeKind::nominal;
  int bins = d.bin_count();
  for (int b = 0; b < bins; ++b) spec.categories.push_back("bin" + std::to_string(b));
  if (spec.categories.size() < 2) spec.categories.push_back("bin1");
  return spec;
}

}  // namespace

DiscretizedDataset discretize_numeric(const Dataset& ds, int bins, DiscretizeMethod method) {
  DiscretizedDataset out;
  out.discretizers.resize(ds.n_attrs());
  out.data.class_names = ds.class_names;
  out.data.schema = ds.schema;
  for (size_t a = 0; a < ds.n_attrs(); ++a) {
    if (ds.schema[a].kind != AttributeKind::numeric) continue;
    Discretizer d = fit_discretizer(ds, static_cast<int>(a), bins, method);
    out.data.schema[a] = binned_spec(ds.schema[a], d);
    out.discretizers[a] = std::move(d);
  }
  out.data.samples = ds.samples;
  for (FeatureVector& s : out.data.samples) {
    for (size_t a = 0; a < ds.n_attrs(); ++a) {
      if (!out.discretizers[a].has_value() || is_missing(s.values[a])) continue;
      s.values[a] = static_cast<double>(out.discretizers[a]->bin_of(s.values[a]));
    }
  }
  return out;
}

Dataset apply_discretizers(const Dataset& ds, const std::vector<std::optional<Discretizer>>& discs) {
  if (discs.size() != ds.n_attrs()) throw Error("discretizer count does not match schema");
  Dataset out = ds;
  for (size_t a = 0; a < ds.n_attrs(); ++a) {
    if (!discs[a].has_value()) continue;
    out.schema[a] = [&] {
      AttributeSpec spec;
      spec.name = ds.schema[a].name;
      spec.kind = AttributeKind::nominal;
      for (int b = 0; b < discs[a]->bin_count(); ++b) spec.categories.push_back("bin" + std::to_string(b));
      if (spec.categories.size() < 2) spec.categories.push_back("bin1");
      return spec;
    }();
    for (FeatureVector& s : out.samples) {
      if (is_missing(s.values[a])) continue;
      s.values[a] = static_cast<double>(discs[a]->bin_of(s.values[a]));
    }
  }
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& ds) {
  MinMaxScaler sc;
  sc.ranges.resize(ds.n_attrs());
  for (size_t a = 0; a < ds.n_attrs(); ++a) {
    if (ds.schema[a].kind != AttributeKind::numeric) continue;
    double lo = 0, hi = 0;
    bool seen = false;
    for (const FeatureVector& s : ds.samples) {
      double v = s.values[a];
      if (is_missing(v)) continue;
      if (!seen) { lo = hi = v; seen = true; }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sc.ranges[a] = std::make_pair(lo, hi);
  }
  return sc;
}

double MinMaxScaler::transform_value(size_t attr, double v) const {
  if (is_missing(v)) return v;
  const auto& r = ranges.at(attr);
  if (!r.has_value()) return v;
  double span = r->second - r->first;
  if (span == 0.0) return 0.0;  // constant attribute maps to 0
  return (v - r->first) / span;
}

Dataset MinMaxScaler::transform(const Dataset& ds) const {
  Dataset out = ds;
  for (FeatureVector& s : out.samples) {
    for (size_t a = 0; a < out.n_attrs(); ++a) {
      if (ranges.at(a).has_value()) s.values[a] = transform_value(a, s.values[a]);
    }
  }
  return out;
}

std::pair<Dataset, MinMaxScaler> normalize_minmax(const Dataset& ds) {
  MinMaxScaler sc = MinMaxScaler::fit(ds);
  return {sc.transform(ds), sc};
}

}  // namespace malstat
