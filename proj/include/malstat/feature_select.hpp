#pragma once

#include <span>
#include <vector>

#include "malstat/dataset.hpp"
#include "malstat/preprocess.hpp"

namespace malstat {

/// Shannon entropy in bits of a class label multiset; throws on empty input.
double entropy(std::span<const int> labels, int n_classes);

/// Information gain of a symbolic attribute against the class:
/// H(class) - sum_v |S_v|/|S| * H(class | attr = v), computed over the
/// samples where the attribute is present (missing mass renormalized).
/// The attribute must be binary or nominal; rank_features discretizes
/// numerics first.
double info_gain(const Dataset& ds, int attr);

struct FeatureRanking {
  std::vector<double> merits;  // per attribute, bits
  std::vector<int> ordering;   // attribute indices, descending merit
};

struct FeatureSubset {
  std::vector<int> attributes;
  double merit = 0.0;
};

/// Per-attribute information-gain merits (numeric attributes pass through a
/// supervised-threshold discretizer first). Merits are computed in parallel;
/// a serial reference is kept for testing.
FeatureRanking rank_features(const Dataset& ds);
FeatureRanking rank_features_serial(const Dataset& ds);

/// Attributes with merit >= threshold, in ranking order.
FeatureSubset select_by_threshold(const FeatureRanking& ranking, double threshold);

enum class CfsSearch { greedy, best_first };

struct CfsOptions {
  CfsSearch search = CfsSearch::greedy;
  int beam = 5;  // best_first only: stop after this many non-improving expansions
};

/// Correlation-based subset selection. Subset merit is
/// k * mean(SU(f, class)) / sqrt(k + k (k-1) mean(SU(fi, fj))) with the
/// symmetric uncertainty SU(X, Y) = 2 IG(X;Y) / (H(X) + H(Y)). Greedy
/// forward search by default, accepting additions only on strict merit
/// improvement; ties break on the lower attribute index. All-constant
/// attribute sets yield an empty subset.
FeatureSubset cfs_select(const Dataset& ds, const CfsOptions& options = {});

/// Symmetric uncertainty between two symbolic attributes (-1 denotes the
/// class column). Exposed for tests and diagnostics.
double symmetric_uncertainty(const Dataset& ds, int attr_a, int attr_b);

}  // namespace malstat
