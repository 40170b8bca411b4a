#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "malstat/dataset.hpp"

namespace malstat {

enum class DiscretizeMethod { equal_frequency, supervised_threshold };

const char* to_string(DiscretizeMethod m);

/// Cut points for one numeric attribute. Bin i covers
/// (cuts[i-1], cuts[i]]-style half-open ranges: value v lands in the first
/// bin whose cut is >= v, i.e. bin_of(v) = #cuts strictly below v.
struct Discretizer {
  std::vector<double> cuts;  // strictly increasing
  DiscretizeMethod method = DiscretizeMethod::equal_frequency;

  int bin_count() const { return static_cast<int>(cuts.size()) + 1; }
  int bin_of(double v) const;
};

/// Equal-frequency cuts land on empirical quantiles with duplicate cuts
/// collapsed; the supervised method places the single information-gain
/// maximizing cut over midpoints between sorted distinct values (requires
/// labels). A constant attribute yields zero cuts.
Discretizer fit_discretizer(const Dataset& ds, int attr, int bins, DiscretizeMethod method);

/// Replaces every numeric attribute with a nominal "binned" attribute using
/// per-attribute discretizers fitted on `ds`. Non-numeric attributes pass
/// through. Returns the transformed dataset plus the fitted discretizers
/// (entry is nullopt for attributes that were not numeric).
struct DiscretizedDataset {
  Dataset data;
  std::vector<std::optional<Discretizer>> discretizers;
};
DiscretizedDataset discretize_numeric(const Dataset& ds, int bins, DiscretizeMethod method);

/// Applies already-fitted discretizers to a dataset with the same schema as
/// the fitting data (used on held-out folds).
Dataset apply_discretizers(const Dataset& ds, const std::vector<std::optional<Discretizer>>& discs);

/// Per-attribute (min, max) ranges fitted on training data; reapplied
/// verbatim to unseen values, which may therefore fall outside [0, 1].
struct MinMaxScaler {
  // One entry per attribute; nullopt for non-numeric attributes.
  std::vector<std::optional<std::pair<double, double>>> ranges;

  static MinMaxScaler fit(const Dataset& ds);
  double transform_value(size_t attr, double v) const;
  Dataset transform(const Dataset& ds) const;
};

/// Convenience wrapper: fit + transform in one step.
std::pair<Dataset, MinMaxScaler> normalize_minmax(const Dataset& ds);

}  // namespace malstat
