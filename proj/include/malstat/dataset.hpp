#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace malstat {

enum class AttributeKind { numeric, binary, nominal };

const char* to_string(AttributeKind k);
bool attribute_kind_from_string(const std::string& s, AttributeKind& out);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<std::string> categories;  // nominal only, ordered

  bool operator==(const AttributeSpec&) const = default;
};

constexpr int kNoLabel = -1;

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

/// One labeled sample. `values` is aligned with the owning dataset schema:
/// numeric cells hold the value, binary cells 0/1, nominal cells the category
/// index. Missing cells hold NaN.
struct FeatureVector {
  std::string sample_id;
  int label = kNoLabel;
  std::vector<double> values;
};

struct Dataset {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;
  std::vector<FeatureVector> samples;

  size_t n_attrs() const { return schema.size(); }
  size_t n_classes() const { return class_names.size(); }
  size_t size() const { return samples.size(); }

  int attr_index(const std::string& name) const;
  int class_index(const std::string& name) const;
  /// Appends the class if unseen and returns its index.
  int intern_class(const std::string& name);

  /// Number of distinct symbolic values an attribute can take (binary: 2,
  /// nominal: category count). Numeric attributes have no fixed arity.
  int symbolic_arity(size_t attr) const;

  /// Text form of one cell as it appears in CSV (missing -> empty string).
  std::string cell_text(size_t sample, size_t attr) const;

  bool has_labels() const;

  /// New dataset restricted to the given attribute indices (order kept).
  Dataset project(const std::vector<int>& attrs) const;
  /// New dataset containing the given sample indices (order kept).
  Dataset subset(const std::vector<int>& rows) const;

  /// Throws Error when any schema/sample invariant is violated.
  void validate() const;
};

}  // namespace malstat
