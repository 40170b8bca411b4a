#include "malstat/dataset.hpp"

#include "malstat/error.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

const char* to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::numeric: return "numeric";
    case AttributeKind::binary: return "binary";
    case AttributeKind::nominal: return "nominal";
  }
  return "numeric";
}

bool attribute_kind_from_string(const std::string& s, AttributeKind& out) {
  if (s == "numeric") { out = AttributeKind::numeric; return true; }
  if (s == "binary") { out = AttributeKind::binary; return true; }
  if (s == "nominal") { out = AttributeKind::nominal; return true; }
  return false;
}

int Dataset::attr_index(const std::string& name) const {
  for (size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Dataset::class_index(const std::string& name) const {
  for (size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Dataset::intern_class(const std::string& name) {
  int idx = class_index(name);
  if (idx >= 0) return idx;
  class_names.push_back(name);
  return static_cast<int>(class_names.size()) - 1;
}

int Dataset::symbolic_arity(size_t attr) const {
  const AttributeSpec& a = schema.at(attr);
  switch (a.kind) {
    case AttributeKind::binary: return 2;
    case AttributeKind::nominal: return static_cast<int>(a.categories.size());
    case AttributeKind::numeric: return 0;
  }
  return 0;
}

std::string Dataset::cell_text(size_t sample, size_t attr) const {
  double v = samples.at(sample).values.at(attr);
  if (is_missing(v)) return "";
  const AttributeSpec& a = schema.at(attr);
  switch (a.kind) {
    case AttributeKind::numeric: return format_double(v);
    case AttributeKind::binary: return v == 0.0 ? "0" : "1";
    case AttributeKind::nominal: {
      int idx = static_cast<int>(v);
      if (idx < 0 || idx >= static_cast<int>(a.categories.size())) {
        throw Error("nominal index out of range in attribute " + a.name);
      }
      return a.categories[idx];
    }
  }
  return "";
}

bool Dataset::has_labels() const {
  for (const FeatureVector& s : samples) {
    if (s.label != kNoLabel) return true;
  }
  return false;
}

Dataset Dataset::project(const std::vector<int>& attrs) const {
  Dataset out;
  out.class_names = class_names;
  out.schema.reserve(attrs.size());
  for (int a : attrs) out.schema.push_back(schema.at(a));
  out.samples.reserve(samples.size());
  for (const FeatureVector& s : samples) {
    FeatureVector fv;
    fv.sample_id = s.sample_id;
    fv.label = s.label;
    fv.values.reserve(attrs.size());
    for (int a : attrs) fv.values.push_back(s.values.at(a));
    out.samples.push_back(std::move(fv));
  }
  return out;
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.schema = schema;
  out.class_names = class_names;
  out.samples.reserve(rows.size());
  for (int r : rows) out.samples.push_back(samples.at(r));
  return out;
}

void Dataset::validate() const {
  for (size_t i = 0; i < schema.size(); ++i) {
    const AttributeSpec& a = schema[i];
    if (a.name.empty()) throw Error("attribute " + std::to_string(i) + " has empty name");
    for (size_t j = i + 1; j < schema.size(); ++j) {
      if (schema[j].name == a.name) throw Error("duplicate attribute name: " + a.name);
    }
    if (a.kind == AttributeKind::nominal && a.categories.size() < 2) {
      throw Error("nominal attribute " + a.name + " needs >=2 categories");
    }
  }
  for (size_t si = 0; si < samples.size(); ++si) {
    const FeatureVector& s = samples[si];
    if (s.values.size() != schema.size()) {
      throw Error("sample " + std::to_string(si) + ": " + std::to_string(s.values.size()) +
                  " values, expected " + std::to_string(schema.size()));
    }
    if (s.label != kNoLabel &&
        (s.label < 0 || s.label >= static_cast<int>(class_names.size()))) {
      throw Error("sample " + std::to_string(si) + ": label out of range");
    }
    for (size_t ai = 0; ai < schema.size(); ++ai) {
      double v = s.values[ai];
      if (is_missing(v)) continue;
      switch (schema[ai].kind) {
        case AttributeKind::numeric:
          if (!std::isfinite(v)) throw Error("non-finite numeric value in " + schema[ai].name);
          break;
        case AttributeKind::binary:
          if (v != 0.0 && v != 1.0) throw Error("binary attribute " + schema[ai].name + " holds " + format_double(v));
          break;
        case AttributeKind::nominal: {
          int idx = static_cast<int>(v);
          if (v != static_cast<double>(idx) || idx < 0 ||
              idx >= static_cast<int>(schema[ai].categories.size())) {
            throw Error("invalid category index in " + schema[ai].name);
          }
          break;
        }
      }
    }
  }
}

}  // namespace malstat
