#include "malstat/csv.hpp"

#include <fstream>
#include <sstream>

#include "malstat/error.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Dataset load_csv_stream(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  std::vector<std::string> header = split(strip_cr(line), ',');

  int class_col = -1;
  int id_col = -1;
  std::vector<int> attr_cols;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty()) throw ParseError(origin + ": empty header name in column " + std::to_string(i + 1));
    for (size_t j = i + 1; j < header.size(); ++j) {
      if (header[j] == header[i]) throw ParseError(origin + ": duplicate column " + header[i]);
    }
    if (header[i] == "class") {
      class_col = static_cast<int>(i);
    } else if (header[i] == "sample_id") {
      id_col = static_cast<int>(i);
    } else {
      attr_cols.push_back(static_cast<int>(i));
    }
  }

  Dataset ds;
  ds.schema.reserve(attr_cols.size());
  for (int c : attr_cols) {
    AttributeSpec spec;
    spec.name = header[c];
    ds.schema.push_back(std::move(spec));
  }

  // Raw cells first; kinds are decided once the whole column is known.
  std::vector<std::vector<std::string>> cells;  // per sample, aligned to attr_cols
  size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    line = strip_cr(line);
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    std::vector<std::string> row = split(line, ',');
    if (row.size() != header.size()) {
      throw ParseError(origin + ": row " + std::to_string(row_no) + ": " + std::to_string(row.size()) +
                       " cells, expected " + std::to_string(header.size()));
    }
    FeatureVector fv;
    fv.sample_id = id_col >= 0 ? row[id_col] : "row" + std::to_string(row_no);
    if (class_col >= 0 && !row[class_col].empty()) {
      fv.label = ds.intern_class(row[class_col]);
    }
    std::vector<std::string> attrs;
    attrs.reserve(attr_cols.size());
    for (int c : attr_cols) attrs.push_back(row[c]);
    cells.push_back(std::move(attrs));
    ds.samples.push_back(std::move(fv));
  }

  // Infer column kinds.
  for (size_t a = 0; a < ds.schema.size(); ++a) {
    bool all_numeric = true;
    bool all_binary = true;
    bool any_value = false;
    for (const auto& row : cells) {
      const std::string& cell = row[a];
      if (cell.empty()) continue;
      any_value = true;
      double v;
      if (!parse_double(cell, v)) {
        all_numeric = false;
        all_binary = false;
        break;
      }
      if (v != 0.0 && v != 1.0) all_binary = false;
    }
    if (!any_value) all_binary = false;  // all-missing column stays numeric
    AttributeSpec& spec = ds.schema[a];
    if (all_binary && all_numeric) {
      spec.kind = AttributeKind::binary;
    } else if (all_numeric) {
      spec.kind = AttributeKind::numeric;
    } else {
      spec.kind = AttributeKind::nominal;
      for (const auto& row : cells) {
        const std::string& cell = row[a];
        if (cell.empty()) continue;
        bool seen = false;
        for (const std::string& cat : spec.categories) {
          if (cat == cell) { seen = true; break; }
        }
        if (!seen) spec.categories.push_back(cell);
      }
      // A column with a single distinct text value still needs two category
      // slots to satisfy the nominal invariant.
      if (spec.categories.size() == 1) spec.categories.push_back(spec.categories[0] + "_");
    }
  }

  for (size_t s = 0; s < cells.size(); ++s) {
    FeatureVector& fv = ds.samples[s];
    fv.values.resize(ds.schema.size(), missing_value());
    for (size_t a = 0; a < ds.schema.size(); ++a) {
      const std::string& cell = cells[s][a];
      if (cell.empty()) continue;
      if (ds.schema[a].kind == AttributeKind::nominal) {
        const auto& cats = ds.schema[a].categories;
        for (size_t ci = 0; ci < cats.size(); ++ci) {
          if (cats[ci] == cell) { fv.values[a] = static_cast<double>(ci); break; }
        }
      } else {
        double v = 0;
        parse_double(cell, v);
        fv.values[a] = v;
      }
    }
  }

  ds.validate();
  return ds;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_csv_stream(in, path);
}

namespace {

void check_cell(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos ||
      s.find('\r') != std::string::npos) {
    throw Error("cell contains a separator and cannot be written unquoted: " + s);
  }
}

}  // namespace

void save_csv_stream(const Dataset& ds, std::ostream& out) {
  out << "sample_id";
  for (const AttributeSpec& a : ds.schema) {
    check_cell(a.name);
    out << ',' << a.name;
  }
  out << ",class\n";
  for (size_t s = 0; s < ds.samples.size(); ++s) {
    const FeatureVector& fv = ds.samples[s];
    check_cell(fv.sample_id);
    out << fv.sample_id;
    for (size_t a = 0; a < ds.schema.size(); ++a) {
      std::string cell = ds.cell_text(s, a);
      check_cell(cell);
      out << ',' << cell;
    }
    out << ',';
    if (fv.label != kNoLabel) {
      check_cell(ds.class_names.at(fv.label));
      out << ds.class_names[fv.label];
    }
    out << '\n';
  }
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save_csv_stream(ds, out);
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

}  // namespace malstat
