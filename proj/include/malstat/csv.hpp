#pragma once

#include <iosfwd>
#include <string>

#include "malstat/dataset.hpp"

namespace malstat {

// Interchange format: UTF-8, comma-separated, first row is the header, LF or
// CRLF line endings. Reserved column names: `sample_id` (optional) and
// `class` (optional on predict-time data). Cells are written verbatim with no
// quoting; saving a dataset whose text cells contain a comma or newline is an
// error. Attribute kinds are inferred per column: numeric when every
// non-empty cell parses as a finite number, binary when those values are all
// 0 or 1, nominal otherwise. Empty cells are missing values.

Dataset load_csv(const std::string& path);
Dataset load_csv_stream(std::istream& in, const std::string& origin);

void save_csv(const Dataset& ds, const std::string& path);
void save_csv_stream(const Dataset& ds, std::ostream& out);

}  // namespace malstat
