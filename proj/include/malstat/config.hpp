#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malstat/ml.hpp"

namespace malstat {

/// Pipeline configuration: a flat key/value text file, `#` comments, one
/// `key = value` pair per line. CLI flags override file keys. Keys:
///
///   class.<name> = <dir>       corpus directory per class (>=2, order kept)
///   family      = pe_header | byte_randomness | opcode_ngram | api_ngram
///   ngram.n = 3                gram length (opcode: 1..4, api: 1..2)
///   ngram.per_class = 100      per-class mined list size
///   ngram.top_k = 100          file-internal presence rank
///   window = 32  skip = 32  profile.count = 30
///   selection = none | infogain | cfs
///   selection.threshold = 0.1
///   models = c45,knn,...       any of the six method tags
///   nb.laplace nb.bins bn.structure c45.min_leaf c45.prune_cf knn.k
///   knn.weighting svm.c svm.kernel svm.gamma svm.tol ann.layers
///   ann.epochs ann.lr ann.decay    per-method hyperparameters
///   cv.folds = 5   seed = 42   jobs = 0   out = <dir>
///   disassembler = objdump -d {file}     command template, {file} replaced
///   max_failure_rate = 0.2
///   audit.cutoff = 2012-01-31 | <epoch seconds>
///   signatures = <path>        optional signature file (defaults built in)
struct PipelineConfig {
  std::vector<std::pair<std::string, std::string>> classes;  // (name, dir)
  std::string family = "pe_header";
  int ngram_n = 3;
  int ngram_per_class = 100;
  int ngram_top_k = 100;
  int window = 32;
  int skip = 32;
  int profile_count = 30;
  std::string selection = "none";
  double selection_threshold = 0.1;
  std::vector<std::string> model_names;
  ModelSpec model_defaults;  // hyperparameters shared by name
  int cv_folds = 5;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int jobs = 0;
  std::string disassembler;
  double max_failure_rate = 0.2;
  std::int64_t audit_cutoff = 0;  // 0: now
  std::string signatures_path;

  ModelSpec spec_for(const std::string& method) const;
  void validate() const;  // throws ConfigError
};

PipelineConfig load_config(const std::string& path);

/// Applies one `key=value` pair (used for CLI overrides); throws ConfigError
/// on unknown keys or bad values.
void apply_config_pair(PipelineConfig& config, const std::string& key, const std::string& value,
                       const std::string& origin);

}  // namespace malstat
