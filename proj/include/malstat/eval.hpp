#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "malstat/dataset.hpp"
#include "malstat/ml.hpp"
#include "malstat/ngrams.hpp"

namespace malstat {

struct EvalReport {
  std::string task;
  std::string model_spec;              // ModelSpec::summary echo
  std::vector<double> fold_accuracy;   // percent, per fold
  double mean_accuracy = 0.0;          // percent, arithmetic mean over folds
  double pooled_accuracy = 0.0;        // percent, trace/total of the confusion matrix
  std::vector<std::vector<std::uint64_t>> confusion;  // [true class][predicted]
  std::vector<std::string> class_names;
  std::vector<double> fold_wall_ms;

  std::string to_csv() const;   // deterministic; wall times only in to_text
  std::string to_text() const;
};

/// Stratified k-fold cross-validation. Preprocessing is fold-local by
/// construction: each fold's model fits its discretizers/normalizers on the
/// k-1 training folds only. Folds run as independent parallel jobs;
/// `cross_validate_serial` is the reference implementation.
EvalReport cross_validate(const Dataset& ds, const ModelSpec& spec, int k = 5,
                          std::uint64_t seed = 0);
EvalReport cross_validate_serial(const Dataset& ds, const ModelSpec& spec, int k = 5,
                                 std::uint64_t seed = 0);

/// Accuracy grid shaped like a task x method results table.
struct GridReport {
  std::vector<std::string> tasks;    // row names
  std::vector<std::string> methods;  // column names
  std::vector<std::vector<std::optional<double>>> mean_accuracy;  // percent

  /// CSV with 2-decimal cells, missing cells rendered as an em dash, and a
  /// trailing `best` column naming the best method(s) per row.
  std::string to_csv() const;
  std::string to_markdown() const;  // best cells bold, ties all flagged
};

GridReport grid_report(const std::vector<std::string>& tasks,
                       const std::vector<std::string>& methods,
                       const std::vector<std::vector<std::optional<EvalReport>>>& cells);

/// Side-by-side class frequencies for the top tokens of a reference class.
struct FrequencyReport {
  std::vector<std::string> class_names;  // column order, reference first
  std::vector<GramToken> tokens;         // top tokens by reference fraction
  std::vector<std::vector<double>> fractions;  // [token][class]

  std::string to_csv() const;
};

FrequencyReport frequency_report(const NgramVocabulary& vocab,
                                 const std::vector<std::pair<std::string, std::vector<double>>>&
                                     per_class_fractions,  // aligned to vocab.tokens
                                 int top = 20);

}  // namespace malstat
