#pragma once

#include <string>

#include "malstat/config.hpp"

namespace malstat {

// Pipeline subcommands. All artifacts land under config.out_dir; every
// command is deterministic for a fixed (config, seed) and idempotent over
// unchanged inputs. Commands throw ConfigError/Error on fatal problems;
// cmd_run returns the number of failed grid cells instead of throwing for
// per-cell model failures.

/// Dedup + PE32 filter per class; writes manifest_<class>.csv and
/// excluded_<class>.csv, prints per-class counts. Errors when a class has no
/// PE32 files after filtering.
void cmd_ingest(const PipelineConfig& config);

/// Builds the configured feature family's CSV per class-pair task (plus the
/// persisted vocabulary for the n-gram families). Per-file failures are
/// logged and excluded up to max_failure_rate.
void cmd_extract(const PipelineConfig& config);

/// Information-gain ranking (ranking_*.csv) and, when selection = cfs, the
/// selected subset (subset_*.txt) per task.
void cmd_select(const PipelineConfig& config);

/// Trains every configured model on each task's full feature set (after
/// selection) and serializes them under models/.
void cmd_train(const PipelineConfig& config);

/// Cross-validates every (task, model) cell and writes EvalReport CSV/text.
void cmd_eval(const PipelineConfig& config);

/// Full protocol: selection, cross-validation grid, reports, and the best
/// model per task trained on the full task data. Returns the number of
/// failed cells (0 = clean run).
int cmd_run(const PipelineConfig& config);

/// Compile-time histogram and tamper report per class.
void cmd_audit(const PipelineConfig& config);

/// Task name for a class pair, e.g. "benign_vs_malware".
std::string task_name(const std::string& class_a, const std::string& class_b);

}  // namespace malstat
