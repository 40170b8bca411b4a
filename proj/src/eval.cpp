#include "malstat/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "malstat/error.hpp"
#include "malstat/folds.hpp"
#include "malstat/parallel.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct FoldOutcome {
  std::vector<std::vector<std::uint64_t>> confusion;
  double accuracy = 0;
  double wall_ms = 0;
  std::string error;
};

FoldOutcome run_fold(const Dataset& ds, const ModelSpec& spec,
                     const std::vector<std::vector<int>>& folds, int fold) {
  FoldOutcome out;
  const int m = static_cast<int>(ds.n_classes());
  out.confusion.assign(m, std::vector<std::uint64_t>(m, 0));
  auto start = std::chrono::steady_clock::now();
  try {
    std::vector<int> train_rows;
    for (size_t f = 0; f < folds.size(); ++f) {
      if (static_cast<int>(f) == fold) continue;
      train_rows.insert(train_rows.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    Dataset train = ds.subset(train_rows);
    TrainedModel model = train_model(train, spec);

    std::uint64_t correct = 0;
    for (int row : folds[fold]) {
      Prediction p = model.classify(ds.samples[row]);
      out.confusion[ds.samples[row].label][p.class_index]++;
      if (p.class_index == ds.samples[row].label) ++correct;
    }
    out.accuracy = folds[fold].empty()
                       ? 0.0
                       : 100.0 * static_cast<double>(correct) / folds[fold].size();
  } catch (const Error& e) {
    out.error = e.what();
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

EvalReport assemble(const Dataset& ds, const ModelSpec& spec, int k,
                    const std::vector<FoldOutcome>& outcomes) {
  for (int f = 0; f < k; ++f) {
    if (!outcomes[f].error.empty()) {
      throw Error("fold " + std::to_string(f) + ": " + outcomes[f].error);
    }
  }
  const int m = static_cast<int>(ds.n_classes());
  EvalReport report;
  report.model_spec = spec.summary();
  report.class_names = ds.class_names;
  report.confusion.assign(m, std::vector<std::uint64_t>(m, 0));
  for (int f = 0; f < k; ++f) {
    report.fold_accuracy.push_back(outcomes[f].accuracy);
    report.fold_wall_ms.push_back(outcomes[f].wall_ms);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) report.confusion[i][j] += outcomes[f].confusion[i][j];
    }
  }
  report.mean_accuracy =
      std::accumulate(report.fold_accuracy.begin(), report.fold_accuracy.end(), 0.0) / k;
  std::uint64_t trace = 0, total = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      total += report.confusion[i][j];
      if (i == j) trace += report.confusion[i][j];
    }
  }
  report.pooled_accuracy = total > 0 ? 100.0 * static_cast<double>(trace) / total : 0.0;
  return report;
}

}  // namespace

EvalReport cross_validate_serial(const Dataset& ds, const ModelSpec& spec, int k,
                                 std::uint64_t seed) {
  auto folds = stratified_folds(ds, k, seed);
  std::vector<FoldOutcome> outcomes(k);
  for (int f = 0; f < k; ++f) outcomes[f] = run_fold(ds, spec, folds, f);
  return assemble(ds, spec, k, outcomes);
}

EvalReport cross_validate(const Dataset& ds, const ModelSpec& spec, int k, std::uint64_t seed) {
  auto folds = stratified_folds(ds, k, seed);
  std::vector<FoldOutcome> outcomes(k);
  par::for_index_dynamic(k, [&](std::int64_t f) {
    outcomes[f] = run_fold(ds, spec, folds, static_cast<int>(f));
  });
  return assemble(ds, spec, k, outcomes);
}

std::string EvalReport::to_csv() const {
  // Deterministic artifact: wall times live in the text report only.
  std::ostringstream out;
  out << "task," << task << "\n";
  out << "model," << model_spec << "\n";
  out << "fold,accuracy_pct\n";
  for (size_t f = 0; f < fold_accuracy.size(); ++f) {
    out << (f + 1) << ',' << fixed2(fold_accuracy[f]) << "\n";
  }
  out << "mean," << fixed2(mean_accuracy) << "\n";
  out << "pooled," << fixed2(pooled_accuracy) << "\n";
  out << "confusion,true\\pred";
  for (const auto& c : class_names) out << ',' << c;
  out << "\n";
  for (size_t i = 0; i < confusion.size(); ++i) {
    out << "confusion," << class_names[i];
    for (std::uint64_t v : confusion[i]) out << ',' << v;
    out << "\n";
  }
  return out.str();
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "task: " << task << "\n";
  out << "model: " << model_spec << "\n";
  out << "folds:";
  for (double a : fold_accuracy) out << ' ' << fixed2(a) << '%';
  out << "\nmean: " << fixed2(mean_accuracy) << "%  pooled: " << fixed2(pooled_accuracy) << "%\n";
  out << "confusion (rows = true class):\n";
  for (size_t i = 0; i < confusion.size(); ++i) {
    out << "  " << class_names[i] << ":";
    for (std::uint64_t v : confusion[i]) out << ' ' << v;
    out << "\n";
  }
  double total_ms = std::accumulate(fold_wall_ms.begin(), fold_wall_ms.end(), 0.0);
  out << "wall: " << fixed2(total_ms) << " ms\n";
  return out.str();
}

GridReport grid_report(const std::vector<std::string>& tasks,
                       const std::vector<std::string>& methods,
                       const std::vector<std::vector<std::optional<EvalReport>>>& cells) {
  GridReport grid;
  grid.tasks = tasks;
  grid.methods = methods;
  grid.mean_accuracy.resize(tasks.size());
  for (size_t t = 0; t < tasks.size(); ++t) {
    grid.mean_accuracy[t].resize(methods.size());
    for (size_t m = 0; m < methods.size(); ++m) {
      const auto& cell = cells.at(t).at(m);
      if (cell.has_value()) grid.mean_accuracy[t][m] = cell->mean_accuracy;
    }
  }
  return grid;
}

namespace {

std::vector<size_t> best_columns(const std::vector<std::optional<double>>& row) {
  // Compare on the rendered 2-decimal value so ties match what readers see.
  std::vector<size_t> best;
  std::string best_text;
  for (size_t m = 0; m < row.size(); ++m) {
    if (!row[m].has_value()) continue;
    std::string text = fixed2(*row[m]);
    if (best.empty() || std::stod(text) > std::stod(best_text)) {
      best = {m};
      best_text = text;
    } else if (text == best_text) {
      best.push_back(m);
    }
  }
  return best;
}

}  // namespace

std::string GridReport::to_csv() const {
  std::ostringstream out;
  out << "task";
  for (const auto& m : methods) out << ',' << m;
  out << ",best\n";
  for (size_t t = 0; t < tasks.size(); ++t) {
    out << tasks[t];
    for (size_t m = 0; m < methods.size(); ++m) {
      out << ',';
      if (mean_accuracy[t][m].has_value()) {
        out << fixed2(*mean_accuracy[t][m]);
      } else {
        out << "—";
      }
    }
    out << ',';
    auto best = best_columns(mean_accuracy[t]);
    for (size_t i = 0; i < best.size(); ++i) out << (i ? ";" : "") << methods[best[i]];
    out << "\n";
  }
  return out.str();
}

std::string GridReport::to_markdown() const {
  std::ostringstream out;
  out << "| task |";
  for (const auto& m : methods) out << ' ' << m << " |";
  out << "\n|---|";
  for (size_t m = 0; m < methods.size(); ++m) out << "---|";
  out << "\n";
  for (size_t t = 0; t < tasks.size(); ++t) {
    auto best = best_columns(mean_accuracy[t]);
    out << "| " << tasks[t] << " |";
    for (size_t m = 0; m < methods.size(); ++m) {
      out << ' ';
      if (!mean_accuracy[t][m].has_value()) {
        out << "—";
      } else {
        bool is_best = std::find(best.begin(), best.end(), m) != best.end();
        if (is_best) out << "**" << fixed2(*mean_accuracy[t][m]) << "**";
        if (!is_best) out << fixed2(*mean_accuracy[t][m]);
      }
      out << " |";
    }
    out << "\n";
  }
  return out.str();
}

FrequencyReport frequency_report(
    const NgramVocabulary& vocab,
    const std::vector<std::pair<std::string, std::vector<double>>>& per_class_fractions, int top) {
  if (per_class_fractions.empty()) throw Error("frequency_report: no classes");
  for (const auto& [name, fractions] : per_class_fractions) {
    if (fractions.size() != vocab.tokens.size()) {
      throw Error("frequency_report: fractions for class " + name + " do not match the vocabulary");
    }
  }

  FrequencyReport report;
  for (const auto& [name, fractions] : per_class_fractions) report.class_names.push_back(name);

  // Rank by the reference (first) class's fraction, ties by token order.
  const auto& reference = per_class_fractions[0].second;
  std::vector<size_t> order(vocab.tokens.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (reference[a] != reference[b]) return reference[a] > reference[b];
    return vocab.tokens[a] < vocab.tokens[b];
  });
  if (static_cast<int>(order.size()) > top) order.resize(top);

  for (size_t idx : order) {
    report.tokens.push_back(vocab.tokens[idx]);
    std::vector<double> row;
    for (const auto& [name, fractions] : per_class_fractions) row.push_back(fractions[idx]);
    report.fractions.push_back(std::move(row));
  }
  return report;
}

std::string FrequencyReport::to_csv() const {
  std::ostringstream out;
  out << "ngram";
  for (const auto& c : class_names) out << ',' << c;
  out << "\n";
  for (size_t t = 0; t < tokens.size(); ++t) {
    out << tokens[t].text();
    for (double f : fractions[t]) out << ',' << format_double(f);
    out << "\n";
  }
  return out.str();
}

}  // namespace malstat
