#include "malstat/folds.hpp"

#include <algorithm>
#include <random>

#include "malstat/error.hpp"

namespace malstat {

std::vector<std::vector<int>> stratified_folds(const Dataset& ds, int k, std::uint64_t seed) {
  const int n = static_cast<int>(ds.size());
  if (k < 2) throw Error("stratified_folds: k must be >= 2");
  if (k > n) throw Error("stratified_folds: k (" + std::to_string(k) + ") exceeds sample count (" +
                         std::to_string(n) + ")");
  if (ds.n_classes() == 0) throw Error("stratified_folds: dataset has no classes");

  std::vector<std::vector<int>> by_class(ds.n_classes());
  for (int i = 0; i < n; ++i) {
    int label = ds.samples[i].label;
    if (label == kNoLabel) throw Error("stratified_folds: sample " + std::to_string(i) + " is unlabeled");
    by_class[label].push_back(i);
  }
  for (size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) throw Error("stratified_folds: class " + ds.class_names[c] + " has no samples");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> folds(k);
  // Dealing class blocks through a cursor that runs on across classes keeps
  // both the per-class counts and the global fold sizes within one of each
  // other.
  int cursor = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (int idx : members) {
      folds[cursor % k].push_back(idx);
      ++cursor;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace malstat
