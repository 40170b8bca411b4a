#pragma once

// Independent brute-force oracles used by unit and acceptance tests. These
// recompute expected values from first principles and must stay decoupled
// from the library implementation paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "malstat/dataset.hpp"

namespace oracle {

// Minimum total encoded length over all binary prefix codes for up to 4
// symbols: enumerate every length assignment satisfying the Kraft equality
// and take the cheapest.
inline std::uint64_t best_prefix_code_cost(const std::vector<std::uint64_t>& freqs) {
  const int k = static_cast<int>(freqs.size());
  if (k == 1) return freqs[0];  // single symbol: one bit per occurrence
  std::vector<std::vector<int>> length_sets;
  if (k == 2) length_sets = {{1, 1}};
  if (k == 3) length_sets = {{1, 2, 2}};
  if (k == 4) length_sets = {{1, 2, 3, 3}, {2, 2, 2, 2}};
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (auto lens : length_sets) {
    std::sort(lens.begin(), lens.end());
    do {
      std::uint64_t cost = 0;
      for (int i = 0; i < k; ++i) cost += freqs[i] * static_cast<std::uint64_t>(lens[i]);
      best = std::min(best, cost);
    } while (std::next_permutation(lens.begin(), lens.end()));
  }
  return best;
}

inline double entropy_of_labels(const std::vector<int>& labels, int n_classes) {
  std::vector<int> counts(n_classes, 0);
  for (int l : labels) counts[l]++;
  double h = 0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / labels.size();
    h -= p * std::log2(p);
  }
  return h;
}

// Information gain by direct partition of the samples on a symbolic
// attribute; missing values are dropped from both terms.
inline double info_gain_by_partition(const malstat::Dataset& ds, int attr) {
  std::map<int, std::vector<int>> partitions;
  std::vector<int> present_labels;
  for (const auto& s : ds.samples) {
    double v = s.values[attr];
    if (malstat::is_missing(v)) continue;
    partitions[static_cast<int>(v)].push_back(s.label);
    present_labels.push_back(s.label);
  }
  if (present_labels.empty()) return 0.0;
  const int m = static_cast<int>(ds.n_classes());
  double h = entropy_of_labels(present_labels, m);
  double cond = 0;
  for (const auto& [v, labels] : partitions) {
    cond += static_cast<double>(labels.size()) / present_labels.size() * entropy_of_labels(labels, m);
  }
  return h - cond;
}

// Naive Bayes posterior by direct counting (raw relative frequencies, no
// smoothing): P(Ck) * prod_i P(vi|Ck), normalized across classes.
inline std::vector<double> naive_bayes_posterior_by_counts(const malstat::Dataset& ds,
                                                           const std::vector<double>& query) {
  const int m = static_cast<int>(ds.n_classes());
  const size_t n = ds.size();
  std::vector<double> post(m, 0.0);
  for (int k = 0; k < m; ++k) {
    double p_ck = 0;
    for (const auto& s : ds.samples) {
      if (s.label == k) p_ck += 1.0 / static_cast<double>(n);
    }
    double prod = p_ck;
    for (size_t a = 0; a < ds.n_attrs(); ++a) {
      if (malstat::is_missing(query[a])) continue;
      double joint = 0;
      for (const auto& s : ds.samples) {
        if (s.label == k && !malstat::is_missing(s.values[a]) && s.values[a] == query[a]) {
          joint += 1.0 / static_cast<double>(n);
        }
      }
      prod *= p_ck > 0 ? joint / p_ck : 0.0;
    }
    post[k] = prod;
  }
  double total = std::accumulate(post.begin(), post.end(), 0.0);
  if (total > 0) {
    for (double& p : post) p /= total;
  }
  return post;
}

}  // namespace oracle
