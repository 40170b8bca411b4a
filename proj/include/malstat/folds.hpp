#pragma once

#include <cstdint>
#include <vector>

#include "malstat/dataset.hpp"

namespace malstat {

/// Stratified k-fold split. Folds partition all sample indices, fold sizes
/// differ by at most one, and per-class counts across folds differ by at
/// most one. Deterministic for a fixed seed. Requires labels on every
/// sample; throws when k < 2, k > n, or a class is empty.
std::vector<std::vector<int>> stratified_folds(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace malstat
