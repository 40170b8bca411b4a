#include "malstat/randomness.hpp"

#include <algorithm>
#include <numeric>

#include "malstat/error.hpp"
#include "malstat/parallel.hpp"

namespace malstat {

namespace {

double score_window(std::span<const std::uint8_t> bytes, const HuffmanTable& table, size_t begin,
                    size_t window) {
  size_t end = std::min(bytes.size(), begin + window);
  // Integer sum: code lengths are small ints, so the parallel and serial
  // paths agree bit for bit.
  std::uint64_t sum = 0;
  for (size_t i = begin; i < end; ++i) sum += static_cast<std::uint64_t>(table.length(bytes[i]));
  return static_cast<double>(sum);
}

size_t window_count(size_t n, int skip) { return n == 0 ? 0 : (n - 1) / static_cast<size_t>(skip) + 1; }

}  // namespace

std::vector<double> window_scores_serial(std::span<const std::uint8_t> bytes, const HuffmanTable& table,
                                         int window, int skip) {
  if (window < 1 || skip < 1) throw Error("window_scores: window and skip must be >= 1");
  std::vector<double> scores(window_count(bytes.size(), skip));
  for (size_t w = 0; w < scores.size(); ++w) {
    scores[w] = score_window(bytes, table, w * static_cast<size_t>(skip), window);
  }
  return scores;
}

std::vector<double> window_scores(std::span<const std::uint8_t> bytes, const HuffmanTable& table,
                                  int window, int skip) {
  if (window < 1 || skip < 1) throw Error("window_scores: window and skip must be >= 1");
  std::vector<double> scores(window_count(bytes.size(), skip));
  par::for_index(static_cast<std::int64_t>(scores.size()), [&](std::int64_t w) {
    scores[w] = score_window(bytes, table, static_cast<size_t>(w) * static_cast<size_t>(skip), window);
  });
  return scores;
}

RandomnessProfile randomness_profile(std::span<const std::uint8_t> bytes, int window, int skip,
                                     int count) {
  if (bytes.empty()) throw Error("randomness_profile: empty input");
  if (window < 1 || skip < 1 || count < 1) throw Error("randomness_profile: bad parameters");

  HuffmanTable table = huffman_lengths(bytes);
  std::vector<double> scores = window_scores(bytes, table, window, skip);

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // tie: lower offset wins
  });
  if (static_cast<int>(order.size()) > count) order.resize(count);
  std::sort(order.begin(), order.end());  // back to original file order

  RandomnessProfile profile;
  profile.window_size = window;
  profile.skip = skip;
  profile.scores.reserve(count);
  for (int idx : order) profile.scores.push_back(scores[idx]);
  profile.scores.resize(count, 0.0);  // zero-pad the tail
  return profile;
}

}  // namespace malstat
