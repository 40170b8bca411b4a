#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "malstat/huffman.hpp"

namespace malstat {

/// Sliding-window randomness profile: the file's Huffman code-length sums
/// for its `count` highest-scoring windows, reported in original file order
/// and zero-padded at the tail when fewer windows exist.
struct RandomnessProfile {
  std::vector<double> scores;  // exactly `count` entries
  int window_size = 32;
  int skip = 32;
};

/// Per-window code-length sums at offsets 0, skip, 2*skip, ...; the final
/// partial window is kept. OpenMP kernel plus serial reference.
std::vector<double> window_scores(std::span<const std::uint8_t> bytes, const HuffmanTable& table,
                                  int window, int skip);
std::vector<double> window_scores_serial(std::span<const std::uint8_t> bytes, const HuffmanTable& table,
                                         int window, int skip);

/// Full profile of a non-empty file: build the byte-frequency Huffman table,
/// score every window, keep the `count` highest scores (ties broken by lower
/// offset) in offset order. Throws on empty input or non-positive
/// window/skip.
RandomnessProfile randomness_profile(std::span<const std::uint8_t> bytes, int window = 32,
                                     int skip = 32, int count = 30);

}  // namespace malstat
