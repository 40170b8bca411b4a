#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace malstat {

/// Optimal prefix-code lengths per byte value; 0 marks a byte absent from
/// the input. Ties during tree construction are broken by (weight, smallest
/// byte value in subtree), so tables are deterministic. A single-symbol
/// input assigns that symbol length 1; with two or more symbols the lengths
/// satisfy Kraft equality sum(2^-len) == 1.
struct HuffmanTable {
  std::array<int, 256> lengths{};

  int length(std::uint8_t b) const { return lengths[b]; }
};

/// Builds the table from byte frequencies of a non-empty input; throws on
/// empty input.
HuffmanTable huffman_lengths(std::span<const std::uint8_t> bytes);

/// Same construction from an explicit 256-entry frequency table.
HuffmanTable huffman_from_counts(const std::array<std::uint64_t, 256>& counts);

}  // namespace malstat
