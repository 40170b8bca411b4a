#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace malstat {

// Raw byte-scanning kernels. Each has an OpenMP-parallel entry point and a
// `_serial` reference implementation kept for testing and benchmarking; both
// must produce identical results on identical inputs.

/// Shannon entropy of a byte span in bits per byte (0 for empty input).
double shannon_entropy(std::span<const std::uint8_t> data);
double shannon_entropy_serial(std::span<const std::uint8_t> data);

/// True when XOR-decoding `data` with any single-byte key 1..255 reveals at
/// least one occurrence of `needle`. A plaintext occurrence alone never
/// triggers (key 0 is not probed).
bool xor_probe(std::span<const std::uint8_t> data, std::string_view needle);
bool xor_probe_serial(std::span<const std::uint8_t> data, std::string_view needle);

/// Number of (possibly overlapping) occurrences of `pattern` in `data`.
std::uint64_t count_pattern(std::span<const std::uint8_t> data, std::span<const std::uint8_t> pattern);
std::uint64_t count_pattern_serial(std::span<const std::uint8_t> data, std::span<const std::uint8_t> pattern);

/// Distinct URL strings: a `http://`, `https://` or `ftp://` scheme followed
/// by a maximal run of at least 4 printable non-space characters.
std::vector<std::string> find_urls(std::span<const std::uint8_t> data);

}  // namespace malstat
