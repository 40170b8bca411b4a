#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace malstat {

/// SHA-256 digest as a lowercase hex string. Used for corpus dedup keys and
/// sample ids; the manifest column name records the algorithm.
std::string sha256_hex(std::span<const std::uint8_t> data);

}  // namespace malstat
