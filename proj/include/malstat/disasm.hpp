#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace malstat {

/// Extracted mnemonic stream for one file. `no_instructions` flags listings
/// with no recognizable instruction line (empty sequence + warning).
struct MnemonicSequence {
  std::vector<std::string> ops;  // lowercased, operands stripped
  bool no_instructions = false;
};

/// Parses a disassembler listing in the standard
/// `address: hex-bytes  mnemonic operands` layout, or the fallback
/// one-mnemonic-per-line format. Labels, section banners, blank lines and
/// `(bad)` entries are skipped.
MnemonicSequence parse_disassembly(std::string_view text);

}  // namespace malstat
