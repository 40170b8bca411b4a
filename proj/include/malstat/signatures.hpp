#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace malstat {

/// Heuristic knowledge used by the PE report extractor. Shipped as an
/// editable text file (one `key = value` pair per line, keys repeatable):
///
///   entropy_threshold = 7.2
///   anti_debug        = IsDebuggerPresent
///   suspicious_api    = CreateRemoteThread
///   anti_vm           = 56 4d 58 68        # hex byte pattern
///   packer_section    = UPX0
///
/// API names match case-insensitively; byte patterns match anywhere in the
/// raw file.
struct SignatureSet {
  std::vector<std::string> anti_debug_apis;
  std::vector<std::vector<std::uint8_t>> anti_vm_byte_patterns;
  std::vector<std::string> suspicious_apis;
  std::vector<std::string> packer_section_names;
  double entropy_threshold = 7.2;  // bits/byte on executable sections

  static SignatureSet defaults();
};

SignatureSet load_signatures(const std::string& path);
void save_signatures(const SignatureSet& sigs, const std::string& path);

}  // namespace malstat
