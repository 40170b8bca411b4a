#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "malstat/signatures.hpp"

namespace malstat {

enum class PeKind { pe32_exe, pe32_dll, not_pe32 };

/// Finer classification used for corpus filtering reason codes.
enum class PeFileClass { pe32_exe, pe32_dll, pe32_plus, not_pe32 };

const char* to_string(PeKind k);
const char* to_string(PeFileClass k);

/// Never throws: a byte sequence either is a 32-bit PE (MZ at 0, e_lfanew in
/// range, PE\0\0 signature, i386 machine, optional-header magic 0x10B) or it
/// is not.
PeKind identify_pe32(std::span<const std::uint8_t> bytes);
PeFileClass classify_pe_bytes(std::span<const std::uint8_t> bytes);

/// Header features plus import list for one file. The thirteen numeric
/// features mirror the PEframe-style summary columns.
struct PeReport {
  int directories = 0;        // data directories with VA != 0 and Size != 0
  int xor_detected = 0;       // single-byte-XOR probe hit
  int is_dll = 0;
  std::uint64_t file_size = 0;
  int detected = 0;           // evasion indicator families present (0..4)
  int sections = 0;           // COFF NumberOfSections, as declared
  int digital_signature = 0;  // security data directory present
  int packer = 0;             // packer section name or high-entropy code
  int anti_debug = 0;         // imported names matching anti-debug list
  int anti_vm = 0;            // byte-pattern matches anywhere in the file
  int suspicious_api = 0;     // imported names matching suspicious list
  int suspicious_sections = 0;
  int urls = 0;               // distinct URL strings
  std::vector<std::string> api_calls;  // import-table order; ordinals as ORD:<n>
  std::uint32_t compile_timestamp = 0;
  std::vector<std::string> warnings;   // truncated/odd structures, best-effort parse
};

/// Parses a PE32 byte image into a report. Precondition: identify_pe32 did
/// not return not_pe32. Malformed interior structures degrade to warnings,
/// never faults.
PeReport extract_report(std::span<const std::uint8_t> bytes, const SignatureSet& sigs);

/// Column names/values of the 13 header features, in the canonical order the
/// report CSV uses.
std::array<const char*, 13> pe_feature_names();
std::array<double, 13> pe_feature_values(const PeReport& r);

constexpr std::string_view kXorProbeNeedle = "This program cannot be run";

}  // namespace malstat
