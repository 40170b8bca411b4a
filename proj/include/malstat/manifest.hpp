#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malstat/pe_parser.hpp"

namespace malstat {

struct ManifestEntry {
  std::string hash;  // sha256 of the file content
  std::string path;
  PeKind kind = PeKind::pe32_exe;
};

struct ExclusionEntry {
  std::string path;
  std::string reason;  // duplicate | not_pe32 | pe32_plus | io_error
};

/// One manifest row per unique PE32 file (keyed by content hash, first path
/// in lexicographic order wins); everything else lands in `excluded` with a
/// reason code. Re-running over an unchanged directory reproduces the same
/// manifest byte for byte.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<ExclusionEntry> excluded;
};

Manifest dedup_and_filter(const std::string& dir);

/// CSV with header `hash_sha256,path,verdict` (the column name records the
/// hash algorithm).
void save_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);
void save_exclusions(const Manifest& m, const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace malstat
