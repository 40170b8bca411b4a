#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace malstat {

// Minimal PE32 image writer. Produces structurally valid files with
// controllable header, section and import traits for the demo corpus
// generator and for parser round-trip tests. Layout: 4 KiB header block,
// then each section at identical RVA/file offset, 4 KiB aligned, data padded
// with 0x42; an optional overlay follows the last section.

struct PeSectionSpec {
  std::string name;                    // at most 8 bytes
  std::vector<std::uint8_t> data;
  std::uint32_t characteristics = 0x60000020;  // CODE | EXECUTE | READ
};

struct PeImportDllSpec {
  std::string dll;
  std::vector<std::string> names;
  std::vector<std::uint16_t> ordinals;
};

struct PeSpec {
  bool dll = false;
  std::uint32_t timestamp = 0x41D5D380;  // 2005-01-01
  std::vector<PeSectionSpec> sections;   // at least one
  std::vector<PeImportDllSpec> imports;
  int import_section = -1;               // section receiving the import blob
  bool security_dir = false;             // mark data directory 4 as present
  std::vector<int> extra_dirs;           // extra directory indexes to populate
  std::vector<std::uint8_t> overlay;     // raw bytes appended after sections
};

std::vector<std::uint8_t> build_pe32(const PeSpec& spec);

}  // namespace malstat
