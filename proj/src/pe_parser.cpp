#include "malstat/pe_parser.hpp"

#include <algorithm>

#include "malstat/bytescan.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

namespace {

constexpr std::uint16_t kMachineI386 = 0x014C;
constexpr std::uint16_t kMagicPe32 = 0x010B;
constexpr std::uint16_t kMagicPe32Plus = 0x020B;
constexpr std::uint16_t kCharacteristicsDll = 0x2000;
constexpr std::uint32_t kScnMemExecute = 0x20000000;

constexpr size_t kMaxImportDescriptors = 1024;
constexpr size_t kMaxThunksPerDll = 8192;
constexpr size_t kMaxNameLength = 512;

struct Reader {
  std::span<const std::uint8_t> data;

  bool has(size_t off, size_t len) const {
    return off <= data.size() && len <= data.size() - off;
  }
  bool u8(size_t off, std::uint8_t& out) const {
    if (!has(off, 1)) return false;
    out = data[off];
    return true;
  }
  bool u16(size_t off, std::uint16_t& out) const {
    if (!has(off, 2)) return false;
    out = static_cast<std::uint16_t>(data[off] | (data[off + 1] << 8));
    return true;
  }
  bool u32(size_t off, std::uint32_t& out) const {
    if (!has(off, 4)) return false;
    out = static_cast<std::uint32_t>(data[off]) | (static_cast<std::uint32_t>(data[off + 1]) << 8) |
          (static_cast<std::uint32_t>(data[off + 2]) << 16) |
          (static_cast<std::uint32_t>(data[off + 3]) << 24);
    return true;
  }
};

struct SectionInfo {
  std::string raw_name;  // up to 8 bytes, trailing NULs stripped
  std::uint32_t virtual_size = 0;
  std::uint32_t virtual_address = 0;
  std::uint32_t raw_size = 0;
  std::uint32_t raw_ptr = 0;
  std::uint32_t characteristics = 0;
};

struct Headers {
  size_t coff_off = 0;      // offset of the COFF header
  size_t opt_off = 0;       // offset of the optional header
  std::uint16_t machine = 0;
  std::uint16_t n_sections = 0;
  std::uint32_t timestamp = 0;
  std::uint16_t opt_size = 0;
  std::uint16_t characteristics = 0;
  std::uint16_t magic = 0;
  std::uint32_t size_of_headers = 0;
  std::uint32_t n_rva_sizes = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> directories;  // (va, size)
  std::vector<SectionInfo> sections;
};

// Returns false when the byte image is not even a candidate PE (no MZ/PE
// skeleton); partial interior data still yields true with whatever parsed.
bool parse_headers(const Reader& r, Headers& h) {
  std::uint8_t m = 0, z = 0;
  if (!r.u8(0, m) || !r.u8(1, z) || m != 'M' || z != 'Z') return false;
  if (r.data.size() < 0x40) return false;
  std::uint32_t e_lfanew = 0;
  if (!r.u32(0x3C, e_lfanew)) return false;
  std::uint32_t sig = 0;
  if (!r.u32(e_lfanew, sig) || sig != 0x00004550) return false;  // "PE\0\0"

  h.coff_off = e_lfanew + 4;
  if (!r.u16(h.coff_off, h.machine)) return false;
  r.u16(h.coff_off + 2, h.n_sections);
  r.u32(h.coff_off + 4, h.timestamp);
  r.u16(h.coff_off + 16, h.opt_size);
  r.u16(h.coff_off + 18, h.characteristics);

  h.opt_off = h.coff_off + 20;
  if (!r.u16(h.opt_off, h.magic)) return false;
  r.u32(h.opt_off + 60, h.size_of_headers);

  if (h.magic == kMagicPe32) {
    if (r.u32(h.opt_off + 92, h.n_rva_sizes)) {
      std::uint32_t n = std::min<std::uint32_t>(h.n_rva_sizes, 16);
      for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t va = 0, size = 0;
        size_t off = h.opt_off + 96 + static_cast<size_t>(i) * 8;
        if (off + 8 > h.opt_off + h.opt_size) break;  // directory array truncated
        if (!r.u32(off, va) || !r.u32(off + 4, size)) break;
        h.directories.emplace_back(va, size);
      }
    }
  }

  size_t sect_off = h.opt_off + h.opt_size;
  for (std::uint16_t i = 0; i < h.n_sections; ++i) {
    size_t off = sect_off + static_cast<size_t>(i) * 40;
    if (!r.has(off, 40)) break;
    SectionInfo s;
    size_t name_len = 8;
    while (name_len > 0 && r.data[off + name_len - 1] == 0) --name_len;
    s.raw_name.assign(reinterpret_cast<const char*>(r.data.data() + off), name_len);
    r.u32(off + 8, s.virtual_size);
    r.u32(off + 12, s.virtual_address);
    r.u32(off + 16, s.raw_size);
    r.u32(off + 20, s.raw_ptr);
    r.u32(off + 36, s.characteristics);
    h.sections.push_back(std::move(s));
  }
  return true;
}

// RVA -> file offset through the section table; header range maps 1:1.
bool rva_to_offset(const Headers& h, std::uint32_t rva, size_t file_size, size_t& out) {
  for (const SectionInfo& s : h.sections) {
    std::uint32_t extent = std::max(s.virtual_size, s.raw_size);
    if (s.virtual_address != 0 && rva >= s.virtual_address && rva - s.virtual_address < extent) {
      std::uint64_t off = static_cast<std::uint64_t>(s.raw_ptr) + (rva - s.virtual_address);
      if (off >= file_size) return false;
      out = static_cast<size_t>(off);
      return true;
    }
  }
  if (rva < h.size_of_headers && rva < file_size) {
    out = rva;
    return true;
  }
  return false;
}

bool read_cstring(const Reader& r, size_t off, std::string& out) {
  out.clear();
  for (size_t i = 0; i < kMaxNameLength; ++i) {
    std::uint8_t c = 0;
    if (!r.u8(off + i, c)) return false;
    if (c == 0) return true;
    out += static_cast<char>(c);
  }
  return false;  // unterminated within cap
}

void parse_imports(const Reader& r, const Headers& h, PeReport& rep) {
  if (h.directories.size() < 2) return;
  auto [dir_va, dir_size] = h.directories[1];
  if (dir_va == 0 || dir_size == 0) return;
  size_t desc_off = 0;
  if (!rva_to_offset(h, dir_va, r.data.size(), desc_off)) {
    rep.warnings.push_back("import directory RVA outside mapped sections");
    return;
  }
  for (size_t d = 0; d < kMaxImportDescriptors; ++d) {
    size_t off = desc_off + d * 20;
    std::uint32_t original_first_thunk = 0, name_rva = 0, first_thunk = 0;
    if (!r.u32(off, original_first_thunk) || !r.u32(off + 12, name_rva) ||
        !r.u32(off + 16, first_thunk)) {
      rep.warnings.push_back("truncated import descriptor table");
      return;
    }
    if (original_first_thunk == 0 && name_rva == 0 && first_thunk == 0) return;  // terminator

    std::uint32_t thunk_rva = original_first_thunk != 0 ? original_first_thunk : first_thunk;
    size_t thunk_off = 0;
    if (thunk_rva == 0 || !rva_to_offset(h, thunk_rva, r.data.size(), thunk_off)) {
      rep.warnings.push_back("import thunk RVA outside mapped sections");
      continue;
    }
    for (size_t t = 0; t < kMaxThunksPerDll; ++t) {
      std::uint32_t thunk = 0;
      if (!r.u32(thunk_off + t * 4, thunk)) {
        rep.warnings.push_back("truncated import thunk array");
        break;
      }
      if (thunk == 0) break;
      if (thunk & 0x80000000u) {
        rep.api_calls.push_back("ORD:" + std::to_string(thunk & 0xFFFF));
        continue;
      }
      size_t name_off = 0;
      if (!rva_to_offset(h, thunk, r.data.size(), name_off)) continue;  // skip bad entry
      std::string name;
      if (!read_cstring(r, name_off + 2, name)) {  // +2 skips the hint
        rep.warnings.push_back("truncated import name");
        continue;
      }
      if (!name.empty()) rep.api_calls.push_back(std::move(name));
    }
  }
  rep.warnings.push_back("import descriptor table exceeds cap");
}

bool name_in_list(const std::string& name, const std::vector<std::string>& list) {
  for (const std::string& entry : list) {
    if (iequals(name, entry)) return true;
  }
  return false;
}

bool standard_section_name(const std::string& name) {
  static const char* kStandard[] = {".text", ".data", ".rdata", ".rsrc", ".reloc",
                                    ".idata", ".edata", ".bss", ".tls", "CODE", "DATA"};
  for (const char* s : kStandard) {
    if (name == s) return true;
  }
  return false;
}

bool printable_name(const std::string& name) {
  for (unsigned char c : name) {
    if (c < 0x20 || c > 0x7E) return false;
  }
  return true;
}

}  // namespace

const char* to_string(PeKind k) {
  switch (k) {
    case PeKind::pe32_exe: return "pe32_exe";
    case PeKind::pe32_dll: return "pe32_dll";
    case PeKind::not_pe32: return "not_pe32";
  }
  return "not_pe32";
}

const char* to_string(PeFileClass k) {
  switch (k) {
    case PeFileClass::pe32_exe: return "pe32_exe";
    case PeFileClass::pe32_dll: return "pe32_dll";
    case PeFileClass::pe32_plus: return "pe32_plus";
    case PeFileClass::not_pe32: return "not_pe32";
  }
  return "not_pe32";
}

PeFileClass classify_pe_bytes(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  Headers h;
  if (!parse_headers(r, h)) return PeFileClass::not_pe32;
  if (h.magic == kMagicPe32Plus) return PeFileClass::pe32_plus;
  if (h.machine != kMachineI386 || h.magic != kMagicPe32) return PeFileClass::not_pe32;
  return (h.characteristics & kCharacteristicsDll) ? PeFileClass::pe32_dll : PeFileClass::pe32_exe;
}

PeKind identify_pe32(std::span<const std::uint8_t> bytes) {
  switch (classify_pe_bytes(bytes)) {
    case PeFileClass::pe32_exe: return PeKind::pe32_exe;
    case PeFileClass::pe32_dll: return PeKind::pe32_dll;
    default: return PeKind::not_pe32;
  }
}

PeReport extract_report(std::span<const std::uint8_t> bytes, const SignatureSet& sigs) {
  PeReport rep;
  rep.file_size = bytes.size();

  Reader r{bytes};
  Headers h;
  if (!parse_headers(r, h)) {
    rep.warnings.push_back("not a PE image");
    return rep;
  }

  rep.sections = h.n_sections;
  rep.compile_timestamp = h.timestamp;
  rep.is_dll = (h.characteristics & kCharacteristicsDll) ? 1 : 0;

  for (auto [va, size] : h.directories) {
    if (va != 0 && size != 0) rep.directories++;
  }
  if (h.directories.size() > 4) {
    auto [va, size] = h.directories[4];
    rep.digital_signature = (va != 0 && size != 0) ? 1 : 0;
  }

  parse_imports(r, h, rep);
  for (const std::string& name : rep.api_calls) {
    if (name_in_list(name, sigs.anti_debug_apis)) rep.anti_debug++;
    if (name_in_list(name, sigs.suspicious_apis)) rep.suspicious_api++;
  }

  std::uint64_t vm_hits = 0;
  for (const auto& pattern : sigs.anti_vm_byte_patterns) {
    vm_hits += count_pattern(bytes, pattern);
  }
  rep.anti_vm = static_cast<int>(std::min<std::uint64_t>(vm_hits, 1u << 30));

  bool packer_name = false;
  bool packer_entropy = false;
  for (const SectionInfo& s : h.sections) {
    if (name_in_list(s.raw_name, sigs.packer_section_names)) packer_name = true;
    if (!standard_section_name(s.raw_name) || !printable_name(s.raw_name)) rep.suspicious_sections++;
    if ((s.characteristics & kScnMemExecute) && s.raw_size > 0 && s.raw_ptr < bytes.size()) {
      size_t len = std::min<size_t>(s.raw_size, bytes.size() - s.raw_ptr);
      double e = shannon_entropy(bytes.subspan(s.raw_ptr, len));
      if (e >= sigs.entropy_threshold) packer_entropy = true;
    }
  }
  rep.packer = (packer_name || packer_entropy) ? 1 : 0;

  rep.urls = static_cast<int>(find_urls(bytes).size());
  rep.xor_detected = xor_probe(bytes, kXorProbeNeedle) ? 1 : 0;
  rep.detected = (rep.anti_debug > 0) + (rep.anti_vm > 0) + rep.xor_detected + rep.packer;
  return rep;
}

std::array<const char*, 13> pe_feature_names() {
  return {"ShortInfo_Directories", "ShortInfo_Xor",  "ShortInfo_DLL",      "ShortInfo_FileSize",
          "ShortInfo_Detected",    "ShortInfo_Sections", "DigitalSignature",   "Packer",
          "AntiDebug",             "AntiVM",         "SuspiciousAPI",      "SuspiciousSections",
          "Url"};
}

std::array<double, 13> pe_feature_values(const PeReport& r) {
  return {static_cast<double>(r.directories),
          static_cast<double>(r.xor_detected),
          static_cast<double>(r.is_dll),
          static_cast<double>(r.file_size),
          static_cast<double>(r.detected),
          static_cast<double>(r.sections),
          static_cast<double>(r.digital_signature),
          static_cast<double>(r.packer),
          static_cast<double>(r.anti_debug),
          static_cast<double>(r.anti_vm),
          static_cast<double>(r.suspicious_api),
          static_cast<double>(r.suspicious_sections),
          static_cast<double>(r.urls)};
}

}  // namespace malstat
