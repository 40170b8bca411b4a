#include "malstat/pe_builder.hpp"

#include <cstring>

#include "malstat/error.hpp"

namespace malstat {

namespace {

constexpr std::uint32_t kAlign = 0x1000;
constexpr std::uint32_t kHeaderBlock = 0x1000;
constexpr std::uint8_t kPadByte = 0x42;

std::uint32_t align_up(std::uint32_t v, std::uint32_t a) { return (v + a - 1) / a * a; }

void put_u16(std::vector<std::uint8_t>& out, size_t off, std::uint16_t v) {
  out[off] = static_cast<std::uint8_t>(v);
  out[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::vector<std::uint8_t>& out, size_t off, std::uint32_t v) {
  out[off] = static_cast<std::uint8_t>(v);
  out[off + 1] = static_cast<std::uint8_t>(v >> 8);
  out[off + 2] = static_cast<std::uint8_t>(v >> 16);
  out[off + 3] = static_cast<std::uint8_t>(v >> 24);
}

// Import blob: descriptor array, one thunk array per DLL (used as both the
// original and bound thunk), hint/name entries, DLL name strings.
std::vector<std::uint8_t> build_import_blob(const std::vector<PeImportDllSpec>& imports,
                                            std::uint32_t blob_rva, std::uint32_t& dir_size) {
  const size_t ndll = imports.size();
  const size_t desc_bytes = (ndll + 1) * 20;
  dir_size = static_cast<std::uint32_t>(desc_bytes);

  size_t thunks_bytes = 0;
  for (const auto& d : imports) thunks_bytes += (d.names.size() + d.ordinals.size() + 1) * 4;

  std::vector<std::uint8_t> names_area;
  std::vector<std::uint32_t> name_offsets;  // per imported name, into names_area
  for (const auto& d : imports) {
    for (const auto& n : d.names) {
      name_offsets.push_back(static_cast<std::uint32_t>(names_area.size()));
      names_area.push_back(0);  // hint
      names_area.push_back(0);
      names_area.insert(names_area.end(), n.begin(), n.end());
      names_area.push_back(0);
    }
  }
  std::vector<std::uint32_t> dll_name_offsets;
  for (const auto& d : imports) {
    dll_name_offsets.push_back(static_cast<std::uint32_t>(names_area.size()));
    names_area.insert(names_area.end(), d.dll.begin(), d.dll.end());
    names_area.push_back(0);
  }

  std::vector<std::uint8_t> blob(desc_bytes + thunks_bytes + names_area.size(), 0);
  const std::uint32_t thunks_rva = blob_rva + static_cast<std::uint32_t>(desc_bytes);
  const std::uint32_t names_rva = thunks_rva + static_cast<std::uint32_t>(thunks_bytes);
  std::memcpy(blob.data() + desc_bytes + thunks_bytes, names_area.data(), names_area.size());

  size_t thunk_cursor = desc_bytes;
  size_t name_idx = 0;
  for (size_t d = 0; d < ndll; ++d) {
    const std::uint32_t this_thunks_rva =
        thunks_rva + static_cast<std::uint32_t>(thunk_cursor - desc_bytes);
    put_u32(blob, d * 20 + 0, this_thunks_rva);                      // OriginalFirstThunk
    put_u32(blob, d * 20 + 12, names_rva + dll_name_offsets[d]);     // Name
    put_u32(blob, d * 20 + 16, this_thunks_rva);                     // FirstThunk
    for (size_t i = 0; i < imports[d].names.size(); ++i) {
      put_u32(blob, thunk_cursor, names_rva + name_offsets[name_idx++]);
      thunk_cursor += 4;
    }
    for (std::uint16_t ord : imports[d].ordinals) {
      put_u32(blob, thunk_cursor, 0x80000000u | ord);
      thunk_cursor += 4;
    }
    thunk_cursor += 4;  // zero terminator
  }
  return blob;
}

}  // namespace

std::vector<std::uint8_t> build_pe32(const PeSpec& spec) {
  if (spec.sections.empty()) throw Error("build_pe32: at least one section required");
  if (!spec.imports.empty() &&
      (spec.import_section < 0 || spec.import_section >= static_cast<int>(spec.sections.size()))) {
    throw Error("build_pe32: imports need a valid import_section index");
  }
  for (const auto& s : spec.sections) {
    if (s.name.size() > 8) throw Error("build_pe32: section name too long: " + s.name);
  }

  const size_t nsec = spec.sections.size();

  // Section RVAs/offsets (identical by construction).
  std::vector<std::uint32_t> rva(nsec);
  std::vector<std::uint32_t> content_size(nsec);
  for (size_t i = 0; i < nsec; ++i) {
    content_size[i] = static_cast<std::uint32_t>(spec.sections[i].data.size());
  }

  // The import blob is appended to its section's user data; its size depends
  // on its own RVA only through stored RVAs, so compute sizes first.
  std::uint32_t import_dir_size = 0;
  std::vector<std::uint8_t> import_blob;
  if (!spec.imports.empty()) {
    // Blob RVA is known once earlier sections are laid out; do layout in two
    // passes with a dummy RVA first (blob size is RVA-independent).
    import_blob = build_import_blob(spec.imports, 0, import_dir_size);
    content_size[spec.import_section] += static_cast<std::uint32_t>(import_blob.size());
  }

  std::uint32_t cursor = kHeaderBlock;
  std::vector<std::uint32_t> padded(nsec);
  for (size_t i = 0; i < nsec; ++i) {
    rva[i] = cursor;
    padded[i] = align_up(std::max<std::uint32_t>(content_size[i], 1), kAlign);
    cursor += padded[i];
  }
  const std::uint32_t image_end = cursor;

  std::uint32_t import_blob_rva = 0;
  if (!spec.imports.empty()) {
    import_blob_rva =
        rva[spec.import_section] + static_cast<std::uint32_t>(spec.sections[spec.import_section].data.size());
    import_blob = build_import_blob(spec.imports, import_blob_rva, import_dir_size);
  }

  std::vector<std::uint8_t> out(image_end, 0x00);

  // DOS header
  out[0] = 'M';
  out[1] = 'Z';
  put_u32(out, 0x3C, 0x40);

  // PE signature + COFF header
  size_t pe = 0x40;
  out[pe] = 'P';
  out[pe + 1] = 'E';
  put_u16(out, pe + 4, 0x014C);
  put_u16(out, pe + 6, static_cast<std::uint16_t>(nsec));
  put_u32(out, pe + 8, spec.timestamp);
  put_u16(out, pe + 20, 0x00E0);  // SizeOfOptionalHeader
  std::uint16_t characteristics = 0x0102;  // EXECUTABLE_IMAGE | 32BIT_MACHINE
  if (spec.dll) characteristics |= 0x2000;
  put_u16(out, pe + 22, characteristics);

  // Optional header (PE32)
  size_t opt = pe + 24;
  put_u16(out, opt, 0x010B);
  std::uint32_t entry = rva[0];
  for (size_t i = 0; i < nsec; ++i) {
    if (spec.sections[i].characteristics & 0x20000000u) {
      entry = rva[i];
      break;
    }
  }
  put_u32(out, opt + 16, entry);               // AddressOfEntryPoint
  put_u32(out, opt + 20, rva[0]);              // BaseOfCode
  put_u32(out, opt + 28, 0x00400000);          // ImageBase
  put_u32(out, opt + 32, kAlign);              // SectionAlignment
  put_u32(out, opt + 36, kAlign);              // FileAlignment
  put_u16(out, opt + 48, 4);                   // MajorSubsystemVersion
  put_u32(out, opt + 56, image_end);           // SizeOfImage
  put_u32(out, opt + 60, kHeaderBlock);        // SizeOfHeaders
  put_u16(out, opt + 68, 2);                   // Subsystem: GUI
  put_u32(out, opt + 72, 0x00100000);          // SizeOfStackReserve
  put_u32(out, opt + 76, 0x00001000);          // SizeOfStackCommit
  put_u32(out, opt + 80, 0x00100000);          // SizeOfHeapReserve
  put_u32(out, opt + 84, 0x00001000);          // SizeOfHeapCommit
  put_u32(out, opt + 92, 16);                  // NumberOfRvaAndSizes

  size_t dirs = opt + 96;
  if (!spec.imports.empty()) {
    put_u32(out, dirs + 1 * 8, import_blob_rva);
    put_u32(out, dirs + 1 * 8 + 4, import_dir_size);
  }
  if (spec.security_dir) {
    put_u32(out, dirs + 4 * 8, image_end);  // certificate table: file offset semantics
    put_u32(out, dirs + 4 * 8 + 4, 8);
  }
  for (int d : spec.extra_dirs) {
    if (d <= 0 || d >= 16 || d == 1 || d == 4) throw Error("build_pe32: extra_dirs index unsupported");
    put_u32(out, dirs + static_cast<size_t>(d) * 8, rva[0]);
    put_u32(out, dirs + static_cast<size_t>(d) * 8 + 4, 8);
  }

  // Section table
  size_t sect = opt + 0xE0;
  for (size_t i = 0; i < nsec; ++i) {
    size_t off = sect + i * 40;
    std::memcpy(out.data() + off, spec.sections[i].name.data(),
                std::min<size_t>(spec.sections[i].name.size(), 8));
    put_u32(out, off + 8, padded[i]);   // VirtualSize
    put_u32(out, off + 12, rva[i]);     // VirtualAddress
    put_u32(out, off + 16, padded[i]);  // SizeOfRawData
    put_u32(out, off + 20, rva[i]);     // PointerToRawData (identity layout)
    put_u32(out, off + 36, spec.sections[i].characteristics);
  }

  // Section contents
  for (size_t i = 0; i < nsec; ++i) {
    std::uint8_t* dst = out.data() + rva[i];
    const auto& data = spec.sections[i].data;
    std::memcpy(dst, data.data(), data.size());
    size_t filled = data.size();
    if (static_cast<int>(i) == spec.import_section && !import_blob.empty()) {
      std::memcpy(dst + filled, import_blob.data(), import_blob.size());
      filled += import_blob.size();
    }
    std::memset(dst + filled, kPadByte, padded[i] - filled);
  }

  out.insert(out.end(), spec.overlay.begin(), spec.overlay.end());
  return out;
}

}  // namespace malstat
