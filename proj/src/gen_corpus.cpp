#include "malstat/gen_corpus.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "malstat/error.hpp"
#include "malstat/manifest.hpp"
#include "malstat/pe_builder.hpp"
#include "malstat/pe_parser.hpp"

namespace fs = std::filesystem;

namespace malstat {

namespace {

// Byte-level hygiene for exact fixtures: filler alphabets avoid 0x0F (no
// accidental sidt/sldt/str pattern starts), 0x3A ':' (no accidental URL
// schemes), and 0x56 'V' (no accidental VMXh).
std::vector<std::uint8_t> low_entropy_filler(std::mt19937_64& rng, size_t n) {
  std::vector<std::uint8_t> out(n);
  std::uint8_t base = 0x41 + static_cast<std::uint8_t>(rng() % 8);
  for (size_t i = 0; i < n; ++i) out[i] = base + static_cast<std::uint8_t>(i % 3);
  return out;
}

std::vector<std::uint8_t> high_entropy_filler(std::mt19937_64& rng, size_t n) {
  std::vector<std::uint8_t> out(n);
  for (size_t i = 0; i < n; ++i) {
    std::uint8_t v;
    do {
      v = static_cast<std::uint8_t>(rng());
    } while (v == 0x0F || v == 0x3A || v == 0x56);
    out[i] = v;
  }
  return out;
}

bool timestamp_safe(std::uint32_t ts) {
  for (int shift = 0; shift < 32; shift += 8) {
    if (((ts >> shift) & 0xFF) == 0x0F) return false;
  }
  return true;
}

std::uint32_t safe_timestamp(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
  for (int tries = 0; tries < 1000; ++tries) {
    std::uint32_t ts = lo + static_cast<std::uint32_t>(rng() % (hi - lo));
    if (timestamp_safe(ts)) return ts;
  }
  return 0x41D5D380;  // 2005-01-01, known safe
}

void append_text(std::vector<std::uint8_t>& out, const std::string& text) {
  out.insert(out.end(), text.begin(), text.end());
}

std::vector<std::uint8_t> build_benign(std::mt19937_64& rng, int index) {
  PeSpec spec;
  spec.timestamp = safe_timestamp(rng, 0x3B9ACA00, 0x4B3D3B80);  // ~2001..2010
  spec.dll = rng() % 10 == 0;

  spec.sections.push_back({".text", low_entropy_filler(rng, 0x1000), 0x60000020});
  spec.sections.push_back({".data", low_entropy_filler(rng, 0x1000), 0xC0000040});
  if (rng() % 2 == 0) spec.sections.push_back({".rdata", low_entropy_filler(rng, 0x1000), 0x40000040});

  PeImportDllSpec kernel{"KERNEL32.dll", {"ExitProcess", "CreateFileA", "ReadFile"}, {}};
  if (rng() % 2 == 0) kernel.names.push_back("CloseHandle");
  spec.imports.push_back(kernel);
  if (rng() % 3 == 0) spec.imports.push_back({"USER32.dll", {"MessageBoxA"}, {}});
  spec.import_section = 1;

  // directories: import plus one extra -> 2..3
  spec.extra_dirs = {5};
  if (rng() % 2 == 0) spec.extra_dirs.push_back(2);

  std::vector<std::uint8_t> overlay;
  append_text(overlay, "sample-benign-" + std::to_string(index));
  spec.overlay = overlay;
  return build_pe32(spec);
}

std::vector<std::uint8_t> build_malware(std::mt19937_64& rng, int index) {
  PeSpec spec;
  // mostly recent, sometimes an implausible pre-1981 stamp
  spec.timestamp = rng() % 5 == 0 ? 0x09679600  // 1975-01-01
                                  : safe_timestamp(rng, 0x4B3D3B80, 0x4ED20C00);
  spec.dll = rng() % 3 == 0;

  bool packed = rng() % 10 < 6;
  if (packed && rng() % 2 == 0) {
    spec.sections.push_back({"UPX0", low_entropy_filler(rng, 0x1000), 0x60000020});
  } else if (packed) {
    spec.sections.push_back({".text", high_entropy_filler(rng, 0x1000), 0x60000020});
  } else {
    spec.sections.push_back({".text", low_entropy_filler(rng, 0x1000), 0x60000020});
  }
  spec.sections.push_back({".data", low_entropy_filler(rng, 0x1000), 0xC0000040});
  if (rng() % 2 == 0) {
    spec.sections.push_back({"krn" + std::to_string(rng() % 10), low_entropy_filler(rng, 0x1000),
                             0x40000040});
  }

  PeImportDllSpec kernel{"KERNEL32.dll", {"GetProcAddress", "LoadLibraryA"}, {}};
  if (rng() % 10 < 8) kernel.names.push_back("IsDebuggerPresent");
  if (rng() % 2 == 0) kernel.names.push_back("WinExec");
  if (rng() % 2 == 0) kernel.names.push_back("WriteProcessMemory");
  spec.imports.push_back(kernel);
  spec.import_section = 1;

  // directories: import plus 4..6 extras -> 5..7
  std::vector<int> pool = {2, 3, 5, 6, 7, 8};
  int extras = 4 + static_cast<int>(rng() % 3);
  for (int i = 0; i < extras; ++i) spec.extra_dirs.push_back(pool[i]);
  if (rng() % 2 == 0) spec.security_dir = true;

  std::vector<std::uint8_t> overlay;
  append_text(overlay, "sample-malware-" + std::to_string(index));
  int urls = 1 + static_cast<int>(rng() % 3);
  for (int u = 0; u < urls; ++u) {
    append_text(overlay, " http://c2node" + std::to_string(rng() % 1000) + ".test/payload" +
                             std::to_string(u));
  }
  if (rng() % 2 == 0) {
    overlay.push_back(' ');
    for (char ch : std::string(kXorProbeNeedle)) {
      overlay.push_back(static_cast<std::uint8_t>(ch) ^ 0x5A);
    }
  }
  spec.overlay = overlay;
  return build_pe32(spec);
}

}  // namespace

void generate_demo_corpus(const std::string& dir, const GenOptions& options) {
  fs::path root(dir);
  fs::create_directories(root / "benign");
  fs::create_directories(root / "malware");

  std::mt19937_64 rng(options.seed);
  for (int i = 0; i < options.benign; ++i) {
    auto bytes = build_benign(rng, i);
    write_file_bytes((root / "benign" / ("benign_" + std::to_string(i) + ".exe")).string(), bytes);
  }
  for (int i = 0; i < options.malware; ++i) {
    auto bytes = build_malware(rng, i);
    write_file_bytes((root / "malware" / ("malware_" + std::to_string(i) + ".exe")).string(), bytes);
  }

  std::ofstream config(root / "demo.config");
  config << "# demo pipeline over the generated corpus\n";
  config << "class.benign = " << (root / "benign").string() << "\n";
  config << "class.malware = " << (root / "malware").string() << "\n";
  config << "family = pe_header\n";
  config << "selection = none\n";
  config << "models = naive_bayes,bayes_net,c45,knn,svm,ann\n";
  config << "cv.folds = 5\n";
  config << "seed = " << options.seed << "\n";
  config << "out = " << (root / "out").string() << "\n";
}

}  // namespace malstat
