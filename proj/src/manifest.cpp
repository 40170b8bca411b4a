#include "malstat/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "malstat/error.hpp"
#include "malstat/parallel.hpp"
#include "malstat/sha256.hpp"
#include "malstat/text_util.hpp"

namespace fs = std::filesystem;

namespace malstat {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  in.seekg(0, std::ios::end);
  std::streamoff len = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(bytes.data()), len);
  if (!in) throw Error("read failed: " + path);
  return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

Manifest dedup_and_filter(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);

  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());

  struct FileResult {
    std::string hash;
    PeFileClass cls = PeFileClass::not_pe32;
    bool io_error = false;
  };
  std::vector<FileResult> results(paths.size());

  par::for_index_dynamic(static_cast<std::int64_t>(paths.size()), [&](std::int64_t i) {
    try {
      std::vector<std::uint8_t> bytes = read_file_bytes(paths[i]);
      results[i].hash = sha256_hex(bytes);
      results[i].cls = classify_pe_bytes(bytes);
    } catch (const Error&) {
      results[i].io_error = true;
    }
  });

  Manifest m;
  std::set<std::string> seen;
  for (size_t i = 0; i < paths.size(); ++i) {
    const FileResult& r = results[i];
    if (r.io_error) {
      m.excluded.push_back({paths[i], "io_error"});
      continue;
    }
    if (!seen.insert(r.hash).second) {
      m.excluded.push_back({paths[i], "duplicate"});
      continue;
    }
    switch (r.cls) {
      case PeFileClass::pe32_exe:
        m.entries.push_back({r.hash, paths[i], PeKind::pe32_exe});
        break;
      case PeFileClass::pe32_dll:
        m.entries.push_back({r.hash, paths[i], PeKind::pe32_dll});
        break;
      case PeFileClass::pe32_plus:
        m.excluded.push_back({paths[i], "pe32_plus"});
        break;
      case PeFileClass::not_pe32:
        m.excluded.push_back({paths[i], "not_pe32"});
        break;
    }
  }
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "hash_sha256,path,verdict\n";
  for (const ManifestEntry& e : m.entries) {
    out << e.hash << ',' << e.path << ',' << to_string(e.kind) << '\n';
  }
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  Manifest m;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty manifest");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 3) throw ParseError(path + ": line " + std::to_string(line_no) + ": expected 3 cells");
    ManifestEntry e;
    e.hash = cells[0];
    e.path = cells[1];
    e.kind = cells[2] == "pe32_dll" ? PeKind::pe32_dll : PeKind::pe32_exe;
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_exclusions(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "path,reason\n";
  for (const ExclusionEntry& e : m.excluded) {
    out << e.path << ',' << e.reason << '\n';
  }
}

}  // namespace malstat
