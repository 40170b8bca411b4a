#include "malstat/signatures.hpp"

#include <fstream>
#include <sstream>

#include "malstat/error.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

SignatureSet SignatureSet::defaults() {
  SignatureSet s;
  s.anti_debug_apis = {
      "IsDebuggerPresent", "CheckRemoteDebuggerPresent", "OutputDebugStringA",
      "OutputDebugStringW", "NtQueryInformationProcess", "FindWindowA", "FindWindowW"};
  s.anti_vm_byte_patterns = {
      {0x56, 0x4D, 0x58, 0x68},  // "VMXh" VMware backdoor port tag
      {0x0F, 0x01, 0x0C},        // sidt
      {0x0F, 0x00},              // sldt
      {0x0F, 0x00, 0xC8},        // str
  };
  s.suspicious_apis = {
      "CreateRemoteThread", "WriteProcessMemory", "ReadProcessMemory", "VirtualAllocEx",
      "SetWindowsHookExA", "SetWindowsHookExW", "GetAsyncKeyState", "URLDownloadToFileA",
      "URLDownloadToFileW", "ShellExecuteA", "ShellExecuteW", "WinExec",
      "LoadLibraryA", "LoadLibraryW", "GetProcAddress", "OpenProcess",
      "AdjustTokenPrivileges", "CryptEncrypt", "InternetOpenA", "InternetOpenUrlA",
      "RegSetValueExA", "RegSetValueExW", "TerminateProcess", "CreateToolhelp32Snapshot"};
  s.packer_section_names = {"UPX0", "UPX1", ".aspack", ".petite", ".themida", "MEW"};
  s.entropy_threshold = 7.2;
  return s;
}

namespace {

std::vector<std::uint8_t> parse_hex_pattern(const std::string& text, int line_no) {
  std::vector<std::uint8_t> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok.size() != 2) throw ParseError("signature line " + std::to_string(line_no) + ": bad hex byte " + tok);
    unsigned v = 0;
    for (char c : tok) {
      v <<= 4;
      if (c >= '0' && c <= '9') v |= c - '0';
      else if (c >= 'a' && c <= 'f') v |= c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v |= c - 'A' + 10;
      else throw ParseError("signature line " + std::to_string(line_no) + ": bad hex byte " + tok);
    }
    out.push_back(static_cast<std::uint8_t>(v));
  }
  if (out.empty()) throw ParseError("signature line " + std::to_string(line_no) + ": empty pattern");
  return out;
}

}  // namespace

SignatureSet load_signatures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open signature file " + path);
  SignatureSet s;
  s.anti_vm_byte_patterns.clear();
  std::string line;
  int line_no = 0;
  bool threshold_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("signature line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "anti_debug") s.anti_debug_apis.push_back(value);
    else if (key == "suspicious_api") s.suspicious_apis.push_back(value);
    else if (key == "packer_section") s.packer_section_names.push_back(value);
    else if (key == "anti_vm") s.anti_vm_byte_patterns.push_back(parse_hex_pattern(value, line_no));
    else if (key == "entropy_threshold") {
      if (!parse_double(value, s.entropy_threshold)) {
        throw ParseError("signature line " + std::to_string(line_no) + ": bad entropy_threshold");
      }
      threshold_seen = true;
    } else {
      throw ParseError("signature line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }
  if (!threshold_seen) s.entropy_threshold = SignatureSet::defaults().entropy_threshold;
  return s;
}

void save_signatures(const SignatureSet& sigs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "# PE heuristic signature set\n";
  out << "entropy_threshold = " << format_double(sigs.entropy_threshold) << "\n";
  for (const auto& n : sigs.anti_debug_apis) out << "anti_debug = " << n << "\n";
  for (const auto& n : sigs.suspicious_apis) out << "suspicious_api = " << n << "\n";
  for (const auto& n : sigs.packer_section_names) out << "packer_section = " << n << "\n";
  static const char* hex = "0123456789abcdef";
  for (const auto& pat : sigs.anti_vm_byte_patterns) {
    out << "anti_vm =";
    for (std::uint8_t b : pat) {
      out << ' ' << hex[b >> 4] << hex[b & 0xF];
    }
    out << "\n";
  }
}

}  // namespace malstat
