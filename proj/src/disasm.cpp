#include "malstat/disasm.hpp"

#include <cctype>

#include "malstat/text_util.hpp"

namespace malstat {

namespace {

bool is_hex_string(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool is_hex_byte_pair(std::string_view s) { return s.size() == 2 && is_hex_string(s); }

std::vector<std::string> tokens_of(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

// A plausible mnemonic: letters/digits/dots, starting with a letter.
bool mnemonic_like(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.') return false;
  }
  return true;
}

}  // namespace

MnemonicSequence parse_disassembly(std::string_view text) {
  MnemonicSequence out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<std::string> toks = tokens_of(line);
    if (toks.empty()) continue;

    // Listing layout: "401000:" or "401000 :" then hex byte pairs then the
    // instruction. A label line like "00401000 <main>:" has no byte/mnemonic
    // tail and is skipped below.
    std::string first = toks[0];
    bool addressed = false;
    if (!first.empty() && first.back() == ':' && is_hex_string(std::string_view(first).substr(0, first.size() - 1))) {
      addressed = true;
      toks.erase(toks.begin());
    }

    if (addressed) {
      size_t i = 0;
      while (i < toks.size() && is_hex_byte_pair(toks[i])) ++i;
      if (i < toks.size() && toks[i] == "(bad)") continue;
      if (i < toks.size() && mnemonic_like(toks[i])) {
        out.ops.push_back(lower_ascii(toks[i]));
      }
      continue;
    }

    // Fallback format: exactly one token per line that looks like a mnemonic.
    if (toks.size() == 1) {
      if (toks[0] == "(bad)") continue;
      if (mnemonic_like(toks[0])) out.ops.push_back(lower_ascii(toks[0]));
    }
  }
  out.no_instructions = out.ops.empty();
  return out;
}

}  // namespace malstat
