#include "malstat/bytescan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "malstat/parallel.hpp"

namespace malstat {

namespace {

double entropy_from_counts(const std::array<std::uint64_t, 256>& counts, std::uint64_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

bool printable_nonspace(std::uint8_t c) { return c > 0x20 && c < 0x7F; }

}  // namespace

double shannon_entropy_serial(std::span<const std::uint8_t> data) {
  std::array<std::uint64_t, 256> counts{};
  for (std::uint8_t b : data) counts[b]++;
  return entropy_from_counts(counts, data.size());
}

double shannon_entropy(std::span<const std::uint8_t> data) {
  const std::int64_t n = static_cast<std::int64_t>(data.size());
  if (n < (1 << 16)) return shannon_entropy_serial(data);
  const std::int64_t chunks = 64;
  std::vector<std::array<std::uint64_t, 256>> local(chunks);
  par::for_index(chunks, [&](std::int64_t c) {
    std::int64_t begin = n * c / chunks;
    std::int64_t end = n * (c + 1) / chunks;
    auto& counts = local[c];
    counts.fill(0);
    for (std::int64_t i = begin; i < end; ++i) counts[data[i]]++;
  });
  std::array<std::uint64_t, 256> counts{};
  for (const auto& lc : local) {
    for (int i = 0; i < 256; ++i) counts[i] += lc[i];
  }
  return entropy_from_counts(counts, data.size());
}

namespace {

// Occurrence check at one position: the key is forced by the first byte.
inline bool xor_match_at(std::span<const std::uint8_t> data, std::string_view needle, size_t pos) {
  std::uint8_t key = data[pos] ^ static_cast<std::uint8_t>(needle[0]);
  if (key == 0) return false;
  for (size_t j = 1; j < needle.size(); ++j) {
    if ((data[pos + j] ^ key) != static_cast<std::uint8_t>(needle[j])) return false;
  }
  return true;
}

}  // namespace

bool xor_probe_serial(std::span<const std::uint8_t> data, std::string_view needle) {
  if (needle.empty() || data.size() < needle.size()) return false;
  const size_t last = data.size() - needle.size();
  for (size_t i = 0; i <= last; ++i) {
    if (xor_match_at(data, needle, i)) return true;
  }
  return false;
}

bool xor_probe(std::span<const std::uint8_t> data, std::string_view needle) {
  if (needle.empty() || data.size() < needle.size()) return false;
  const std::int64_t last = static_cast<std::int64_t>(data.size() - needle.size());
  if (last < (1 << 16)) return xor_probe_serial(data, needle);
  const std::int64_t chunks = 64;
  std::vector<char> hit(chunks, 0);
  par::for_index(chunks, [&](std::int64_t c) {
    std::int64_t begin = (last + 1) * c / chunks;
    std::int64_t end = (last + 1) * (c + 1) / chunks;
    for (std::int64_t i = begin; i < end; ++i) {
      if (xor_match_at(data, needle, static_cast<size_t>(i))) {
        hit[c] = 1;
        return;
      }
    }
  });
  return std::find(hit.begin(), hit.end(), 1) != hit.end();
}

std::uint64_t count_pattern_serial(std::span<const std::uint8_t> data, std::span<const std::uint8_t> pattern) {
  if (pattern.empty() || data.size() < pattern.size()) return 0;
  std::uint64_t count = 0;
  const size_t last = data.size() - pattern.size();
  for (size_t i = 0; i <= last; ++i) {
    if (std::equal(pattern.begin(), pattern.end(), data.begin() + i)) ++count;
  }
  return count;
}

std::uint64_t count_pattern(std::span<const std::uint8_t> data, std::span<const std::uint8_t> pattern) {
  if (pattern.empty() || data.size() < pattern.size()) return 0;
  const std::int64_t last = static_cast<std::int64_t>(data.size() - pattern.size());
  if (last < (1 << 16)) return count_pattern_serial(data, pattern);
  const std::int64_t chunks = 64;
  std::vector<std::uint64_t> local(chunks, 0);
  par::for_index(chunks, [&](std::int64_t c) {
    std::int64_t begin = (last + 1) * c / chunks;
    std::int64_t end = (last + 1) * (c + 1) / chunks;
    std::uint64_t count = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      if (std::equal(pattern.begin(), pattern.end(), data.begin() + i)) ++count;
    }
    local[c] = count;
  });
  std::uint64_t total = 0;
  for (std::uint64_t c : local) total += c;
  return total;
}

std::vector<std::string> find_urls(std::span<const std::uint8_t> data) {
  static const std::string_view schemes[] = {"https://", "http://", "ftp://"};
  std::set<std::string> seen;
  size_t i = 0;
  while (i < data.size()) {
    std::string_view matched;
    for (std::string_view scheme : schemes) {
      if (i + scheme.size() > data.size()) continue;
      if (std::equal(scheme.begin(), scheme.end(), data.begin() + i,
                     [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
        matched = scheme;
        break;
      }
    }
    if (matched.empty()) {
      ++i;
      continue;
    }
    size_t body = i + matched.size();
    size_t end = body;
    while (end < data.size() && printable_nonspace(data[end])) ++end;
    if (end - body >= 4) {
      seen.emplace(reinterpret_cast<const char*>(data.data() + i), end - i);
      i = end;
    } else {
      i += matched.size();
    }
  }
  return std::vector<std::string>(seen.begin(), seen.end());
}

}  // namespace malstat
