#pragma once

#include <cstdint>
#include <string>

namespace malstat {

/// Synthetic demo corpus: small hand-built PE32 fixtures with separable
/// header traits per class. `dir` receives benign/ and malware/ file trees
/// plus a ready-to-run demo.config. Deterministic for a fixed seed.
struct GenOptions {
  int benign = 200;
  int malware = 200;
  std::uint64_t seed = 7;
};

void generate_demo_corpus(const std::string& dir, const GenOptions& options = {});

}  // namespace malstat
