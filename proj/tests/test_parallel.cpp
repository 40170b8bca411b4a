#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "malstat/bytescan.hpp"
#include "malstat/eval.hpp"
#include "malstat/feature_select.hpp"
#include "malstat/huffman.hpp"
#include "malstat/parallel.hpp"
#include "malstat/pe_parser.hpp"
#include "malstat/randomness.hpp"

// The OpenMP kernels and their serial references must agree bit for bit on
// identical inputs, at any thread count.

using namespace malstat;

namespace {

std::vector<std::uint8_t> random_bytes(std::mt19937& rng, size_t n, int alphabet = 256) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, alphabet - 1)(rng));
  return out;
}

struct ThreadGuard {
  ~ThreadGuard() { par::set_threads(0); }
};

}  // namespace

TEST_CASE("shannon_entropy: parallel equals serial") {
  ThreadGuard guard;
  std::mt19937 rng(1);
  for (int threads : {0, 1, 3}) {
    par::set_threads(threads);
    for (size_t n : {size_t{0}, size_t{100}, size_t{1 << 16}, size_t{200000}}) {
      auto data = random_bytes(rng, n, 64);
      CHECK(shannon_entropy(data) == shannon_entropy_serial(data));
    }
  }
}

TEST_CASE("xor_probe: parallel equals serial") {
  ThreadGuard guard;
  std::mt19937 rng(2);
  const std::string needle(kXorProbeNeedle);
  for (int threads : {0, 2}) {
    par::set_threads(threads);
    for (int iter = 0; iter < 6; ++iter) {
      auto data = random_bytes(rng, 150000);
      if (iter % 2 == 0) {
        size_t pos = std::uniform_int_distribution<size_t>(0, data.size() - needle.size())(rng);
        for (size_t i = 0; i < needle.size(); ++i) {
          data[pos + i] = static_cast<std::uint8_t>(needle[i]) ^ 0x77;
        }
      }
      CHECK(xor_probe(data, needle) == xor_probe_serial(data, needle));
    }
  }
}

TEST_CASE("count_pattern: parallel equals serial, overlaps included") {
  ThreadGuard guard;
  std::mt19937 rng(3);
  std::vector<std::uint8_t> pattern = {0xAB, 0xAB};
  for (int threads : {0, 4}) {
    par::set_threads(threads);
    auto data = random_bytes(rng, 1 << 17, 8);
    for (size_t i = 0; i < data.size(); ++i) {
      if (i % 97 < 5) data[i] = 0xAB;  // planted runs create overlapping matches
    }
    CHECK(count_pattern(data, pattern) == count_pattern_serial(data, pattern));
  }
  // overlapping occurrences: "aaaa" contains 3 matches of "aa"
  std::vector<std::uint8_t> aaaa(4, 'a');
  std::vector<std::uint8_t> aa(2, 'a');
  CHECK(count_pattern_serial(aaaa, aa) == 3);
}

TEST_CASE("window_scores: parallel equals serial") {
  ThreadGuard guard;
  std::mt19937 rng(4);
  for (int threads : {0, 2}) {
    par::set_threads(threads);
    for (int iter = 0; iter < 5; ++iter) {
      auto data = random_bytes(rng, std::uniform_int_distribution<size_t>(1, 70000)(rng), 32);
      HuffmanTable table = huffman_lengths(data);
      CHECK(window_scores(data, table, 32, 32) == window_scores_serial(data, table, 32, 32));
    }
  }
}

TEST_CASE("rank_features: parallel equals serial at several thread counts") {
  ThreadGuard guard;
  std::mt19937 rng(5);
  Dataset ds;
  ds.class_names = {"a", "b"};
  for (int a = 0; a < 8; ++a) {
    AttributeSpec spec;
    spec.name = "f" + std::to_string(a);
    spec.kind = AttributeKind::nominal;
    spec.categories = {"x", "y", "z"};
    ds.schema.push_back(spec);
  }
  for (int i = 0; i < 60; ++i) {
    FeatureVector fv;
    fv.label = i % 2;
    for (int a = 0; a < 8; ++a) fv.values.push_back(std::uniform_int_distribution<int>(0, 2)(rng));
    ds.samples.push_back(fv);
  }
  FeatureRanking serial = rank_features_serial(ds);
  for (int threads : {0, 1, 5}) {
    par::set_threads(threads);
    FeatureRanking parallel = rank_features(ds);
    CHECK(parallel.merits == serial.merits);
    CHECK(parallel.ordering == serial.ordering);
  }
}

TEST_CASE("cross_validate: parallel equals serial") {
  ThreadGuard guard;
  std::mt19937 rng(6);
  Dataset ds;
  ds.schema = {{"x", AttributeKind::numeric, {}}};
  ds.class_names = {"a", "b"};
  for (int i = 0; i < 40; ++i) {
    FeatureVector fv;
    fv.sample_id = "s" + std::to_string(i);
    fv.label = i % 2;
    fv.values = {static_cast<double>(i % 2) * 4 + std::uniform_real_distribution<>(0, 1)(rng)};
    ds.samples.push_back(fv);
  }
  ModelSpec spec;
  spec.method = "c45";
  for (int threads : {0, 3}) {
    par::set_threads(threads);
    EvalReport parallel = cross_validate(ds, spec, 5, 9);
    EvalReport serial = cross_validate_serial(ds, spec, 5, 9);
    CHECK(parallel.fold_accuracy == serial.fold_accuracy);
    CHECK(parallel.confusion == serial.confusion);
    CHECK(parallel.mean_accuracy == serial.mean_accuracy);
  }
}
