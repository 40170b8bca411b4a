// Benchmark comparing the OpenMP kernels against their serial reference
// implementations. Run manually: build/malstat_bench [--mb N] [--threads N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "malstat/bytescan.hpp"
#include "malstat/eval.hpp"
#include "malstat/feature_select.hpp"
#include "malstat/huffman.hpp"
#include "malstat/parallel.hpp"
#include "malstat/pe_parser.hpp"
#include "malstat/randomness.hpp"

using namespace malstat;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename Fn>
double time_ms(Fn&& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, equal ? "results equal" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  size_t megabytes = 64;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--mb") == 0 && i + 1 < argc) {
      megabytes = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      par::set_threads(std::atoi(argv[++i]));
    }
  }

  std::printf("byte kernels on a %zu MiB buffer, %d hardware threads\n", megabytes,
              par::hardware_threads());

  std::mt19937_64 rng(1);
  std::vector<std::uint8_t> data(megabytes << 20);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng() % 64);

  {
    double serial = 0, parallel = 0;
    double a = 0, b = 0;
    serial = time_ms([&] { a = shannon_entropy_serial(data); });
    parallel = time_ms([&] { b = shannon_entropy(data); });
    report("shannon_entropy", serial, parallel, a == b);
  }
  {
    const std::string needle(kXorProbeNeedle);
    bool a = false, b = false;
    double serial = time_ms([&] { a = xor_probe_serial(data, needle); });
    double parallel = time_ms([&] { b = xor_probe(data, needle); });
    report("xor_probe", serial, parallel, a == b);
  }
  {
    std::vector<std::uint8_t> pattern = {0x0F, 0x00};
    std::uint64_t a = 0, b = 0;
    double serial = time_ms([&] { a = count_pattern_serial(data, pattern); });
    double parallel = time_ms([&] { b = count_pattern(data, pattern); });
    report("count_pattern", serial, parallel, a == b);
  }
  {
    HuffmanTable table = huffman_lengths(data);
    std::vector<double> a, b;
    double serial = time_ms([&] { a = window_scores_serial(data, table, 32, 32); });
    double parallel = time_ms([&] { b = window_scores(data, table, 32, 32); });
    report("window_scores", serial, parallel, a == b);
  }

  // Feature ranking on a wide symbolic dataset.
  {
    Dataset ds;
    ds.class_names = {"neg", "pos"};
    const int attrs = 200, samples = 4000;
    for (int a = 0; a < attrs; ++a) {
      AttributeSpec spec;
      spec.name = "f" + std::to_string(a);
      spec.kind = AttributeKind::nominal;
      spec.categories = {"a", "b", "c", "d"};
      ds.schema.push_back(spec);
    }
    std::mt19937 drng(7);
    for (int i = 0; i < samples; ++i) {
      FeatureVector fv;
      fv.sample_id = "s" + std::to_string(i);
      fv.label = i % 2;
      for (int a = 0; a < attrs; ++a) {
        fv.values.push_back(std::uniform_int_distribution<int>(0, 3)(drng));
      }
      ds.samples.push_back(fv);
    }
    FeatureRanking a, b;
    double serial = time_ms([&] { a = rank_features_serial(ds); }, 2);
    double parallel = time_ms([&] { b = rank_features(ds); }, 2);
    report("rank_features", serial, parallel, a.merits == b.merits && a.ordering == b.ordering);
  }

  // Cross-validation folds as parallel jobs.
  {
    Dataset ds;
    ds.class_names = {"neg", "pos"};
    ds.schema = {{"x", AttributeKind::numeric, {}}, {"y", AttributeKind::numeric, {}}};
    std::mt19937 drng(9);
    for (int i = 0; i < 4000; ++i) {
      FeatureVector fv;
      fv.sample_id = "s" + std::to_string(i);
      fv.label = i % 2;
      fv.values = {(i % 2) * 2.0 + std::uniform_real_distribution<>(0, 1)(drng),
                   std::uniform_real_distribution<>(0, 1)(drng)};
      ds.samples.push_back(fv);
    }
    ModelSpec spec;
    spec.method = "knn";
    spec.knn_k = 3;
    EvalReport a, b;
    double serial = time_ms([&] { a = cross_validate_serial(ds, spec, 5, 1); }, 1);
    double parallel = time_ms([&] { b = cross_validate(ds, spec, 5, 1); }, 1);
    report("cross_validate", serial, parallel,
           a.fold_accuracy == b.fold_accuracy && a.confusion == b.confusion);
  }
  return 0;
}
