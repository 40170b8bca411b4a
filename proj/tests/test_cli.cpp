#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "malstat/config.hpp"
#include "malstat/csv.hpp"
#include "malstat/error.hpp"
#include "malstat/gen_corpus.hpp"
#include "malstat/manifest.hpp"
#include "malstat/pe_builder.hpp"
#include "malstat/pipeline.hpp"

using namespace malstat;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

PipelineConfig demo_config(const fs::path& root) {
  PipelineConfig c = load_config((root / "demo.config").string());
  c.model_names = {"c45", "knn"};
  return c;
}

}  // namespace

TEST_CASE("config parsing, overrides, and validation") {
  fs::path dir = fresh_dir("malstat_cfg");
  {
    std::ofstream f(dir / "p.config");
    f << "# comment\n";
    f << "class.benign = /tmp/a\n";
    f << "class.malware = /tmp/b\n";
    f << "family = opcode_ngram\n";
    f << "ngram.n = 4\n";
    f << "selection = infogain\n";
    f << "selection.threshold = 0.1\n";
    f << "models = c45, knn\n";
    f << "cv.folds = 5\n";
    f << "seed = 99\n";
    f << "knn.k = 3\n";
  }
  PipelineConfig c = load_config((dir / "p.config").string());
  CHECK(c.classes.size() == 2);
  CHECK(c.classes[0].first == "benign");
  CHECK(c.family == "opcode_ngram");
  CHECK(c.ngram_n == 4);
  CHECK(c.model_names == std::vector<std::string>{"c45", "knn"});
  CHECK(c.seed == 99);
  CHECK(c.spec_for("knn").knn_k == 3);
  CHECK(c.spec_for("knn").seed == 99);
  c.validate();

  apply_config_pair(c, "seed", "7", "cli");
  CHECK(c.seed == 7);
  CHECK_THROWS_AS(apply_config_pair(c, "nonsense.key", "1", "cli"), ConfigError);

  c.family = "api_ngram";  // n=4 invalid for api grams
  CHECK_THROWS_AS(c.validate(), ConfigError);

  PipelineConfig one_class;
  one_class.classes = {{"only", "/tmp/x"}};
  CHECK_THROWS_AS(one_class.validate(), ConfigError);
}

TEST_CASE("pipeline end to end on a small synthetic corpus") {
  fs::path root = fresh_dir("malstat_cli_e2e");
  GenOptions gen;
  gen.benign = 16;
  gen.malware = 16;
  gen.seed = 11;
  generate_demo_corpus(root.string(), gen);
  REQUIRE(fs::exists(root / "demo.config"));

  PipelineConfig config = demo_config(root);
  cmd_ingest(config);
  CHECK(fs::exists(root / "out" / "manifest_benign.csv"));
  Manifest m = load_manifest((root / "out" / "manifest_benign.csv").string());
  CHECK(m.entries.size() == 16);

  // Idempotence: re-running ingest leaves the manifest byte-identical.
  std::string manifest_before = slurp(root / "out" / "manifest_benign.csv");
  cmd_ingest(config);
  CHECK(slurp(root / "out" / "manifest_benign.csv") == manifest_before);

  cmd_extract(config);
  fs::path features = root / "out" / "features_pe_header_benign_vs_malware.csv";
  REQUIRE(fs::exists(features));
  Dataset ds = load_csv(features.string());
  CHECK(ds.size() == 32);
  CHECK(ds.n_attrs() == 13);  // the thirteen header features
  CHECK(ds.n_classes() == 2);

  int failed = cmd_run(config);
  CHECK(failed == 0);
  fs::path grid_path = root / "out" / "grid_pe_header.csv";
  REQUIRE(fs::exists(grid_path));
  std::string grid1 = slurp(grid_path);
  CHECK(grid1.find("benign_vs_malware") != std::string::npos);
  CHECK(grid1.find("c45") != std::string::npos);

  // Determinism: a second identical run produces a byte-identical grid.
  int failed2 = cmd_run(config);
  CHECK(failed2 == 0);
  CHECK(slurp(grid_path) == grid1);

  // Artifacts stay inside the configured output directory.
  CHECK(fs::exists(root / "out" / "models"));
  fs::remove_all(root);
}

TEST_CASE("extract honors the byte_randomness family") {
  fs::path root = fresh_dir("malstat_cli_rand");
  GenOptions gen;
  gen.benign = 6;
  gen.malware = 6;
  gen.seed = 3;
  generate_demo_corpus(root.string(), gen);
  PipelineConfig config = demo_config(root);
  cmd_ingest(config);
  config.family = "byte_randomness";
  cmd_extract(config);
  Dataset ds = load_csv((root / "out" / "features_byte_randomness_benign_vs_malware.csv").string());
  CHECK(ds.n_attrs() == 30);
  fs::remove_all(root);
}

TEST_CASE("api_ngram extraction persists the vocabulary") {
  fs::path root = fresh_dir("malstat_cli_api");
  GenOptions gen;
  gen.benign = 6;
  gen.malware = 6;
  gen.seed = 3;
  generate_demo_corpus(root.string(), gen);
  PipelineConfig config = demo_config(root);
  cmd_ingest(config);
  config.family = "api_ngram";
  config.ngram_n = 1;
  cmd_extract(config);
  CHECK(fs::exists(root / "out" / "vocab_api_ngram1_benign_vs_malware.txt"));
  Dataset ds = load_csv((root / "out" / "features_api_ngram1_benign_vs_malware.csv").string());
  CHECK(ds.n_attrs() >= 2);
  for (const auto& a : ds.schema) CHECK(a.kind == AttributeKind::binary);
  fs::remove_all(root);
}

TEST_CASE("ingest fails on a class with no PE32 files") {
  fs::path root = fresh_dir("malstat_cli_gen_empty");
  fs::create_directories(root / "empty_class");
  fs::create_directories(root / "other");
  {
    std::ofstream f(root / "empty_class" / "readme.txt");
    f << "not a binary";
    std::ofstream g(root / "other" / "also.txt");
    g << "still not";
  }
  PipelineConfig config;
  config.classes = {{"a", (root / "empty_class").string()}, {"b", (root / "other").string()}};
  config.out_dir = (root / "out").string();
  try {
    cmd_ingest(config);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("0 PE32 files") != std::string::npos);
  }
  fs::remove_all(root);
}

TEST_CASE("api_ngram with n=2 on import-poor files reports no grams minable") {
  fs::path root = fresh_dir("malstat_cli_nograms");
  // Corpus whose files carry at most one import each.
  fs::create_directories(root / "a");
  fs::create_directories(root / "b");
  {
    PeSpec spec;
    spec.sections.push_back({".text", std::vector<std::uint8_t>(0x1000, 0x41), 0x60000020});
    spec.imports.push_back({"KERNEL32.dll", {"ExitProcess"}, {}});
    spec.import_section = 0;
    write_file_bytes((root / "a" / "one.exe").string(), build_pe32(spec));
    spec.overlay = {'x'};
    write_file_bytes((root / "b" / "two.exe").string(), build_pe32(spec));
  }
  PipelineConfig config;
  config.classes = {{"a", (root / "a").string()}, {"b", (root / "b").string()}};
  config.out_dir = (root / "out").string();
  config.family = "api_ngram";
  config.ngram_n = 2;
  cmd_ingest(config);
  try {
    cmd_extract(config);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no 2-grams minable") != std::string::npos);
  }
  fs::remove_all(root);
}

TEST_CASE("opcode extraction consumes cached fallback listings") {
  fs::path root = fresh_dir("malstat_cli_opcode");
  GenOptions gen;
  gen.benign = 4;
  gen.malware = 4;
  gen.seed = 9;
  generate_demo_corpus(root.string(), gen);
  PipelineConfig config = demo_config(root);
  cmd_ingest(config);

  // Seed the cache with one-mnemonic-per-line listings; no disassembler needed.
  fs::create_directories(root / "out" / "disasm");
  for (const std::string cls : {"benign", "malware"}) {
    Manifest m = load_manifest((root / "out" / ("manifest_" + cls + ".csv")).string());
    int i = 0;
    for (const auto& e : m.entries) {
      std::ofstream f(root / "out" / "disasm" / (e.hash + ".asm"));
      if (cls == "benign") {
        f << "push\nmov\nadd\nret\n";
      } else {
        f << "int3\nint3\nmov\npush\n";
      }
      if (i++ % 2) f << "nop\n";
    }
  }
  config.family = "opcode_ngram";
  config.ngram_n = 3;
  cmd_extract(config);
  Dataset ds = load_csv((root / "out" / "features_opcode_ngram3_benign_vs_malware.csv").string());
  CHECK(ds.size() == 8);
  bool has_int3 = false;
  for (const auto& a : ds.schema) has_int3 |= a.name == "int3int3mov";
  CHECK(has_int3);
  fs::remove_all(root);
}

TEST_CASE("infogain selection writes the ranking and filters attributes") {
  fs::path root = fresh_dir("malstat_cli_sel");
  GenOptions gen;
  gen.benign = 12;
  gen.malware = 12;
  gen.seed = 21;
  generate_demo_corpus(root.string(), gen);
  PipelineConfig config = demo_config(root);
  cmd_ingest(config);
  cmd_extract(config);
  config.selection = "infogain";
  config.selection_threshold = 0.1;
  int failed = cmd_run(config);
  CHECK(failed == 0);
  fs::path ranking = root / "out" / "ranking_pe_header_benign_vs_malware.csv";
  REQUIRE(fs::exists(ranking));
  std::string text = slurp(ranking);
  CHECK(text.find("merit,attribute") == 0);
  CHECK(text.find("ShortInfo_Directories") != std::string::npos);
  fs::remove_all(root);
}
