#include "malstat/pipeline.hpp"

#include <array>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "malstat/csv.hpp"
#include "malstat/disasm.hpp"
#include "malstat/error.hpp"
#include "malstat/eval.hpp"
#include "malstat/feature_select.hpp"
#include "malstat/folds.hpp"
#include "malstat/manifest.hpp"
#include "malstat/ngrams.hpp"
#include "malstat/parallel.hpp"
#include "malstat/pe_audit.hpp"
#include "malstat/pe_parser.hpp"
#include "malstat/randomness.hpp"
#include "malstat/text_util.hpp"

namespace fs = std::filesystem;

namespace malstat {

namespace {

struct RunLog {
  std::ofstream file;

  explicit RunLog(const fs::path& path) : file(path, std::ios::app) {}
  void line(const std::string& msg) {
    if (file) file << msg << '\n';
    std::cerr << msg << '\n';
  }
};

fs::path out_path(const PipelineConfig& c, const std::string& name) {
  return fs::path(c.out_dir) / name;
}

void ensure_out_dir(const PipelineConfig& c) {
  fs::create_directories(c.out_dir);
  fs::create_directories(out_path(c, "models"));
}

SignatureSet signatures_of(const PipelineConfig& c) {
  return c.signatures_path.empty() ? SignatureSet::defaults() : load_signatures(c.signatures_path);
}

std::string family_tag(const PipelineConfig& c) {
  if (c.family == "opcode_ngram" || c.family == "api_ngram") {
    return c.family + std::to_string(c.ngram_n);
  }
  return c.family;
}

Manifest class_manifest(const PipelineConfig& c, const std::string& class_name) {
  fs::path p = out_path(c, "manifest_" + class_name + ".csv");
  if (!fs::exists(p)) {
    throw Error("missing manifest for class " + class_name + " (run `ingest` first): " + p.string());
  }
  return load_manifest(p.string());
}

struct ClassFiles {
  std::string class_name;
  std::vector<std::string> ids;  // content hashes
  std::vector<std::string> paths;
  std::vector<std::vector<std::uint8_t>> bytes;
};

ClassFiles load_class_files(const PipelineConfig& c, const std::string& class_name, RunLog& log) {
  Manifest m = class_manifest(c, class_name);
  ClassFiles out;
  out.class_name = class_name;
  size_t failures = 0;
  for (const ManifestEntry& e : m.entries) {
    try {
      out.bytes.push_back(read_file_bytes(e.path));
      out.ids.push_back(e.hash);
      out.paths.push_back(e.path);
    } catch (const Error& err) {
      ++failures;
      log.line("extract: " + class_name + ": " + e.path + ": " + err.what());
    }
  }
  if (m.entries.empty()) throw Error("class " + class_name + ": empty manifest");
  double rate = static_cast<double>(failures) / static_cast<double>(m.entries.size());
  if (rate > c.max_failure_rate) {
    throw Error("class " + class_name + ": failure rate " + format_double(rate) +
                " exceeds ceiling " + format_double(c.max_failure_rate));
  }
  return out;
}

// Feature rows for one class under some family; any entry may be marked
// failed and excluded from the task CSVs.
struct ClassFeatures {
  std::string class_name;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<Sequence> sequences;  // n-gram families only
};

Dataset dataset_from_pair(const std::vector<AttributeSpec>& schema, const ClassFeatures& a,
                          const ClassFeatures& b) {
  Dataset ds;
  ds.schema = schema;
  ds.class_names = {a.class_name, b.class_name};
  auto add = [&](const ClassFeatures& cf, int label) {
    for (size_t i = 0; i < cf.rows.size(); ++i) {
      FeatureVector fv;
      fv.sample_id = cf.ids[i];
      fv.label = label;
      fv.values = cf.rows[i];
      ds.samples.push_back(std::move(fv));
    }
  };
  add(a, 0);
  add(b, 1);
  ds.validate();
  return ds;
}

std::vector<AttributeSpec> pe_header_schema() {
  std::vector<AttributeSpec> schema;
  static const std::set<std::string> binary_cols = {"ShortInfo_Xor", "ShortInfo_DLL",
                                                    "DigitalSignature", "Packer"};
  for (const char* name : pe_feature_names()) {
    AttributeSpec spec;
    spec.name = name;
    spec.kind = binary_cols.count(name) ? AttributeKind::binary : AttributeKind::numeric;
    schema.push_back(std::move(spec));
  }
  return schema;
}

ClassFeatures extract_pe_header(const ClassFiles& files, const SignatureSet& sigs) {
  ClassFeatures out;
  out.class_name = files.class_name;
  out.ids = files.ids;
  out.rows.resize(files.bytes.size());
  par::for_index_dynamic(static_cast<std::int64_t>(files.bytes.size()), [&](std::int64_t i) {
    PeReport rep = extract_report(files.bytes[i], sigs);
    auto values = pe_feature_values(rep);
    out.rows[i].assign(values.begin(), values.end());
  });
  return out;
}

ClassFeatures extract_byte_randomness(const PipelineConfig& c, const ClassFiles& files) {
  ClassFeatures out;
  out.class_name = files.class_name;
  out.ids = files.ids;
  out.rows.resize(files.bytes.size());
  par::for_index_dynamic(static_cast<std::int64_t>(files.bytes.size()), [&](std::int64_t i) {
    RandomnessProfile p = randomness_profile(files.bytes[i], c.window, c.skip, c.profile_count);
    out.rows[i] = p.scores;
  });
  return out;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  out += "'";
  return out;
}

// Cached disassembly listing per content hash; invokes the configured
// disassembler command on a cache miss.
std::string disassembly_text(const PipelineConfig& c, const std::string& hash,
                             const std::string& path) {
  fs::path cache_dir = out_path(c, "disasm");
  fs::create_directories(cache_dir);
  fs::path cached = cache_dir / (hash + ".asm");
  if (fs::exists(cached)) {
    std::ifstream in(cached);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
  }
  if (c.disassembler.empty()) {
    throw Error("no cached listing and no disassembler configured for " + path);
  }
  std::string command = c.disassembler;
  size_t pos = command.find("{file}");
  if (pos == std::string::npos) throw ConfigError("disassembler command lacks {file} placeholder");
  command.replace(pos, 6, shell_quote(path));
  command += " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw Error("failed to run disassembler for " + path);
  std::string text;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) text.append(buf, got);
  int status = pclose(pipe);
  if (status != 0) throw Error("disassembler failed for " + path);
  std::ofstream outf(cached);
  outf << text;
  return text;
}

// Column names for vocabulary-driven binary features; duplicates (two grams
// concatenating to the same display text) get a #<i> suffix.
std::vector<AttributeSpec> vocab_schema(const NgramVocabulary& vocab) {
  std::vector<AttributeSpec> schema;
  std::set<std::string> seen;
  for (const GramToken& t : vocab.tokens) {
    std::string name = t.text();
    if (!seen.insert(name).second) {
      int suffix = 2;
      while (!seen.insert(name + "#" + std::to_string(suffix)).second) ++suffix;
      name += "#" + std::to_string(suffix);
    }
    schema.push_back({name, AttributeKind::binary, {}});
  }
  return schema;
}

void write_task_csv(const PipelineConfig& c, const std::string& task,
                    const std::vector<AttributeSpec>& schema, const ClassFeatures& a,
                    const ClassFeatures& b) {
  Dataset ds = dataset_from_pair(schema, a, b);
  save_csv(ds, out_path(c, "features_" + family_tag(c) + "_" + task + ".csv").string());
}

struct SequenceExtraction {
  std::vector<ClassFeatures> classes;  // sequences filled, rows empty
};

SequenceExtraction extract_sequences(const PipelineConfig& c, RunLog& log) {
  SequenceExtraction out;
  SignatureSet sigs = signatures_of(c);
  for (const auto& [class_name, dir] : c.classes) {
    ClassFiles files = load_class_files(c, class_name, log);
    ClassFeatures cf;
    cf.class_name = class_name;

    std::vector<Sequence> sequences(files.bytes.size());
    std::vector<std::string> failure(files.bytes.size());
    if (c.family == "api_ngram") {
      par::for_index_dynamic(static_cast<std::int64_t>(files.bytes.size()), [&](std::int64_t i) {
        PeReport rep = extract_report(files.bytes[i], sigs);
        if (rep.api_calls.empty()) {
          failure[i] = "no imports";
          return;
        }
        sequences[i] = rep.api_calls;
      });
    } else {  // opcode_ngram: listings come from the external disassembler
      for (size_t i = 0; i < files.bytes.size(); ++i) {
        try {
          std::string text = disassembly_text(c, files.ids[i], files.paths[i]);
          MnemonicSequence seq = parse_disassembly(text);
          if (seq.no_instructions) {
            failure[i] = "no instructions in listing";
            continue;
          }
          sequences[i] = std::move(seq.ops);
        } catch (const Error& e) {
          failure[i] = e.what();
        }
      }
    }

    size_t failures = 0;
    for (size_t i = 0; i < sequences.size(); ++i) {
      if (!failure[i].empty()) {
        ++failures;
        log.line("extract: " + class_name + ": " + files.ids[i] + ": " + failure[i]);
        continue;
      }
      cf.ids.push_back(files.ids[i]);
      cf.sequences.push_back(std::move(sequences[i]));
    }
    double rate = files.bytes.empty() ? 0.0 : static_cast<double>(failures) / files.bytes.size();
    if (rate > c.max_failure_rate) {
      throw Error("class " + class_name + ": failure rate " + format_double(rate) +
                  " exceeds ceiling " + format_double(c.max_failure_rate));
    }
    out.classes.push_back(std::move(cf));
  }
  return out;
}

void extract_ngram_family(const PipelineConfig& c, RunLog& log) {
  SequenceExtraction extraction = extract_sequences(c, log);
  const std::string source = c.family == "api_ngram" ? "api" : "opcode";

  for (size_t i = 0; i < extraction.classes.size(); ++i) {
    for (size_t j = i + 1; j < extraction.classes.size(); ++j) {
      ClassFeatures& a = extraction.classes[i];
      ClassFeatures& b = extraction.classes[j];
      std::string task = task_name(a.class_name, b.class_name);

      NgramVocabulary vocab;
      try {
        vocab = mine_vocabulary({{a.class_name, a.sequences}, {b.class_name, b.sequences}},
                                c.ngram_n, c.ngram_per_class, source);
      } catch (const Error& e) {
        throw Error("no " + std::to_string(c.ngram_n) + "-grams minable for task " + task + ": " +
                    e.what());
      }
      save_vocabulary(vocab, out_path(c, "vocab_" + family_tag(c) + "_" + task + ".txt").string());

      // Top-token class-frequency comparison, reference class first.
      {
        std::vector<std::pair<std::string, std::vector<double>>> freqs;
        for (const ClassFeatures* cls : {&a, &b}) {
          std::vector<double> fr(vocab.tokens.size());
          for (size_t t = 0; t < vocab.tokens.size(); ++t) {
            fr[t] = class_frequency(vocab.tokens[t], cls->sequences);
          }
          freqs.emplace_back(cls->class_name, std::move(fr));
        }
        FrequencyReport freq = frequency_report(vocab, freqs, 20);
        std::ofstream out(out_path(c, "frequency_" + family_tag(c) + "_" + task + ".csv"));
        out << freq.to_csv();
      }

      auto presence_rows = [&](const ClassFeatures& cf) {
        std::vector<std::vector<double>> rows(cf.sequences.size());
        par::for_index_dynamic(static_cast<std::int64_t>(cf.sequences.size()), [&](std::int64_t s) {
          auto bits = presence_vector(cf.sequences[s], vocab, c.ngram_top_k);
          rows[s].assign(bits.begin(), bits.end());
        });
        return rows;
      };
      ClassFeatures fa;
      fa.class_name = a.class_name;
      fa.ids = a.ids;
      fa.rows = presence_rows(a);
      ClassFeatures fb;
      fb.class_name = b.class_name;
      fb.ids = b.ids;
      fb.rows = presence_rows(b);
      write_task_csv(c, task, vocab_schema(vocab), fa, fb);
    }
  }
}

Dataset load_task_features(const PipelineConfig& c, const std::string& task) {
  fs::path p = out_path(c, "features_" + family_tag(c) + "_" + task + ".csv");
  if (!fs::exists(p)) {
    throw Error("missing feature CSV for task " + task + " (run `extract` first): " + p.string());
  }
  return load_csv(p.string());
}

std::vector<std::string> all_tasks(const PipelineConfig& c) {
  std::vector<std::string> tasks;
  for (size_t i = 0; i < c.classes.size(); ++i) {
    for (size_t j = i + 1; j < c.classes.size(); ++j) {
      tasks.push_back(task_name(c.classes[i].first, c.classes[j].first));
    }
  }
  return tasks;
}

void write_ranking(const PipelineConfig& c, const std::string& task, const Dataset& ds,
                   const FeatureRanking& ranking) {
  std::ofstream out(out_path(c, "ranking_" + family_tag(c) + "_" + task + ".csv"));
  out << "merit,attribute\n";
  for (int attr : ranking.ordering) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", ranking.merits[attr]);
    out << buf << ',' << ds.schema[attr].name << '\n';
  }
}

// Applies the configured selection, writing ranking/subset artifacts, and
// returns the surviving attribute indices (schema order).
std::vector<int> apply_selection(const PipelineConfig& c, const std::string& task, const Dataset& ds) {
  std::vector<int> keep;
  if (c.selection == "none") {
    for (size_t a = 0; a < ds.n_attrs(); ++a) keep.push_back(static_cast<int>(a));
    return keep;
  }
  if (c.selection == "infogain") {
    FeatureRanking ranking = rank_features(ds);
    write_ranking(c, task, ds, ranking);
    FeatureSubset subset = select_by_threshold(ranking, c.selection_threshold);
    keep = subset.attributes;
    std::sort(keep.begin(), keep.end());
    return keep;
  }
  // cfs
  FeatureRanking ranking = rank_features(ds);
  write_ranking(c, task, ds, ranking);
  FeatureSubset subset = cfs_select(ds);
  std::ofstream out(out_path(c, "subset_" + family_tag(c) + "_" + task + ".txt"));
  for (int attr : subset.attributes) out << ds.schema[attr].name << '\n';
  keep = subset.attributes;
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace

std::string task_name(const std::string& class_a, const std::string& class_b) {
  return class_a + "_vs_" + class_b;
}

void cmd_ingest(const PipelineConfig& config) {
  config.validate();
  ensure_out_dir(config);
  for (const auto& [class_name, dir] : config.classes) {
    Manifest m = dedup_and_filter(dir);
    if (m.entries.empty()) throw Error("class " + class_name + ": 0 PE32 files");
    save_manifest(m, out_path(config, "manifest_" + class_name + ".csv").string());
    save_exclusions(m, out_path(config, "excluded_" + class_name + ".csv").string());
    std::uint64_t bytes = 0;
    for (const ManifestEntry& e : m.entries) {
      std::error_code ec;
      bytes += fs::file_size(e.path, ec);
    }
    std::cout << class_name << ": " << m.entries.size() << " files, " << bytes << " bytes ("
              << m.excluded.size() << " excluded)\n";
  }
}

void cmd_extract(const PipelineConfig& config) {
  config.validate();
  ensure_out_dir(config);
  par::set_threads(config.jobs);
  RunLog log(out_path(config, "run.log"));

  if (config.family == "opcode_ngram" || config.family == "api_ngram") {
    extract_ngram_family(config, log);
    return;
  }

  SignatureSet sigs = signatures_of(config);
  std::vector<ClassFeatures> features;
  for (const auto& [class_name, dir] : config.classes) {
    ClassFiles files = load_class_files(config, class_name, log);
    if (config.family == "pe_header") {
      features.push_back(extract_pe_header(files, sigs));
    } else {
      features.push_back(extract_byte_randomness(config, files));
    }
  }

  std::vector<AttributeSpec> schema;
  if (config.family == "pe_header") {
    schema = pe_header_schema();
  } else {
    for (int i = 0; i < config.profile_count; ++i) {
      char name[16];
      std::snprintf(name, sizeof(name), "rand_%02d", i);
      schema.push_back({name, AttributeKind::numeric, {}});
    }
  }
  for (size_t i = 0; i < features.size(); ++i) {
    for (size_t j = i + 1; j < features.size(); ++j) {
      write_task_csv(config, task_name(features[i].class_name, features[j].class_name), schema,
                     features[i], features[j]);
    }
  }
}

void cmd_select(const PipelineConfig& config) {
  config.validate();
  ensure_out_dir(config);
  par::set_threads(config.jobs);
  for (const std::string& task : all_tasks(config)) {
    Dataset ds = load_task_features(config, task);
    FeatureRanking ranking = rank_features(ds);
    write_ranking(config, task, ds, ranking);
    if (config.selection == "cfs") {
      FeatureSubset subset = cfs_select(ds);
      std::ofstream out(out_path(config, "subset_" + family_tag(config) + "_" + task + ".txt"));
      for (int attr : subset.attributes) out << ds.schema[attr].name << '\n';
    }
  }
}

void cmd_train(const PipelineConfig& config) {
  config.validate();
  if (config.model_names.empty()) throw ConfigError("config: no models configured");
  ensure_out_dir(config);
  par::set_threads(config.jobs);
  for (const std::string& task : all_tasks(config)) {
    Dataset full = load_task_features(config, task);
    Dataset ds = full.project(apply_selection(config, task, full));
    for (const std::string& method : config.model_names) {
      TrainedModel model = train_model(ds, config.spec_for(method));
      model.save_file(
          out_path(config, "models/" + family_tag(config) + "_" + task + "_" + method + ".model")
              .string());
    }
  }
}

void cmd_eval(const PipelineConfig& config) {
  config.validate();
  if (config.model_names.empty()) throw ConfigError("config: no models configured");
  ensure_out_dir(config);
  par::set_threads(config.jobs);
  for (const std::string& task : all_tasks(config)) {
    Dataset full = load_task_features(config, task);
    Dataset ds = full.project(apply_selection(config, task, full));
    for (const std::string& method : config.model_names) {
      EvalReport report = cross_validate(ds, config.spec_for(method), config.cv_folds, config.seed);
      report.task = task;
      std::string base = "eval_" + family_tag(config) + "_" + task + "_" + method;
      std::ofstream csv(out_path(config, base + ".csv"));
      csv << report.to_csv();
      std::ofstream text(out_path(config, base + ".txt"));
      text << report.to_text();
    }
  }
}

int cmd_run(const PipelineConfig& config) {
  config.validate();
  if (config.model_names.empty()) throw ConfigError("config: no models configured");
  ensure_out_dir(config);
  par::set_threads(config.jobs);
  RunLog log(out_path(config, "run.log"));

  std::vector<std::string> tasks = all_tasks(config);
  std::vector<std::vector<std::optional<EvalReport>>> cells(
      tasks.size(), std::vector<std::optional<EvalReport>>(config.model_names.size()));
  int failed_cells = 0;

  for (size_t t = 0; t < tasks.size(); ++t) {
    Dataset full = load_task_features(config, tasks[t]);
    Dataset ds = full.project(apply_selection(config, tasks[t], full));
    double best_accuracy = -1.0;
    std::string best_method;

    for (size_t m = 0; m < config.model_names.size(); ++m) {
      const std::string& method = config.model_names[m];
      try {
        EvalReport report = cross_validate(ds, config.spec_for(method), config.cv_folds, config.seed);
        report.task = tasks[t];
        std::string base = "eval_" + family_tag(config) + "_" + tasks[t] + "_" + method;
        std::ofstream csv(out_path(config, base + ".csv"));
        csv << report.to_csv();
        std::ofstream text(out_path(config, base + ".txt"));
        text << report.to_text();
        if (report.mean_accuracy > best_accuracy) {
          best_accuracy = report.mean_accuracy;
          best_method = method;
        }
        cells[t][m] = std::move(report);
      } catch (const Error& e) {
        ++failed_cells;
        log.line("run: task " + tasks[t] + " method " + method + ": " + e.what());
      }
    }

    if (!best_method.empty()) {
      TrainedModel model = train_model(ds, config.spec_for(best_method));
      model.save_file(out_path(config, "models/" + family_tag(config) + "_" + tasks[t] + "_" +
                                           best_method + ".model")
                          .string());
    }
  }

  GridReport grid = grid_report(tasks, config.model_names, cells);
  {
    std::ofstream csv(out_path(config, "grid_" + family_tag(config) + ".csv"));
    csv << grid.to_csv();
    std::ofstream md(out_path(config, "grid_" + family_tag(config) + ".md"));
    md << grid.to_markdown();
  }
  std::cout << grid.to_markdown();
  return failed_cells;
}

void cmd_audit(const PipelineConfig& config) {
  config.validate();
  ensure_out_dir(config);
  par::set_threads(config.jobs);
  RunLog log(out_path(config, "run.log"));
  SignatureSet sigs = signatures_of(config);

  std::int64_t cutoff = config.audit_cutoff;
  if (cutoff == 0) cutoff = static_cast<std::int64_t>(std::time(nullptr));

  for (const auto& [class_name, dir] : config.classes) {
    ClassFiles files = load_class_files(config, class_name, log);
    std::vector<PeReport> reports(files.bytes.size());
    par::for_index_dynamic(static_cast<std::int64_t>(files.bytes.size()), [&](std::int64_t i) {
      reports[i] = extract_report(files.bytes[i], sigs);
    });
    AuditResult audit = compile_time_audit(reports, cutoff);
    {
      std::ofstream out(out_path(config, "audit_" + class_name + ".csv"));
      out << "year,count\n";
      for (const auto& [year, count] : audit.histogram) out << year << ',' << count << '\n';
    }
    {
      std::ofstream out(out_path(config, "audit_tamper_" + class_name + ".csv"));
      out << "sample_id,timestamp,tampered\n";
      for (size_t i = 0; i < reports.size(); ++i) {
        out << files.ids[i] << ',' << reports[i].compile_timestamp << ','
            << (audit.tampered[i] ? 1 : 0) << '\n';
      }
    }
    std::uint64_t tampered = 0;
    for (bool t : audit.tampered) tampered += t;
    std::cout << class_name << ": " << reports.size() << " files, " << tampered
              << " tampered timestamps\n";
  }
}

}  // namespace malstat
