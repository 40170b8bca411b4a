#include <CLI11.hpp>

#include <iostream>

#include "malstat/config.hpp"
#include "malstat/error.hpp"
#include "malstat/gen_corpus.hpp"
#include "malstat/pipeline.hpp"

// Exit codes: 0 success, 1 partial cell failure (or runtime error),
// 2 configuration error.

namespace {

struct CommonFlags {
  std::string config_path;
  long long seed = -1;
  int jobs = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
  auto* opt = cmd->add_option("--config,-c", flags.config_path, "pipeline config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--jobs,-j", flags.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--out,-o", flags.out, "override the output directory");
}

malstat::PipelineConfig resolve(const CommonFlags& flags) {
  malstat::PipelineConfig config = malstat::load_config(flags.config_path);
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.jobs >= 0) config.jobs = flags.jobs;
  if (!flags.out.empty()) config.out_dir = flags.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"static PE32 analysis and classification pipeline"};
  app.require_subcommand(1);

  CommonFlags ingest_flags, extract_flags, select_flags, train_flags, eval_flags, run_flags,
      audit_flags;
  std::string extract_family;

  auto* ingest = app.add_subcommand("ingest", "dedup and filter the class corpora into manifests");
  add_common(ingest, ingest_flags);

  auto* extract = app.add_subcommand("extract", "emit feature CSVs for the configured family");
  add_common(extract, extract_flags);
  extract->add_option("--family", extract_family,
                      "override family: pe_header|byte_randomness|opcode_ngram|api_ngram");

  auto* select = app.add_subcommand("select", "rank features and compute CFS subsets");
  add_common(select, select_flags);

  auto* train = app.add_subcommand("train", "train configured models on the full task data");
  add_common(train, train_flags);

  auto* evalc = app.add_subcommand("eval", "cross-validate every (task, model) cell");
  add_common(evalc, eval_flags);

  auto* run = app.add_subcommand("run", "selection + cross-validation grid + artifacts");
  add_common(run, run_flags);

  auto* audit = app.add_subcommand("audit", "compile-time histogram and tamper report");
  add_common(audit, audit_flags);

  std::string gen_dir = "demo_corpus";
  malstat::GenOptions gen_options;
  auto* gen = app.add_subcommand("gen", "generate the bundled synthetic demo corpus");
  gen->add_option("--dir", gen_dir, "target directory")->capture_default_str();
  gen->add_option("--benign", gen_options.benign, "benign-like file count")->capture_default_str();
  gen->add_option("--malware", gen_options.malware, "malware-like file count")->capture_default_str();
  gen->add_option("--seed", gen_options.seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      malstat::generate_demo_corpus(gen_dir, gen_options);
      std::cout << "generated " << gen_options.benign << "+" << gen_options.malware
                << " fixtures under " << gen_dir << "\n";
      return 0;
    }
    if (ingest->parsed()) {
      malstat::cmd_ingest(resolve(ingest_flags));
    } else if (extract->parsed()) {
      malstat::PipelineConfig config = resolve(extract_flags);
      if (!extract_family.empty()) config.family = extract_family;
      malstat::cmd_extract(config);
    } else if (select->parsed()) {
      malstat::cmd_select(resolve(select_flags));
    } else if (train->parsed()) {
      malstat::cmd_train(resolve(train_flags));
    } else if (evalc->parsed()) {
      malstat::cmd_eval(resolve(eval_flags));
    } else if (run->parsed()) {
      int failed = malstat::cmd_run(resolve(run_flags));
      if (failed > 0) {
        std::cerr << failed << " grid cell(s) failed; see run.log\n";
        return 1;
      }
    } else if (audit->parsed()) {
      malstat::cmd_audit(resolve(audit_flags));
    }
  } catch (const malstat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const malstat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
