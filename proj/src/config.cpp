#include "malstat/config.hpp"

#include <ctime>
#include <fstream>

#include "malstat/error.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

namespace {

const char* kMethods[] = {"naive_bayes", "bayes_net", "c45", "knn", "svm", "ann"};

bool known_method(const std::string& m) {
  for (const char* k : kMethods) {
    if (m == k) return true;
  }
  return false;
}

double need_double(const std::string& key, const std::string& value, const std::string& origin) {
  double v;
  if (!parse_double(value, v)) throw ConfigError(origin + ": bad number for " + key + ": " + value);
  return v;
}

long long need_int(const std::string& key, const std::string& value, const std::string& origin) {
  long long v;
  if (!parse_int(value, v)) throw ConfigError(origin + ": bad integer for " + key + ": " + value);
  return v;
}

// audit.cutoff accepts epoch seconds or YYYY-MM-DD (midnight UTC).
std::int64_t parse_cutoff(const std::string& value, const std::string& origin) {
  long long epoch;
  if (parse_int(value, epoch)) return epoch;
  int y, m, d;
  if (std::sscanf(value.c_str(), "%d-%d-%d", &y, &m, &d) == 3) {
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = m - 1;
    tm.tm_mday = d;
    std::time_t t = timegm(&tm);
    if (t != static_cast<std::time_t>(-1)) return t;
  }
  throw ConfigError(origin + ": bad audit.cutoff: " + value);
}

}  // namespace

void apply_config_pair(PipelineConfig& c, const std::string& key, const std::string& value,
                       const std::string& origin) {
  if (key.rfind("class.", 0) == 0) {
    std::string name = key.substr(6);
    if (name.empty()) throw ConfigError(origin + ": empty class name");
    for (auto& [existing, dir] : c.classes) {
      if (existing == name) {
        dir = value;
        return;
      }
    }
    c.classes.emplace_back(name, value);
  } else if (key == "family") {
    c.family = value;
  } else if (key == "ngram.n") {
    c.ngram_n = static_cast<int>(need_int(key, value, origin));
  } else if (key == "ngram.per_class") {
    c.ngram_per_class = static_cast<int>(need_int(key, value, origin));
  } else if (key == "ngram.top_k") {
    c.ngram_top_k = static_cast<int>(need_int(key, value, origin));
  } else if (key == "window") {
    c.window = static_cast<int>(need_int(key, value, origin));
  } else if (key == "skip") {
    c.skip = static_cast<int>(need_int(key, value, origin));
  } else if (key == "profile.count") {
    c.profile_count = static_cast<int>(need_int(key, value, origin));
  } else if (key == "selection") {
    c.selection = value;
  } else if (key == "selection.threshold") {
    c.selection_threshold = need_double(key, value, origin);
  } else if (key == "models") {
    c.model_names.clear();
    for (std::string m : split(value, ',')) {
      m = trim(m);
      if (m.empty()) continue;
      c.model_names.push_back(m);
    }
  } else if (key == "nb.laplace") {
    c.model_defaults.nb_laplace = need_double(key, value, origin);
  } else if (key == "nb.bins") {
    c.model_defaults.nb_bins = static_cast<int>(need_int(key, value, origin));
  } else if (key == "bn.structure") {
    c.model_defaults.bn_structure = value;
  } else if (key == "c45.min_leaf") {
    c.model_defaults.c45_min_leaf = static_cast<int>(need_int(key, value, origin));
  } else if (key == "c45.prune_cf") {
    c.model_defaults.c45_prune_cf = need_double(key, value, origin);
  } else if (key == "knn.k") {
    c.model_defaults.knn_k = static_cast<int>(need_int(key, value, origin));
  } else if (key == "knn.weighting") {
    c.model_defaults.knn_weighting = value;
  } else if (key == "svm.c") {
    c.model_defaults.svm_c = need_double(key, value, origin);
  } else if (key == "svm.kernel") {
    c.model_defaults.svm_kernel = value;
  } else if (key == "svm.gamma") {
    c.model_defaults.svm_gamma = need_double(key, value, origin);
  } else if (key == "svm.tol") {
    c.model_defaults.svm_tol = need_double(key, value, origin);
  } else if (key == "ann.layers") {
    if (value == "paper3") {
      c.model_defaults.ann_paper3 = true;
      c.model_defaults.ann_hidden.clear();
    } else {
      c.model_defaults.ann_paper3 = false;
      c.model_defaults.ann_hidden.clear();
      for (const std::string& tok : split(value, ',')) {
        c.model_defaults.ann_hidden.push_back(static_cast<int>(need_int(key, trim(tok), origin)));
      }
    }
  } else if (key == "ann.epochs") {
    c.model_defaults.ann_epochs = static_cast<int>(need_int(key, value, origin));
  } else if (key == "ann.lr") {
    c.model_defaults.ann_lr = need_double(key, value, origin);
  } else if (key == "ann.decay") {
    c.model_defaults.ann_decay = need_double(key, value, origin);
  } else if (key == "cv.folds") {
    c.cv_folds = static_cast<int>(need_int(key, value, origin));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(need_int(key, value, origin));
  } else if (key == "out") {
    c.out_dir = value;
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(need_int(key, value, origin));
  } else if (key == "disassembler") {
    c.disassembler = value;
  } else if (key == "max_failure_rate") {
    c.max_failure_rate = need_double(key, value, origin);
  } else if (key == "audit.cutoff") {
    c.audit_cutoff = parse_cutoff(value, origin);
  } else if (key == "signatures") {
    c.signatures_path = value;
  } else {
    throw ConfigError(origin + ": unknown config key: " + key);
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  PipelineConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    apply_config_pair(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                      path + ":" + std::to_string(line_no));
  }
  return c;
}

ModelSpec PipelineConfig::spec_for(const std::string& method) const {
  ModelSpec spec = model_defaults;
  spec.method = method;
  spec.seed = seed;
  return spec;
}

void PipelineConfig::validate() const {
  if (classes.size() < 2) throw ConfigError("config: need at least 2 classes");
  if (family != "pe_header" && family != "byte_randomness" && family != "opcode_ngram" &&
      family != "api_ngram") {
    throw ConfigError("config: unknown family " + family);
  }
  if (ngram_n < 1 || ngram_n > 4) throw ConfigError("config: ngram.n must be in 1..4");
  if (family == "api_ngram" && ngram_n > 2) throw ConfigError("config: api_ngram supports n in {1,2}");
  if (selection != "none" && selection != "infogain" && selection != "cfs") {
    throw ConfigError("config: unknown selection " + selection);
  }
  if (selection_threshold < 0) throw ConfigError("config: selection.threshold must be >= 0");
  if (cv_folds < 2) throw ConfigError("config: cv.folds must be >= 2");
  if (max_failure_rate < 0 || max_failure_rate > 1) {
    throw ConfigError("config: max_failure_rate must be in [0,1]");
  }
  for (const std::string& m : model_names) {
    if (!known_method(m)) throw ConfigError("config: unknown model " + m);
  }
}

}  // namespace malstat
