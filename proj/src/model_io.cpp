#include <fstream>
#include <sstream>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"
#include "malstat/text_util.hpp"

// Versioned text serialization: whitespace-separated tokens, names
// percent-encoded, doubles in shortest round-trip form. Layout:
//   malstat-model 1
//   method <tag>
//   classes <m> <name...>
//   attrs <p>
//   attr <name> <kind> [<ncats> <cat...>]
//   <method-specific sections>
//   end

namespace malstat {

namespace {

struct Writer {
  std::ostream& out;

  void token(const std::string& s) { out << s << ' '; }
  void name(const std::string& s) { out << encode_token(s) << ' '; }
  void num(double v) { out << format_double(v) << ' '; }
  void num(int v) { out << v << ' '; }
  void num(size_t v) { out << v << ' '; }
  void line() { out << '\n'; }
};

struct Reader {
  std::istream& in;

  std::string token() {
    std::string t;
    if (!(in >> t)) throw ParseError("model: unexpected end of input");
    return t;
  }
  std::string name() { return decode_token(token()); }
  double num() {
    double v;
    if (!parse_double(token(), v)) throw ParseError("model: expected a number");
    return v;
  }
  long long integer() {
    long long v;
    if (!parse_int(token(), v)) throw ParseError("model: expected an integer");
    return v;
  }
  void expect(const std::string& want) {
    std::string got = token();
    if (got != want) throw ParseError("model: expected '" + want + "', got '" + got + "'");
  }
};

void write_header(Writer& w, const std::string& method, const std::vector<std::string>& classes,
                  const std::vector<AttributeSpec>& schema) {
  w.token("malstat-model");
  w.num(1);
  w.line();
  w.token("method");
  w.token(method);
  w.line();
  w.token("classes");
  w.num(classes.size());
  for (const auto& c : classes) w.name(c);
  w.line();
  w.token("attrs");
  w.num(schema.size());
  w.line();
  for (const AttributeSpec& a : schema) {
    w.token("attr");
    w.name(a.name);
    w.token(to_string(a.kind));
    if (a.kind == AttributeKind::nominal) {
      w.num(a.categories.size());
      for (const auto& c : a.categories) w.name(c);
    }
    w.line();
  }
}

void read_schema(Reader& r, std::vector<std::string>& classes, std::vector<AttributeSpec>& schema) {
  r.expect("classes");
  long long m = r.integer();
  classes.clear();
  for (long long i = 0; i < m; ++i) classes.push_back(r.name());
  r.expect("attrs");
  long long p = r.integer();
  schema.clear();
  for (long long i = 0; i < p; ++i) {
    r.expect("attr");
    AttributeSpec a;
    a.name = r.name();
    if (!attribute_kind_from_string(r.token(), a.kind)) throw ParseError("model: bad attribute kind");
    if (a.kind == AttributeKind::nominal) {
      long long ncats = r.integer();
      for (long long c = 0; c < ncats; ++c) a.categories.push_back(r.name());
    }
    schema.push_back(std::move(a));
  }
}

void write_discretizers(Writer& w, const std::vector<std::optional<Discretizer>>& discs) {
  for (size_t a = 0; a < discs.size(); ++a) {
    w.token("disc");
    w.num(a);
    if (!discs[a].has_value()) {
      w.token("none");
    } else {
      w.token(to_string(discs[a]->method));
      w.num(discs[a]->cuts.size());
      for (double c : discs[a]->cuts) w.num(c);
    }
    w.line();
  }
}

std::vector<std::optional<Discretizer>> read_discretizers(Reader& r, size_t count) {
  std::vector<std::optional<Discretizer>> discs(count);
  for (size_t a = 0; a < count; ++a) {
    r.expect("disc");
    long long idx = r.integer();
    std::string kind = r.token();
    if (kind == "none") continue;
    Discretizer d;
    d.method = kind == "supervised_threshold" ? DiscretizeMethod::supervised_threshold
                                              : DiscretizeMethod::equal_frequency;
    long long ncuts = r.integer();
    for (long long ci = 0; ci < ncuts; ++ci) d.cuts.push_back(r.num());
    discs.at(idx) = std::move(d);
  }
  return discs;
}

void write_scaler(Writer& w, const MinMaxScaler& scaler) {
  for (size_t a = 0; a < scaler.ranges.size(); ++a) {
    w.token("range");
    w.num(a);
    if (!scaler.ranges[a].has_value()) {
      w.token("none");
    } else {
      w.num(scaler.ranges[a]->first);
      w.num(scaler.ranges[a]->second);
    }
    w.line();
  }
}

MinMaxScaler read_scaler(Reader& r, size_t count) {
  MinMaxScaler scaler;
  scaler.ranges.resize(count);
  for (size_t a = 0; a < count; ++a) {
    r.expect("range");
    long long idx = r.integer();
    std::string first = r.token();
    if (first == "none") continue;
    double lo, hi;
    if (!parse_double(first, lo)) throw ParseError("model: bad range");
    hi = r.num();
    scaler.ranges.at(idx) = std::make_pair(lo, hi);
  }
  return scaler;
}

// --- naive bayes ---

void write_body(Writer& w, const NaiveBayesModel& m) {
  w.token("laplace");
  w.num(m.laplace);
  w.line();
  w.token("bins");
  w.num(m.bins);
  w.line();
  w.token("arity");
  for (int a : m.arity) w.num(a);
  w.line();
  write_discretizers(w, m.discretizers);
  w.token("priors");
  for (double p : m.priors) w.num(p);
  w.line();
  for (size_t a = 0; a < m.tables.size(); ++a) {
    w.token("table");
    w.num(a);
    w.line();
    for (const auto& row : m.tables[a]) {
      for (double p : row) w.num(p);
      w.line();
    }
  }
}

NaiveBayesModel read_naive_bayes(Reader& r, std::vector<std::string> classes,
                                 std::vector<AttributeSpec> schema) {
  NaiveBayesModel m;
  m.class_names = std::move(classes);
  m.schema = std::move(schema);
  r.expect("laplace");
  m.laplace = r.num();
  r.expect("bins");
  m.bins = static_cast<int>(r.integer());
  r.expect("arity");
  m.arity.resize(m.schema.size());
  for (auto& a : m.arity) a = static_cast<int>(r.integer());
  m.discretizers = read_discretizers(r, m.schema.size());
  r.expect("priors");
  m.priors.resize(m.class_names.size());
  for (auto& p : m.priors) p = r.num();
  m.tables.resize(m.schema.size());
  for (size_t a = 0; a < m.schema.size(); ++a) {
    r.expect("table");
    long long idx = r.integer();
    auto& table = m.tables.at(idx);
    table.assign(m.arity[idx], std::vector<double>(m.class_names.size(), 0.0));
    for (auto& row : table) {
      for (double& p : row) p = r.num();
    }
  }
  return m;
}

// --- bayes net ---

void write_body(Writer& w, const BayesNetModel& m) {
  w.token("structure");
  w.token(m.structure);
  w.line();
  w.token("fallback");
  w.num(m.fell_back_to_naive ? 1 : 0);
  w.line();
  w.token("arity");
  for (int a : m.arity) w.num(a);
  w.line();
  write_discretizers(w, m.discretizers);
  w.token("parents");
  for (int p : m.parent) w.num(p);
  w.line();
  w.token("priors");
  for (double p : m.priors) w.num(p);
  w.line();
  for (size_t a = 0; a < m.cpt.size(); ++a) {
    w.token("cpt");
    w.num(a);
    w.num(m.cpt[a].size());
    w.line();
    for (const auto& pv : m.cpt[a]) {
      for (const auto& row : pv) {
        for (double p : row) w.num(p);
        w.line();
      }
    }
  }
  for (size_t a = 0; a < m.marginal.size(); ++a) {
    w.token("marginal");
    w.num(a);
    w.line();
    for (const auto& row : m.marginal[a]) {
      for (double p : row) w.num(p);
      w.line();
    }
  }
}

BayesNetModel read_bayes_net(Reader& r, std::vector<std::string> classes,
                             std::vector<AttributeSpec> schema) {
  BayesNetModel m;
  m.class_names = std::move(classes);
  m.schema = std::move(schema);
  const size_t p = m.schema.size();
  const size_t cls = m.class_names.size();
  r.expect("structure");
  m.structure = r.token();
  r.expect("fallback");
  m.fell_back_to_naive = r.integer() != 0;
  r.expect("arity");
  m.arity.resize(p);
  for (auto& a : m.arity) a = static_cast<int>(r.integer());
  m.discretizers = read_discretizers(r, p);
  r.expect("parents");
  m.parent.resize(p);
  for (auto& pa : m.parent) pa = static_cast<int>(r.integer());
  r.expect("priors");
  m.priors.resize(cls);
  for (auto& pr : m.priors) pr = r.num();
  m.cpt.resize(p);
  for (size_t a = 0; a < p; ++a) {
    r.expect("cpt");
    long long idx = r.integer();
    long long pa_arity = r.integer();
    auto& cpt = m.cpt.at(idx);
    cpt.assign(pa_arity, std::vector<std::vector<double>>(m.arity[idx], std::vector<double>(cls, 0.0)));
    for (auto& pv : cpt) {
      for (auto& row : pv) {
        for (double& x : row) x = r.num();
      }
    }
  }
  m.marginal.resize(p);
  for (size_t a = 0; a < p; ++a) {
    r.expect("marginal");
    long long idx = r.integer();
    auto& marg = m.marginal.at(idx);
    marg.assign(m.arity[idx], std::vector<double>(cls, 0.0));
    for (auto& row : marg) {
      for (double& x : row) x = r.num();
    }
  }
  return m;
}

// --- c45 ---

void write_body(Writer& w, const C45Model& m) {
  w.token("min_leaf");
  w.num(m.min_leaf);
  w.line();
  w.token("prune_cf");
  w.num(m.prune_cf);
  w.line();
  w.token("nodes");
  w.num(m.nodes.size());
  w.line();
  for (const C45Node& n : m.nodes) {
    w.token("node");
    if (n.leaf) {
      w.token("L");
      w.num(n.cls);
    } else if (n.numeric_split) {
      w.token("N");
      w.num(n.attr);
      w.num(n.threshold);
      w.num(n.majority_branch);
      w.num(n.cls);
      w.num(n.children.size());
      for (int c : n.children) w.num(c);
    } else {
      w.token("C");
      w.num(n.attr);
      w.num(n.majority_branch);
      w.num(n.cls);
      w.num(n.children.size());
      for (int c : n.children) w.num(c);
    }
    for (double c : n.class_counts) w.num(c);
    w.line();
  }
}

C45Model read_c45(Reader& r, std::vector<std::string> classes, std::vector<AttributeSpec> schema) {
  C45Model m;
  m.class_names = std::move(classes);
  m.schema = std::move(schema);
  r.expect("min_leaf");
  m.min_leaf = static_cast<int>(r.integer());
  r.expect("prune_cf");
  m.prune_cf = r.num();
  r.expect("nodes");
  long long count = r.integer();
  for (long long i = 0; i < count; ++i) {
    r.expect("node");
    C45Node n;
    std::string kind = r.token();
    if (kind == "L") {
      n.leaf = true;
      n.cls = static_cast<int>(r.integer());
    } else {
      n.leaf = false;
      n.numeric_split = kind == "N";
      n.attr = static_cast<int>(r.integer());
      if (n.numeric_split) n.threshold = r.num();
      n.majority_branch = static_cast<int>(r.integer());
      n.cls = static_cast<int>(r.integer());
      long long nchildren = r.integer();
      for (long long c = 0; c < nchildren; ++c) n.children.push_back(static_cast<int>(r.integer()));
    }
    n.class_counts.resize(m.class_names.size());
    for (double& c : n.class_counts) c = r.num();
    m.nodes.push_back(std::move(n));
  }
  return m;
}

// --- knn ---

void write_body(Writer& w, const KnnModel& m) {
  w.token("k");
  w.num(m.k);
  w.line();
  w.token("weighting");
  w.token(m.weighting);
  w.line();
  write_scaler(w, m.scaler);
  w.token("instances");
  w.num(m.instances.size());
  w.line();
  for (size_t i = 0; i < m.instances.size(); ++i) {
    w.num(m.labels[i]);
    for (double v : m.instances[i]) {
      if (is_missing(v)) {
        w.token("?");
      } else {
        w.num(v);
      }
    }
    w.line();
  }
}

KnnModel read_knn(Reader& r, std::vector<std::string> classes, std::vector<AttributeSpec> schema) {
  KnnModel m;
  m.class_names = std::move(classes);
  m.schema = std::move(schema);
  r.expect("k");
  m.k = static_cast<int>(r.integer());
  r.expect("weighting");
  m.weighting = r.token();
  m.scaler = read_scaler(r, m.schema.size());
  r.expect("instances");
  long long n = r.integer();
  for (long long i = 0; i < n; ++i) {
    m.labels.push_back(static_cast<int>(r.integer()));
    std::vector<double> values(m.schema.size());
    for (double& v : values) {
      std::string t = r.token();
      if (t == "?") {
        v = missing_value();
      } else if (!parse_double(t, v)) {
        throw ParseError("model: bad instance value");
      }
    }
    m.instances.push_back(std::move(values));
  }
  return m;
}

// --- svm ---

void write_body(Writer& w, const SvmModel& m) {
  w.token("kernel");
  w.token(m.kernel);
  w.line();
  w.token("gamma");
  w.num(m.gamma);
  w.line();
  w.token("c");
  w.num(m.c);
  w.line();
  w.token("tol");
  w.num(m.tol);
  w.line();
  w.token("bias");
  w.num(m.bias);
  w.line();
  w.token("converged");
  w.num(m.converged ? 1 : 0);
  w.line();
  write_scaler(w, m.encoder.scaler);
  w.token("sv");
  w.num(m.support_vectors.size());
  w.num(m.support_vectors.empty() ? 0 : m.support_vectors[0].size());
  w.line();
  for (size_t i = 0; i < m.support_vectors.size(); ++i) {
    w.num(m.alpha_y[i]);
    for (double v : m.support_vectors[i]) w.num(v);
    w.line();
  }
}

SvmModel read_svm(Reader& r, std::vector<std::string> classes, std::vector<AttributeSpec> schema) {
  SvmModel m;
  m.class_names = std::move(classes);
  m.schema = std::move(schema);
  m.encoder.schema = m.schema;
  r.expect("kernel");
  m.kernel = r.token();
  r.expect("gamma");
  m.gamma = r.num();
  r.expect("c");
  m.c = r.num();
  r.expect("tol");
  m.tol = r.num();
  r.expect("bias");
  m.bias = r.num();
  r.expect("converged");
  m.converged = r.integer() != 0;
  m.encoder.scaler = read_scaler(r, m.schema.size());
  r.expect("sv");
  long long n = r.integer();
  long long dims = r.integer();
  for (long long i = 0; i < n; ++i) {
    m.alpha_y.push_back(r.num());
    std::vector<double> v(dims);
    for (double& x : v) x = r.num();
    m.support_vectors.push_back(std::move(v));
  }
  return m;
}

// --- ann ---

void write_body(Writer& w, const AnnModel& m) {
  w.token("layers");
  w.num(m.layer_sizes.size());
  for (int s : m.layer_sizes) w.num(s);
  w.line();
  write_scaler(w, m.encoder.scaler);
  for (size_t l = 0; l < m.weights.size(); ++l) {
    w.token("weights");
    w.num(l);
    w.line();
    for (const auto& row : m.weights[l]) {
      for (double v : row) w.num(v);
      w.line();
    }
    w.token("biases");
    w.num(l);
    for (double v : m.biases[l]) w.num(v);
    w.line();
  }
}

AnnModel read_ann(Reader& r, std::vector<std::string> classes, std::vector<AttributeSpec> schema) {
  AnnModel m;
  m.class_names = std::move(classes);
  m.schema = std::move(schema);
  m.encoder.schema = m.schema;
  r.expect("layers");
  long long nlayers = r.integer();
  for (long long i = 0; i < nlayers; ++i) m.layer_sizes.push_back(static_cast<int>(r.integer()));
  m.encoder.scaler = read_scaler(r, m.schema.size());
  for (long long l = 0; l + 1 < nlayers; ++l) {
    r.expect("weights");
    long long idx = r.integer();
    (void)idx;
    std::vector<std::vector<double>> w(m.layer_sizes[l + 1], std::vector<double>(m.layer_sizes[l]));
    for (auto& row : w) {
      for (double& v : row) v = r.num();
    }
    m.weights.push_back(std::move(w));
    r.expect("biases");
    r.integer();
    std::vector<double> b(m.layer_sizes[l + 1]);
    for (double& v : b) v = r.num();
    m.biases.push_back(std::move(b));
  }
  return m;
}

}  // namespace

void TrainedModel::save(std::ostream& out) const {
  Writer w{out};
  std::visit(
      [&](const auto& model) {
        write_header(w, method(), model.class_names, model.schema);
        write_body(w, model);
      },
      impl_);
  out << "end\n";
}

std::string TrainedModel::save_string() const {
  std::ostringstream out;
  save(out);
  return out.str();
}

TrainedModel TrainedModel::load(std::istream& in) {
  Reader r{in};
  r.expect("malstat-model");
  if (r.integer() != 1) throw ParseError("model: unsupported version");
  r.expect("method");
  std::string method = r.token();
  std::vector<std::string> classes;
  std::vector<AttributeSpec> schema;
  read_schema(r, classes, schema);

  TrainedModel model;
  if (method == "naive_bayes") {
    model = TrainedModel(read_naive_bayes(r, std::move(classes), std::move(schema)));
  } else if (method == "bayes_net") {
    model = TrainedModel(read_bayes_net(r, std::move(classes), std::move(schema)));
  } else if (method == "c45") {
    model = TrainedModel(read_c45(r, std::move(classes), std::move(schema)));
  } else if (method == "knn") {
    model = TrainedModel(read_knn(r, std::move(classes), std::move(schema)));
  } else if (method == "svm") {
    model = TrainedModel(read_svm(r, std::move(classes), std::move(schema)));
  } else if (method == "ann") {
    model = TrainedModel(read_ann(r, std::move(classes), std::move(schema)));
  } else {
    throw ParseError("model: unknown method " + method);
  }
  r.expect("end");
  return model;
}

TrainedModel TrainedModel::load_string(const std::string& text) {
  std::istringstream in(text);
  return load(in);
}

void TrainedModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save(out);
  if (!out) throw Error("write failed: " + path);
}

TrainedModel TrainedModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load(in);
}

}  // namespace malstat
