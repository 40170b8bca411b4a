#include <cmath>
#include <sstream>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"
#include "malstat/text_util.hpp"

namespace malstat {

namespace detail {

int argmax_lowest(const std::vector<double>& scores) {
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  }
  return best;
}

void check_schema(const std::vector<AttributeSpec>& schema, const FeatureVector& v) {
  if (v.values.size() != schema.size()) {
    throw Error("classify: vector has " + std::to_string(v.values.size()) + " values, model expects " +
                std::to_string(schema.size()));
  }
  for (size_t a = 0; a < schema.size(); ++a) {
    double x = v.values[a];
    if (is_missing(x)) continue;
    const AttributeSpec& spec = schema[a];
    switch (spec.kind) {
      case AttributeKind::numeric:
        if (!std::isfinite(x)) throw Error("classify: non-finite value for attribute " + spec.name);
        break;
      case AttributeKind::binary:
        if (x != 0.0 && x != 1.0) throw Error("classify: non-binary value for attribute " + spec.name);
        break;
      case AttributeKind::nominal: {
        int idx = static_cast<int>(x);
        if (x != static_cast<double>(idx) || idx < 0 ||
            idx >= static_cast<int>(spec.categories.size())) {
          throw Error("classify: invalid category for attribute " + spec.name);
        }
        break;
      }
    }
  }
}

}  // namespace detail

std::string ModelSpec::summary() const {
  std::ostringstream out;
  out << method;
  if (method == "naive_bayes") {
    out << " laplace=" << format_double(nb_laplace) << " bins=" << nb_bins;
  } else if (method == "bayes_net") {
    out << " structure=" << bn_structure;
  } else if (method == "c45") {
    out << " min_leaf=" << c45_min_leaf << " prune_cf=" << format_double(c45_prune_cf);
  } else if (method == "knn") {
    out << " k=" << knn_k << " weighting=" << knn_weighting;
  } else if (method == "svm") {
    out << " C=" << format_double(svm_c) << " kernel=" << svm_kernel;
    if (svm_kernel == "rbf") out << " gamma=" << format_double(svm_gamma);
  } else if (method == "ann") {
    out << " layers=";
    if (ann_paper3) {
      out << "paper3";
    } else if (ann_hidden.empty()) {
      out << "auto";
    } else {
      for (size_t i = 0; i < ann_hidden.size(); ++i) out << (i ? "-" : "") << ann_hidden[i];
    }
    out << " epochs=" << ann_epochs << " lr=" << format_double(ann_lr) << " seed=" << seed;
  }
  return out.str();
}

DenseEncoder DenseEncoder::fit(const Dataset& ds) {
  DenseEncoder enc;
  enc.schema = ds.schema;
  enc.scaler = MinMaxScaler::fit(ds);
  return enc;
}

int DenseEncoder::dims() const {
  int d = 0;
  for (const AttributeSpec& a : schema) {
    d += a.kind == AttributeKind::nominal ? static_cast<int>(a.categories.size()) : 1;
  }
  return d;
}

std::vector<double> DenseEncoder::encode(const std::vector<double>& values) const {
  std::vector<double> out;
  out.reserve(dims());
  for (size_t a = 0; a < schema.size(); ++a) {
    double v = values[a];
    switch (schema[a].kind) {
      case AttributeKind::numeric:
        out.push_back(is_missing(v) ? 0.5 : scaler.transform_value(a, v));
        break;
      case AttributeKind::binary:
        out.push_back(is_missing(v) ? 0.5 : v);
        break;
      case AttributeKind::nominal: {
        size_t cats = schema[a].categories.size();
        size_t hot = is_missing(v) ? cats : static_cast<size_t>(v);
        for (size_t c = 0; c < cats; ++c) out.push_back(c == hot ? 1.0 : 0.0);
        break;
      }
    }
  }
  return out;
}

Prediction TrainedModel::classify(const FeatureVector& v) const {
  detail::check_schema(schema(), v);
  return std::visit([&](const auto& model) { return model.classify(v); }, impl_);
}

std::string TrainedModel::method() const {
  struct Visitor {
    std::string operator()(const NaiveBayesModel&) const { return "naive_bayes"; }
    std::string operator()(const BayesNetModel&) const { return "bayes_net"; }
    std::string operator()(const C45Model&) const { return "c45"; }
    std::string operator()(const KnnModel&) const { return "knn"; }
    std::string operator()(const SvmModel&) const { return "svm"; }
    std::string operator()(const AnnModel&) const { return "ann"; }
  };
  return std::visit(Visitor{}, impl_);
}

const std::vector<AttributeSpec>& TrainedModel::schema() const {
  return std::visit([](const auto& m) -> const std::vector<AttributeSpec>& { return m.schema; }, impl_);
}

const std::vector<std::string>& TrainedModel::class_names() const {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.class_names; },
                    impl_);
}

TrainedModel train_model(const Dataset& ds, const ModelSpec& spec) {
  if (spec.method == "naive_bayes") {
    return TrainedModel(train_naive_bayes(ds, spec.nb_laplace, spec.nb_bins));
  }
  if (spec.method == "bayes_net") {
    return TrainedModel(train_bayes_net(ds, spec.bn_structure));
  }
  if (spec.method == "c45") {
    return TrainedModel(train_c45(ds, spec.c45_min_leaf, spec.c45_prune_cf));
  }
  if (spec.method == "knn") {
    return TrainedModel(train_knn(ds, spec.knn_k, spec.knn_weighting));
  }
  if (spec.method == "svm") {
    return TrainedModel(train_svm(ds, spec.svm_c, spec.svm_kernel, spec.svm_gamma, spec.svm_tol));
  }
  if (spec.method == "ann") {
    std::vector<int> hidden = spec.ann_hidden;
    if (spec.ann_paper3 || hidden.empty()) {
      int width = (static_cast<int>(ds.n_attrs()) + static_cast<int>(ds.n_classes()) + 1) / 2;
      width = std::max(width, 1);
      hidden.assign(spec.ann_paper3 ? 3 : 1, width);
    }
    return TrainedModel(train_ann(ds, hidden, spec.ann_epochs, spec.ann_lr, spec.ann_decay, spec.seed));
  }
  throw ConfigError("unknown model method: " + spec.method);
}

}  // namespace malstat
