#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "malstat/dataset.hpp"
#include "malstat/preprocess.hpp"

namespace malstat {

struct Prediction {
  int class_index = 0;
  // Per-class scores: posteriors for the probabilistic models, vote shares
  // for k-NN, signed margin for the SVM, raw output activations for the ANN.
  // argmax(scores) == class_index with ties resolved to the lowest index.
  std::vector<double> scores;
};

/// Method tag plus hyperparameters. Fields outside the selected method are
/// ignored. All stochastic training is driven by `seed`.
struct ModelSpec {
  std::string method;  // naive_bayes | bayes_net | c45 | knn | svm | ann

  double nb_laplace = 1.0;
  int nb_bins = 10;  // equal-frequency bins for numeric attributes

  std::string bn_structure = "naive";  // naive | tan

  int c45_min_leaf = 2;
  double c45_prune_cf = 0.25;  // <= 0 disables pruning

  int knn_k = 1;
  std::string knn_weighting = "uniform";  // uniform | inverse_distance

  double svm_c = 1.0;
  std::string svm_kernel = "linear";  // linear | rbf
  double svm_gamma = 0.0;             // 0 -> 1/p
  double svm_tol = 1e-3;

  std::vector<int> ann_hidden;  // empty -> one hidden layer of ceil((p+m)/2)
  bool ann_paper3 = false;      // preset: three hidden layers of that width
  int ann_epochs = 500;
  double ann_lr = 0.3;
  double ann_decay = 0.99;

  std::uint64_t seed = 0;

  std::string summary() const;  // echo line for reports
};

/// Dense numeric encoding shared by the margin/gradient models: numeric
/// attributes min-max scaled, binary passed through, nominal one-hot.
/// Missing numeric/binary cells encode to 0.5, missing nominal to all-zero.
struct DenseEncoder {
  std::vector<AttributeSpec> schema;
  MinMaxScaler scaler;

  static DenseEncoder fit(const Dataset& ds);
  int dims() const;
  std::vector<double> encode(const std::vector<double>& values) const;
};

// ---------------------------------------------------------------------------

struct NaiveBayesModel {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;
  double laplace = 1.0;
  int bins = 10;
  std::vector<std::optional<Discretizer>> discretizers;  // per attribute
  std::vector<int> arity;                                // post-discretization
  std::vector<double> priors;
  // tables[attr][value][class] = P(value | class)
  std::vector<std::vector<std::vector<double>>> tables;

  Prediction classify(const FeatureVector& v) const;
};

NaiveBayesModel train_naive_bayes(const Dataset& ds, double laplace = 1.0, int bins = 10);

struct BayesNetModel {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;
  std::string structure = "naive";  // naive | tan
  bool fell_back_to_naive = false;  // tan requested with < 2 features
  std::vector<std::optional<Discretizer>> discretizers;
  std::vector<int> arity;
  std::vector<int> parent;  // feature parent per attribute, -1 = class only
  std::vector<double> priors;
  // cpt[attr][parent_value][value][class]; single parent_value slot when the
  // attribute has no feature parent.
  std::vector<std::vector<std::vector<std::vector<double>>>> cpt;
  // marginal[attr][value][class]: fallback when the parent value is missing
  std::vector<std::vector<std::vector<double>>> marginal;

  Prediction classify(const FeatureVector& v) const;
};

BayesNetModel train_bayes_net(const Dataset& ds, const std::string& structure = "naive");

struct C45Node {
  bool leaf = true;
  int cls = 0;                       // leaf class / majority class at node
  std::vector<double> class_counts;  // training distribution reaching the node
  int attr = -1;
  bool numeric_split = false;
  double threshold = 0.0;   // numeric: left branch is value <= threshold
  int majority_branch = 0;  // routing for missing / unseen values
  std::vector<int> children;
};

struct C45Model {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;
  int min_leaf = 2;
  double prune_cf = 0.25;
  std::vector<C45Node> nodes;  // nodes[0] is the root

  Prediction classify(const FeatureVector& v) const;
  const C45Node& root() const { return nodes.at(0); }
  int depth() const;
};

C45Model train_c45(const Dataset& ds, int min_leaf = 2, double prune_cf = 0.25);

struct KnnModel {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;
  int k = 1;
  std::string weighting = "uniform";  // uniform | inverse_distance
  MinMaxScaler scaler;
  std::vector<std::vector<double>> instances;  // scaled training vectors
  std::vector<int> labels;

  Prediction classify(const FeatureVector& v) const;
};

KnnModel train_knn(const Dataset& ds, int k = 1, const std::string& weighting = "uniform");

struct SvmModel {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;  // exactly two
  DenseEncoder encoder;
  std::string kernel = "linear";  // linear | rbf
  double gamma = 0.0;
  double c = 1.0;
  double tol = 1e-3;
  double bias = 0.0;
  bool converged = true;
  std::vector<std::vector<double>> support_vectors;  // encoded
  std::vector<double> alpha_y;                       // alpha_i * y_i

  Prediction classify(const FeatureVector& v) const;
  double margin(const FeatureVector& v) const;
  /// Effective (w, b) in original attribute space; only meaningful for the
  /// linear kernel on numeric/binary schemas.
  std::pair<std::vector<double>, double> linear_weights() const;
};

SvmModel train_svm(const Dataset& ds, double c = 1.0, const std::string& kernel = "linear",
                   double gamma = 0.0, double tol = 1e-3);

struct AnnModel {
  std::vector<AttributeSpec> schema;
  std::vector<std::string> class_names;
  DenseEncoder encoder;
  std::vector<int> layer_sizes;  // input, hidden..., output
  // weights[l][to][from] connects layer_sizes[l] -> layer_sizes[l+1]
  std::vector<std::vector<std::vector<double>>> weights;
  std::vector<std::vector<double>> biases;  // biases[l][to]
  std::vector<double> epoch_loss;           // training diagnostic

  Prediction classify(const FeatureVector& v) const;
  std::vector<double> forward(const std::vector<double>& input) const;
  double sample_loss(const std::vector<double>& input, const std::vector<double>& target) const;
  void gradients(const std::vector<double>& input, const std::vector<double>& target,
                 std::vector<std::vector<std::vector<double>>>& grad_w,
                 std::vector<std::vector<double>>& grad_b) const;
};

AnnModel train_ann(const Dataset& ds, const std::vector<int>& hidden_layers, int epochs = 500,
                   double lr = 0.3, double decay = 0.99, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------

class TrainedModel {
 public:
  using Variant =
      std::variant<NaiveBayesModel, BayesNetModel, C45Model, KnnModel, SvmModel, AnnModel>;

  TrainedModel() = default;
  explicit TrainedModel(Variant impl) : impl_(std::move(impl)) {}

  /// Validates the vector against the training schema (throws naming the
  /// first mismatching attribute) and dispatches to the concrete model.
  Prediction classify(const FeatureVector& v) const;

  std::string method() const;
  const std::vector<AttributeSpec>& schema() const;
  const std::vector<std::string>& class_names() const;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&impl_);
  }

  void save(std::ostream& out) const;
  std::string save_string() const;
  static TrainedModel load(std::istream& in);
  static TrainedModel load_string(const std::string& text);
  void save_file(const std::string& path) const;
  static TrainedModel load_file(const std::string& path);

 private:
  Variant impl_;
};

/// Trains the model named by spec.method on the dataset. Preprocessing
/// (discretizers, scalers, encoders) is fitted on `ds` only and travels with
/// the model, so held-out data never leaks into training.
TrainedModel train_model(const Dataset& ds, const ModelSpec& spec);

namespace detail {
int argmax_lowest(const std::vector<double>& scores);
void check_schema(const std::vector<AttributeSpec>& schema, const FeatureVector& v);
}  // namespace detail

}  // namespace malstat
