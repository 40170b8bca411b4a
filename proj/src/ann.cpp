#include <cmath>
#include <random>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"

namespace malstat {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Activations {
  std::vector<std::vector<double>> a;  // per layer, a[0] = input
};

Activations forward_pass(const AnnModel& model, const std::vector<double>& input) {
  Activations act;
  act.a.resize(model.layer_sizes.size());
  act.a[0] = input;
  for (size_t l = 0; l < model.weights.size(); ++l) {
    const auto& w = model.weights[l];
    const auto& bias = model.biases[l];
    std::vector<double> next(w.size());
    for (size_t to = 0; to < w.size(); ++to) {
      double z = bias[to];
      for (size_t from = 0; from < act.a[l].size(); ++from) z += w[to][from] * act.a[l][from];
      next[to] = sigmoid(z);
    }
    act.a[l + 1] = std::move(next);
  }
  return act;
}

// Squared-error backprop deltas; returns per-layer gradients.
void backprop(const AnnModel& model, const Activations& act, const std::vector<double>& target,
              std::vector<std::vector<std::vector<double>>>& grad_w,
              std::vector<std::vector<double>>& grad_b) {
  const size_t layers = model.weights.size();
  grad_w.assign(layers, {});
  grad_b.assign(layers, {});

  const std::vector<double>& out = act.a.back();
  std::vector<double> delta(out.size());
  for (size_t i = 0; i < out.size(); ++i) {
    delta[i] = (out[i] - target[i]) * out[i] * (1.0 - out[i]);
  }

  for (size_t l = layers; l-- > 0;) {
    const std::vector<double>& prev = act.a[l];
    grad_w[l].assign(delta.size(), std::vector<double>(prev.size(), 0.0));
    grad_b[l] = delta;
    for (size_t to = 0; to < delta.size(); ++to) {
      for (size_t from = 0; from < prev.size(); ++from) {
        grad_w[l][to][from] = delta[to] * prev[from];
      }
    }
    if (l == 0) break;
    std::vector<double> prev_delta(prev.size(), 0.0);
    for (size_t from = 0; from < prev.size(); ++from) {
      double acc = 0;
      for (size_t to = 0; to < delta.size(); ++to) acc += model.weights[l][to][from] * delta[to];
      prev_delta[from] = acc * prev[from] * (1.0 - prev[from]);
    }
    delta = std::move(prev_delta);
  }
}

}  // namespace

AnnModel train_ann(const Dataset& ds, const std::vector<int>& hidden_layers, int epochs, double lr,
                   double decay, std::uint64_t seed) {
  if (ds.size() == 0) throw TrainError("ann: empty training set");
  if (ds.n_classes() == 0) throw TrainError("ann: dataset has no classes");
  for (int h : hidden_layers) {
    if (h < 1) throw TrainError("ann: hidden layer size must be >= 1");
  }
  if (epochs < 0) throw TrainError("ann: negative epoch count");

  AnnModel model;
  model.schema = ds.schema;
  model.class_names = ds.class_names;
  model.encoder = DenseEncoder::fit(ds);

  model.layer_sizes.push_back(model.encoder.dims());
  for (int h : hidden_layers) model.layer_sizes.push_back(h);
  model.layer_sizes.push_back(static_cast<int>(ds.n_classes()));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  for (size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    int from = model.layer_sizes[l];
    int to = model.layer_sizes[l + 1];
    std::vector<std::vector<double>> w(to, std::vector<double>(from));
    std::vector<double> bias(to);
    for (int t = 0; t < to; ++t) {
      for (int f = 0; f < from; ++f) w[t][f] = init(rng);
    }
    for (int t = 0; t < to; ++t) bias[t] = init(rng);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(bias));
  }

  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  inputs.reserve(ds.size());
  targets.reserve(ds.size());
  for (const FeatureVector& s : ds.samples) {
    if (s.label == kNoLabel) throw TrainError("ann: unlabeled sample");
    inputs.push_back(model.encoder.encode(s.values));
    std::vector<double> one_hot(ds.n_classes(), 0.0);
    one_hot[s.label] = 1.0;
    targets.push_back(std::move(one_hot));
  }

  std::vector<std::vector<std::vector<double>>> grad_w;
  std::vector<std::vector<double>> grad_b;
  double rate = lr;
  model.epoch_loss.reserve(epochs);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double loss = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
      Activations act = forward_pass(model, inputs[i]);
      const auto& out = act.a.back();
      for (size_t k = 0; k < out.size(); ++k) {
        double d = out[k] - targets[i][k];
        loss += 0.5 * d * d;
      }
      backprop(model, act, targets[i], grad_w, grad_b);
      for (size_t l = 0; l < model.weights.size(); ++l) {
        for (size_t t = 0; t < model.weights[l].size(); ++t) {
          for (size_t f = 0; f < model.weights[l][t].size(); ++f) {
            model.weights[l][t][f] -= rate * grad_w[l][t][f];
          }
          model.biases[l][t] -= rate * grad_b[l][t];
        }
      }
    }
    model.epoch_loss.push_back(loss);
    rate *= decay;
  }
  return model;
}

std::vector<double> AnnModel::forward(const std::vector<double>& input) const {
  return forward_pass(*this, input).a.back();
}

double AnnModel::sample_loss(const std::vector<double>& input, const std::vector<double>& target) const {
  std::vector<double> out = forward(input);
  double loss = 0;
  for (size_t k = 0; k < out.size(); ++k) {
    double d = out[k] - target[k];
    loss += 0.5 * d * d;
  }
  return loss;
}

void AnnModel::gradients(const std::vector<double>& input, const std::vector<double>& target,
                         std::vector<std::vector<std::vector<double>>>& grad_w,
                         std::vector<std::vector<double>>& grad_b) const {
  Activations act = forward_pass(*this, input);
  backprop(*this, act, target, grad_w, grad_b);
}

Prediction AnnModel::classify(const FeatureVector& v) const {
  Prediction pred;
  pred.scores = forward(encoder.encode(v.values));
  pred.class_index = detail::argmax_lowest(pred.scores);
  return pred;
}

}  // namespace malstat
