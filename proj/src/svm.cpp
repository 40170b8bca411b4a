#include <algorithm>
#include <cmath>
#include <limits>

#include "malstat/error.hpp"
#include "malstat/ml.hpp"

namespace malstat {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double kernel_eval(const std::string& kernel, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b) {
  if (kernel == "rbf") return std::exp(-gamma * squared_distance(a, b));
  return dot(a, b);
}

// Sequential minimal optimization with deterministic working-set choices:
// the classic two-level examine loop, second choice by maximal |E1 - E2|
// with index order breaking ties.
struct SmoSolver {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  double c;
  double tol;
  std::string kernel;
  double gamma;

  std::vector<std::vector<double>> gram;
  std::vector<double> alpha;
  std::vector<double> u;  // f(i) without the bias term
  double b = 0.0;

  static constexpr double kEps = 1e-12;
  static constexpr double kBoundEps = 1e-8;
  static constexpr int kMaxPasses = 2000;

  explicit SmoSolver(const std::vector<std::vector<double>>& px, const std::vector<double>& py,
                     double pc, double ptol, std::string pkernel, double pgamma)
      : x(px), y(py), c(pc), tol(ptol), kernel(std::move(pkernel)), gamma(pgamma) {
    const size_t n = x.size();
    gram.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i; j < n; ++j) {
        gram[i][j] = gram[j][i] = kernel_eval(kernel, gamma, x[i], x[j]);
      }
    }
    alpha.assign(n, 0.0);
    u.assign(n, 0.0);
  }

  double error(int i) const { return u[i] + b - y[i]; }
  bool non_bound(int i) const { return alpha[i] > kBoundEps && alpha[i] < c - kBoundEps; }

  bool take_step(int i1, int i2) {
    if (i1 == i2) return false;
    double a1 = alpha[i1], a2 = alpha[i2];
    double y1 = y[i1], y2 = y[i2];
    double e1 = error(i1), e2 = error(i2);
    double s = y1 * y2;

    double low, high;
    if (y1 != y2) {
      low = std::max(0.0, a2 - a1);
      high = std::min(c, c + a2 - a1);
    } else {
      low = std::max(0.0, a2 + a1 - c);
      high = std::min(c, a2 + a1);
    }
    if (low >= high) return false;

    double k11 = gram[i1][i1], k12 = gram[i1][i2], k22 = gram[i2][i2];
    double eta = k11 + k22 - 2 * k12;
    double a2_new;
    if (eta > kEps) {
      a2_new = a2 + y2 * (e1 - e2) / eta;
      a2_new = std::clamp(a2_new, low, high);
    } else {
      return false;  // degenerate pair (duplicate points)
    }
    if (std::fabs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);

    double b1 = b - e1 - y1 * (a1_new - a1) * k11 - y2 * (a2_new - a2) * k12;
    double b2 = b - e2 - y1 * (a1_new - a1) * k12 - y2 * (a2_new - a2) * k22;
    double b_new;
    if (a1_new > kBoundEps && a1_new < c - kBoundEps) {
      b_new = b1;
    } else if (a2_new > kBoundEps && a2_new < c - kBoundEps) {
      b_new = b2;
    } else {
      b_new = (b1 + b2) / 2;
    }

    for (size_t i = 0; i < x.size(); ++i) {
      u[i] += y1 * (a1_new - a1) * gram[i1][i] + y2 * (a2_new - a2) * gram[i2][i];
    }
    alpha[i1] = a1_new;
    alpha[i2] = a2_new;
    b = b_new;
    return true;
  }

  int examine(int i2) {
    double y2 = y[i2], a2 = alpha[i2], e2 = error(i2);
    double r2 = e2 * y2;
    bool violates = (r2 < -tol && a2 < c - kBoundEps) || (r2 > tol && a2 > kBoundEps);
    if (!violates) return 0;

    // Second choice 1: maximal |E1 - E2| among non-bound multipliers.
    int best = -1;
    double best_gap = -1.0;
    for (size_t i = 0; i < x.size(); ++i) {
      if (!non_bound(static_cast<int>(i))) continue;
      double gap = std::fabs(error(static_cast<int>(i)) - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    for (size_t i = 0; i < x.size(); ++i) {
      if (non_bound(static_cast<int>(i)) && take_step(static_cast<int>(i), i2)) return 1;
    }
    for (size_t i = 0; i < x.size(); ++i) {
      if (take_step(static_cast<int>(i), i2)) return 1;
    }
    return 0;
  }

  bool solve_pass() {
    int passes = 0;
    bool examine_all = true;
    int num_changed = 0;
    while (num_changed > 0 || examine_all) {
      if (++passes > kMaxPasses) return false;
      num_changed = 0;
      if (examine_all) {
        for (size_t i = 0; i < x.size(); ++i) num_changed += examine(static_cast<int>(i));
      } else {
        for (size_t i = 0; i < x.size(); ++i) {
          if (non_bound(static_cast<int>(i))) num_changed += examine(static_cast<int>(i));
        }
      }
      if (examine_all) {
        examine_all = false;
      } else if (num_changed == 0) {
        examine_all = true;
      }
    }
    return true;
  }

  // SMO's incremental b drifts when every multiplier sits at a bound; pin it
  // to the midpoint of the interval the KKT conditions allow.
  void recompute_bias() {
    double nb_sum = 0;
    int nb_count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < x.size(); ++i) {
      double target = y[i] - u[i];  // b making y_i f(i) = 1 ... for y=+1; see below
      if (non_bound(static_cast<int>(i))) {
        nb_sum += target;
        ++nb_count;
        continue;
      }
      bool at_zero = alpha[i] <= kBoundEps;
      // alpha=0 requires y*f >= 1; alpha=C requires y*f <= 1.
      if ((at_zero && y[i] > 0) || (!at_zero && y[i] < 0)) {
        lo = std::max(lo, target);
      } else {
        hi = std::min(hi, target);
      }
    }
    if (nb_count > 0) {
      b = nb_sum / nb_count;
    } else if (lo <= hi) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        b = (lo + hi) / 2;
      } else if (std::isfinite(lo)) {
        b = lo;
      } else if (std::isfinite(hi)) {
        b = hi;
      }
    }
  }

  bool solve() {
    for (int round = 0; round < 4; ++round) {
      if (!solve_pass()) return false;
      recompute_bias();
      if (kkt_satisfied()) return true;
    }
    return kkt_satisfied();
  }

  bool kkt_satisfied() const {
    for (size_t i = 0; i < x.size(); ++i) {
      double r = y[i] * (u[i] + b);
      if (alpha[i] <= kBoundEps) {
        if (r < 1 - tol) return false;
      } else if (alpha[i] >= c - kBoundEps) {
        if (r > 1 + tol) return false;
      } else if (std::fabs(r - 1) > tol) {
        return false;
      }
    }
    return true;
  }
};

}  // namespace

SvmModel train_svm(const Dataset& ds, double c, const std::string& kernel, double gamma, double tol) {
  if (ds.n_classes() != 2) {
    throw TrainError("svm: requires exactly 2 classes, got " + std::to_string(ds.n_classes()));
  }
  if (ds.size() == 0) throw TrainError("svm: empty training set");
  if (kernel != "linear" && kernel != "rbf") throw TrainError("svm: unknown kernel " + kernel);
  if (c <= 0) throw TrainError("svm: C must be positive");

  SvmModel model;
  model.schema = ds.schema;
  model.class_names = ds.class_names;
  model.encoder = DenseEncoder::fit(ds);
  model.kernel = kernel;
  model.c = c;
  model.tol = tol;

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(ds.size());
  y.reserve(ds.size());
  bool seen[2] = {false, false};
  for (const FeatureVector& s : ds.samples) {
    if (s.label == kNoLabel) throw TrainError("svm: unlabeled sample");
    x.push_back(model.encoder.encode(s.values));
    y.push_back(s.label == 0 ? -1.0 : 1.0);
    seen[s.label] = true;
  }
  if (!seen[0] || !seen[1]) throw TrainError("svm: training data covers a single class");

  model.gamma = gamma > 0 ? gamma : 1.0 / static_cast<double>(model.encoder.dims());

  SmoSolver solver(x, y, c, tol, kernel, model.gamma);
  bool finished = solver.solve();
  model.converged = finished && solver.kkt_satisfied();
  model.bias = solver.b;
  for (size_t i = 0; i < x.size(); ++i) {
    if (solver.alpha[i] > 1e-8) {
      model.support_vectors.push_back(x[i]);
      model.alpha_y.push_back(solver.alpha[i] * y[i]);
    }
  }
  return model;
}

double SvmModel::margin(const FeatureVector& v) const {
  std::vector<double> q = encoder.encode(v.values);
  double m = bias;
  for (size_t s = 0; s < support_vectors.size(); ++s) {
    m += alpha_y[s] * kernel_eval(kernel, gamma, support_vectors[s], q);
  }
  return m;
}

Prediction SvmModel::classify(const FeatureVector& v) const {
  double m = margin(v);
  Prediction pred;
  pred.scores = {-m, m};
  pred.class_index = detail::argmax_lowest(pred.scores);
  return pred;
}

std::pair<std::vector<double>, double> SvmModel::linear_weights() const {
  for (const AttributeSpec& a : schema) {
    if (a.kind == AttributeKind::nominal) {
      throw Error("svm: linear_weights needs a numeric/binary schema");
    }
  }
  std::vector<double> w_encoded(encoder.dims(), 0.0);
  for (size_t s = 0; s < support_vectors.size(); ++s) {
    for (size_t j = 0; j < w_encoded.size(); ++j) {
      w_encoded[j] += alpha_y[s] * support_vectors[s][j];
    }
  }
  // Undo the min-max scaling: f = sum_j w_j (x_j - min_j)/span_j + b.
  std::vector<double> w(schema.size(), 0.0);
  double b = bias;
  for (size_t j = 0; j < schema.size(); ++j) {
    const auto& range = encoder.scaler.ranges[j];
    if (schema[j].kind == AttributeKind::numeric && range.has_value()) {
      double span = range->second - range->first;
      if (span == 0.0) continue;  // constant attribute encodes to 0
      w[j] = w_encoded[j] / span;
      b -= w_encoded[j] * range->first / span;
    } else {
      w[j] = w_encoded[j];
    }
  }
  return {w, b};
}

}  // namespace malstat
