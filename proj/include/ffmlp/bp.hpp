#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ffmlp/dataset.hpp"
#include "ffmlp/error.hpp"
#include "ffmlp/network.hpp"
#include "ffmlp/types.hpp"

namespace ffmlp {

enum class InitScheme { kXavierUniform, kFromFF };

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.01;
  double momentum = 0.0;
  int batch_size = 32;
  InitScheme init = InitScheme::kXavierUniform;
  Seed seed = 0;

  void validate() const {
    if (epochs < 0) throw ParameterError("epochs must be >= 0");
    if (!(learning_rate >= 0.0)) throw ParameterError("learning rate must be >= 0");
    if (!(momentum >= 0.0)) throw ParameterError("momentum must be >= 0");
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
  }
};

struct EpochStats {
  int epoch = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_loss = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

// Dense ReLU network with three weight stages (d → D1 → D2 → C), trained end to end.
struct MlpWeights {
  std::array<Matrix, 3> W;
  std::array<Vector, 3> b;
  ClassId fallback_class = 0;

  std::array<Index, 4> sizes() const { return {W[0].cols(), W[0].rows(), W[1].rows(), W[2].rows()}; }
};

struct MlpGradients {
  std::array<Matrix, 3> W;
  std::array<Vector, 3> b;
  double loss = 0.0;
};

inline MlpWeights weights_from(const FFNetwork& net) {
  MlpWeights w;
  w.W = {net.W1, net.W2, net.W3};
  w.b = {net.b1, net.b2, net.b3};
  w.fallback_class = net.fallback_class;
  return w;
}

// Glorot/Xavier uniform weights in ±sqrt(6 / (fan_in + fan_out)); zero biases.
inline MlpWeights xavier_uniform(const std::array<Index, 4>& sizes, Seed seed, ClassId fallback_class = 0) {
  for (Index s : sizes)
    if (s < 1) throw ParameterError("layer sizes must be >= 1");
  std::mt19937_64 rng(seed);
  MlpWeights w;
  for (std::size_t k = 0; k < 3; ++k) {
    const Index fan_in = sizes[k];
    const Index fan_out = sizes[k + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    w.W[k].resize(fan_out, fan_in);
    for (Index r = 0; r < fan_out; ++r)
      for (Index c = 0; c < fan_in; ++c) w.W[k](r, c) = u(rng);
    w.b[k] = Vector::Zero(fan_out);
  }
  w.fallback_class = fallback_class;
  return w;
}

struct BatchForward {
  Matrix z1, a1, z2, a2, logits;  // one row per sample
};

inline BatchForward forward_batch(const MlpWeights& w, const Matrix& x) {
  if (x.cols() != w.W[0].cols())
    throw ParameterError("input dimension " + std::to_string(x.cols()) + " does not match network input " +
                         std::to_string(w.W[0].cols()));
  BatchForward f;
  f.z1 = (x * w.W[0].transpose()).rowwise() + w.b[0].transpose();
  f.a1 = f.z1.cwiseMax(0.0);
  f.z2 = (f.a1 * w.W[1].transpose()).rowwise() + w.b[1].transpose();
  f.a2 = f.z2.cwiseMax(0.0);
  f.logits = (f.a2 * w.W[2].transpose()).rowwise() + w.b[2].transpose();
  return f;
}

// Mean softmax cross-entropy over the batch and its exact gradient. ReLU'(0) = 0.
inline MlpGradients gradients(const MlpWeights& w, const Matrix& x, const std::vector<ClassId>& y) {
  const Index n = x.rows();
  if (n == 0) throw ParameterError("gradients need a nonempty batch");
  if (static_cast<Index>(y.size()) != n) throw ParameterError("label count does not match batch size");
  const BatchForward f = forward_batch(w, x);
  const Index C = f.logits.cols();
  Matrix delta3(n, C);
  double loss = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double top = f.logits.row(i).maxCoeff();
    const double lse = top + std::log((f.logits.row(i).array() - top).exp().sum());
    const ClassId target = y[static_cast<std::size_t>(i)];
    if (target < 0 || target >= C) throw ParameterError("label out of range for the output layer");
    loss += lse - f.logits(i, target);
    delta3.row(i) = (f.logits.row(i).array() - lse).exp();
    delta3(i, target) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  delta3 *= inv_n;

  MlpGradients g;
  g.loss = loss * inv_n;
  g.W[2] = delta3.transpose() * f.a2;
  g.b[2] = delta3.colwise().sum().transpose();
  const Matrix delta2 = (delta3 * w.W[2]).cwiseProduct((f.z2.array() > 0.0).cast<double>().matrix());
  g.W[1] = delta2.transpose() * f.a1;
  g.b[1] = delta2.colwise().sum().transpose();
  const Matrix delta1 = (delta2 * w.W[1]).cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());
  g.W[0] = delta1.transpose() * x;
  g.b[0] = delta1.colwise().sum().transpose();
  return g;
}

inline double mean_loss(const MlpWeights& w, const Matrix& x, const std::vector<ClassId>& y) {
  return gradients(w, x, y).loss;
}

inline std::vector<ClassId> predict_batch(const MlpWeights& w, const Matrix& x) {
  const BatchForward f = forward_batch(w, x);
  std::vector<ClassId> out(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = decide(f.logits.row(i).transpose(), w.fallback_class);
  return out;
}

inline double accuracy(const MlpWeights& w, const LabeledDataset& ds) {
  if (ds.size() == 0) return 0.0;
  const auto pred = predict_batch(w, ds.samples);
  Index hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == ds.labels[i];
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

struct TrainResult {
  MlpWeights weights;
  TrainHistory history;
};

// Mini-batch SGD with optional momentum on the softmax cross-entropy. The sample order
// of every epoch is a fresh shuffle from an RNG seeded by (seed, epoch).
inline TrainResult train_bp(MlpWeights init, const LabeledDataset& train, const LabeledDataset& test,
                            const TrainConfig& cfg) {
  cfg.validate();
  if (train.size() == 0) throw DataError("training set is empty");
  if (train.dim() != init.W[0].cols())
    throw ParameterError("training data dimension does not match the network input");
  if (train.class_count != init.W[2].rows())
    throw ParameterError("class count does not match the network output");

  TrainResult result{std::move(init), {}};
  MlpWeights& w = result.weights;
  std::array<Matrix, 3> vW;
  std::array<Vector, 3> vb;
  for (std::size_t k = 0; k < 3; ++k) {
    vW[k] = Matrix::Zero(w.W[k].rows(), w.W[k].cols());
    vb[k] = Vector::Zero(w.b[k].size());
  }
  const Index n = train.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  Matrix xb;
  std::vector<ClassId> yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Index{0});
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int batches = 0;
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index m = std::min<Index>(cfg.batch_size, n - start);
      xb.resize(m, train.dim());
      yb.resize(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) {
        const Index src = order[static_cast<std::size_t>(start + i)];
        xb.row(i) = train.samples.row(src);
        yb[static_cast<std::size_t>(i)] = train.labels[static_cast<std::size_t>(src)];
      }
      const MlpGradients g = gradients(w, xb, yb);
      if (!std::isfinite(g.loss))
        throw NumericError("backprop diverged (non-finite loss) in epoch " + std::to_string(epoch + 1));
      loss_sum += g.loss;
      ++batches;
      for (std::size_t k = 0; k < 3; ++k) {
        vW[k] = cfg.momentum * vW[k] - cfg.learning_rate * g.W[k];
        vb[k] = cfg.momentum * vb[k] - cfg.learning_rate * g.b[k];
        w.W[k] += vW[k];
        w.b[k] += vb[k];
      }
    }
    EpochStats s;
    s.epoch = epoch + 1;
    s.mean_loss = loss_sum / batches;
    s.train_accuracy = accuracy(w, train);
    s.test_accuracy = accuracy(w, test);
    result.history.push_back(s);
  }
  return result;
}

}  // namespace ffmlp
