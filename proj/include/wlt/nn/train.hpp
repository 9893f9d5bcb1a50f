// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlt/nn/model.hpp"

namespace wlt::nn {

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.01;
  double lr_decay = 0.5;  // multiplier applied every `decay_period` epochs
  int decay_period = 50;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

inline void validate(const TrainConfig& t) {
  if (t.epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (!(t.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (t.decay_period < 1) throw std::invalid_argument("decay period must be positive");
  if (t.batch_size < 1) throw std::invalid_argument("batch size must be positive");
}

/// Step schedule with 1-based epochs: epochs 1..period use the base rate.
inline double scheduled_learning_rate(const TrainConfig& t, int epoch) {
  const int decays = (epoch - 1) / t.decay_period;
  return t.learning_rate * std::pow(t.lr_decay, decays);
}

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  long step = 0;
};

/// One bias-corrected Adam update: p -= lr * m_hat / (sqrt(v_hat) + eps).
inline void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
                      const TrainConfig& t) {
  std::vector<std::span<const double>> g;
  for_each_tensor(grads, [&](const std::string&, std::span<const double> s) { g.push_back(s); });
  std::vector<std::span<double>> p;
  for_each_tensor(params, [&](const std::string&, std::span<double> s) { p.push_back(s); });
  if (g.size() != p.size()) throw ShapeError("gradient tensor count mismatch");
  if (state.first_moment.empty()) {
    for (auto s : p) {
      state.first_moment.emplace_back(s.size(), 0.0);
      state.second_moment.emplace_back(s.size(), 0.0);
    }
  }
  if (state.first_moment.size() != p.size()) throw ShapeError("optimizer state tensor count mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(t.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(t.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k].size() != p[k].size() || state.first_moment[k].size() != p[k].size()) {
      throw ShapeError("gradient shape mismatch");
    }
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      m[i] = t.beta1 * m[i] + (1.0 - t.beta1) * g[k][i];
      v[i] = t.beta2 * v[i] + (1.0 - t.beta2) * g[k][i] * g[k][i];
      p[k][i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + t.adam_epsilon);
    }
  }
}

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochMetrics> history;

  double final_accuracy() const { return history.empty() ? 0.0 : history.back().train_accuracy; }
};

/// Mean loss and accuracy over the whole set; recoloring draws from `rng`.
inline EpochMetrics evaluate(const ModelConfig& cfg, const ModelParams& params,
                             std::span<const LabeledGraph> data, std::mt19937_64& rng) {
  EpochMetrics m;
  int correct = 0;
  for (const auto& sample : data) {
    auto logits = model_forward(cfg, params, sample.graph, sample.features, rng);
    m.loss += cross_entropy(logits, sample.label);
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (best == sample.label) ++correct;
  }
  m.loss /= static_cast<double>(data.size());
  m.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return m;
}

/// Mini-batch Adam. A single generator seeded from `t.seed` drives
/// initialization, shuffling and recoloring, so runs repeat exactly. After
/// each epoch the whole set is re-evaluated for the metrics row.
inline TrainResult train(std::span<const LabeledGraph> data, const ModelConfig& cfg,
                         const TrainConfig& t) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  validate(cfg);
  validate(t);
  std::mt19937_64 rng(t.seed);
  TrainResult result{init_params(cfg, rng), {}};
  AdamState adam;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledGraph> batch;
  for (int epoch = 1; epoch <= t.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = scheduled_learning_rate(t, epoch);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(t.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(t.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      auto lg = loss_and_grads(cfg, result.params, batch, rng);
      adam_step(result.params, lg.grads, adam, lr, t);
    }
    EpochMetrics m = evaluate(cfg, result.params, data, rng);
    m.epoch = epoch;
    result.history.push_back(m);
  }
  return result;
}

/// "epoch,loss,train_accuracy" with fixed formatting.
inline std::string metrics_csv(std::span<const EpochMetrics> history) {
  std::string out = "epoch,loss,train_accuracy\n";
  char line[96];
  for (const auto& m : history) {
    std::snprintf(line, sizeof line, "%d,%.12g,%.6f\n", m.epoch, m.loss, m.train_accuracy);
    out += line;
  }
  return out;
}

}  // namespace wlt::nn
