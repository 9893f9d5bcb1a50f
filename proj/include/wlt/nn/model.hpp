// SPDX-License-Identifier: Apache-2.0
//
// WLT-GNN model: a layout string over {g, r}, jumping-knowledge readout of
// every g layer, an MLP head, and softmax cross-entropy with exact backward
// passes.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wlt/graph.hpp"
#include "wlt/nn/layers.hpp"
#include "wlt/nn/matrix.hpp"

namespace wlt::nn {

struct ModelConfig {
  std::string layout = "gggrgg";
  int input_dim = 1;
  int hidden_dim = 32;
  int class_count = 2;
  RecolorFraction recolor_fraction = RecolorFraction::SingleNode;
  EpsilonMode epsilon_mode = EpsilonMode::Fixed0;
  BiasInit bias_init = BiasInit::Zero;
  double rounding_precision = 1e-6;

  int gin_layer_count() const {
    return static_cast<int>(std::count(layout.begin(), layout.end(), 'g'));
  }
};

inline void validate(const ModelConfig& cfg) {
  if (cfg.layout.find_first_not_of("gr") != std::string::npos) {
    throw std::invalid_argument("layout may only contain 'g' and 'r': \"" + cfg.layout + "\"");
  }
  if (cfg.gin_layer_count() == 0) throw std::invalid_argument("layout needs at least one 'g'");
  if (cfg.input_dim < 1 || cfg.hidden_dim < 1 || cfg.class_count < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (!(cfg.rounding_precision > 0.0)) throw std::invalid_argument("rounding precision must be positive");
}

struct ModelParams {
  std::vector<GinLayerParams> gin;  // one per 'g', in layout order
  std::vector<double> jk_weights;   // one per 'g'
  MlpParams head;
};

/// Glorot weights, biases per cfg.bias_init, epsilon 0, JK weights 1.
inline ModelParams init_params(const ModelConfig& cfg, std::mt19937_64& rng) {
  validate(cfg);
  ModelParams p;
  int dim = cfg.input_dim;
  for (char layer : cfg.layout) {
    if (layer != 'g') continue;
    GinLayerParams gin;
    gin.epsilon_mode = cfg.epsilon_mode;
    gin.mlp = glorot_mlp(dim, cfg.hidden_dim, cfg.hidden_dim, rng, cfg.bias_init);
    p.gin.push_back(std::move(gin));
    dim = cfg.hidden_dim;
  }
  p.jk_weights.assign(p.gin.size(), 1.0);
  p.head = glorot_mlp(cfg.hidden_dim, cfg.hidden_dim, cfg.class_count, rng, cfg.bias_init);
  return p;
}

namespace detail {

inline void zero_fill(LinearParams& p) {
  for (double& w : p.weight.values()) w = 0.0;
  std::fill(p.bias.begin(), p.bias.end(), 0.0);
}

inline void zero_fill(MlpParams& p) {
  zero_fill(p.first);
  zero_fill(p.second);
}

}  // namespace detail

inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  for (auto& gin : z.gin) {
    gin.epsilon = 0.0;
    detail::zero_fill(gin.mlp);
  }
  std::fill(z.jk_weights.begin(), z.jk_weights.end(), 0.0);
  detail::zero_fill(z.head);
  return z;
}

/// Calls f(name, span) for every trainable tensor in a fixed order. A
/// Fixed0 epsilon is not trainable and is skipped.
template <typename Params, typename F>
  requires std::same_as<std::remove_const_t<Params>, ModelParams>
void for_each_tensor(Params& p, F&& f) {
  auto linear = [&](std::string prefix, auto& lin) {
    f(prefix + ".weight", lin.weight.values());
    f(prefix + ".bias", std::span(lin.bias));
  };
  for (std::size_t l = 0; l < p.gin.size(); ++l) {
    const std::string prefix = "gin" + std::to_string(l);
    if (p.gin[l].epsilon_mode == EpsilonMode::Trainable) f(prefix + ".epsilon", std::span(&p.gin[l].epsilon, 1));
    linear(prefix + ".mlp.0", p.gin[l].mlp.first);
    linear(prefix + ".mlp.1", p.gin[l].mlp.second);
  }
  f(std::string("jk_weights"), std::span(p.jk_weights));
  linear("head.0", p.head.first);
  linear("head.1", p.head.second);
}

struct ForwardTrace {
  std::vector<char> kinds;                 // layout characters
  std::vector<GinCache> gin;               // per g layer
  std::vector<Matrix> gin_outputs;         // per g layer
  std::vector<std::vector<Node>> recolored;  // per r layer
  std::vector<double> embedding;
  MlpCache head;
};

namespace detail {

inline std::vector<double> forward(const ModelConfig& cfg, const ModelParams& params, const Graph& g,
                                   const Matrix& x0, std::mt19937_64& rng, ForwardTrace* trace) {
  validate(cfg);
  if (static_cast<int>(params.gin.size()) != cfg.gin_layer_count()) {
    throw ShapeError("parameter count does not match layout");
  }
  require_shape(x0, g.size(), cfg.input_dim, "initial features");
  Matrix h = x0;
  std::vector<Matrix> outputs;
  std::size_t gin_index = 0;
  for (char layer : cfg.layout) {
    if (trace) trace->kinds.push_back(layer);
    if (layer == 'g') {
      GinCache cache;
      h = gin_layer_forward(params.gin[gin_index++], g, h, trace ? &cache : nullptr);
      if (trace) trace->gin.push_back(std::move(cache));
      outputs.push_back(h);
    } else {
      auto rc = recolor_layer(g, h, cfg.recolor_fraction, rng, cfg.rounding_precision);
      h = std::move(rc.features);
      if (trace) trace->recolored.push_back(std::move(rc.recolored));
    }
  }
  std::vector<double> embedding = jk_readout(outputs, params.jk_weights);
  Matrix e(1, static_cast<int>(embedding.size()));
  std::copy(embedding.begin(), embedding.end(), e.values().begin());
  if (params.head.in_dim() != e.cols()) throw ShapeError("head input dimension mismatch");
  Matrix logits = mlp_forward(params.head, e, trace ? &trace->head : nullptr);
  if (trace) {
    trace->gin_outputs = std::move(outputs);
    trace->embedding = std::move(embedding);
  }
  return {logits.values().begin(), logits.values().end()};
}

}  // namespace detail

/// Class logits for one graph; softmax is left to the loss.
inline std::vector<double> model_forward(const ModelConfig& cfg, const ModelParams& params,
                                         const Graph& g, const Matrix& x0, std::mt19937_64& rng) {
  return detail::forward(cfg, params, g, x0, rng, nullptr);
}

inline std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - top));
  for (double& v : p) v /= z;
  return p;
}

/// -log softmax(logits)[label], computed with log-sum-exp.
inline double cross_entropy(std::span<const double> logits, int label) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - top);
  return top + std::log(z) - logits[label];
}

struct LabeledGraph {
  Graph graph;
  Matrix features;
  int label = 0;
};

struct LossAndGrads {
  double loss = 0.0;  // mean over the batch
  ModelParams grads;
  int correct = 0;
};

/// Mean softmax cross-entropy and its exact gradient. Recoloring acts as a
/// constant mask: zeroed rows pass no gradient.
inline LossAndGrads loss_and_grads(const ModelConfig& cfg, const ModelParams& params,
                                   std::span<const LabeledGraph> batch, std::mt19937_64& rng) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  LossAndGrads out{0.0, zeros_like(params), 0};
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto& sample : batch) {
    if (sample.label < 0 || sample.label >= cfg.class_count) throw std::invalid_argument("label out of range");
    ForwardTrace trace;
    auto logits = detail::forward(cfg, params, sample.graph, sample.features, rng, &trace);
    out.loss += cross_entropy(logits, sample.label) * scale;
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (best == sample.label) ++out.correct;

    auto prob = softmax(logits);
    Matrix grad_logits(1, static_cast<int>(logits.size()));
    for (std::size_t c = 0; c < prob.size(); ++c) {
      grad_logits(0, static_cast<int>(c)) = (prob[c] - (static_cast<int>(c) == sample.label ? 1.0 : 0.0)) * scale;
    }
    Matrix grad_embedding = mlp_backward(params.head, trace.head, grad_logits, out.grads.head);

    // JK: d/dw_l = <grad_e, colsum(H_l)>, d/dH_l[v] = w_l * grad_e.
    const int n = sample.graph.size();
    std::vector<Matrix> grad_from_jk;
    for (std::size_t l = 0; l < trace.gin_outputs.size(); ++l) {
      auto sums = trace.gin_outputs[l].column_sums();
      double dw = 0.0;
      for (std::size_t c = 0; c < sums.size(); ++c) dw += grad_embedding(0, static_cast<int>(c)) * sums[c];
      out.grads.jk_weights[l] += dw;
      Matrix gh(n, static_cast<int>(sums.size()));
      for (int v = 0; v < n; ++v)
        for (int c = 0; c < gh.cols(); ++c) gh(v, c) = params.jk_weights[l] * grad_embedding(0, c);
      grad_from_jk.push_back(std::move(gh));
    }

    int gin_index = static_cast<int>(trace.gin.size());
    int recolor_index = static_cast<int>(trace.recolored.size());
    Matrix grad;  // w.r.t. the output of the current layer
    for (auto it = trace.kinds.rbegin(); it != trace.kinds.rend(); ++it) {
      if (*it == 'g') {
        --gin_index;
        Matrix& contribution = grad_from_jk[gin_index];
        if (grad.rows() == 0) {
          grad = contribution;
        } else {
          auto gv = grad.values();
          auto cv = contribution.values();
          for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += cv[i];
        }
        grad = gin_layer_backward(params.gin[gin_index], sample.graph, trace.gin[gin_index], grad,
                                  out.grads.gin[gin_index]);
      } else {
        --recolor_index;
        if (grad.rows() == 0) continue;  // trailing r: nothing downstream reads it
        for (Node v : trace.recolored[recolor_index])
          for (double& value : grad.row(v)) value = 0.0;
      }
    }
  }
  return out;
}

}  // namespace wlt::nn
