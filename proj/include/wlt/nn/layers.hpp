// SPDX-License-Identifier: Apache-2.0
//
// Layers of the WLT-GNN: two-layer MLPs, the GIN update, the recoloring
// layer and the jumping-knowledge readout. Every trainable layer has a
// matching backward pass that accumulates into a gradient struct of the same
// shape as its parameters.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "wlt/graph.hpp"
#include "wlt/nn/matrix.hpp"

namespace wlt::nn {

struct LinearParams {
  Matrix weight;  // out x in
  std::vector<double> bias;

  int in_dim() const { return weight.cols(); }
  int out_dim() const { return weight.rows(); }
};

/// Affine -> ReLU -> affine.
struct MlpParams {
  LinearParams first;
  LinearParams second;

  int in_dim() const { return first.in_dim(); }
  int out_dim() const { return second.out_dim(); }
};

enum class EpsilonMode { Fixed0, Trainable };

struct GinLayerParams {
  double epsilon = 0.0;
  EpsilonMode epsilon_mode = EpsilonMode::Fixed0;
  MlpParams mlp;
};

inline LinearParams zero_linear(int in, int out) { return {Matrix(out, in), std::vector<double>(out, 0.0)}; }
inline MlpParams zero_mlp(int in, int hidden, int out) { return {zero_linear(in, hidden), zero_linear(hidden, out)}; }

enum class BiasInit { Zero, FanInUniform };

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)). FanInUniform biases are
/// uniform in +-1/sqrt(fan_in), drawn after the weights.
inline LinearParams glorot_linear(int in, int out, std::mt19937_64& rng, BiasInit bias = BiasInit::Zero) {
  LinearParams p = zero_linear(in, out);
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : p.weight.values()) w = dist(rng);
  if (bias == BiasInit::FanInUniform) {
    const double b = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> bias_dist(-b, b);
    for (double& v : p.bias) v = bias_dist(rng);
  }
  return p;
}

inline MlpParams glorot_mlp(int in, int hidden, int out, std::mt19937_64& rng, BiasInit bias = BiasInit::Zero) {
  MlpParams p;
  p.first = glorot_linear(in, hidden, rng, bias);
  p.second = glorot_linear(hidden, out, rng, bias);
  return p;
}

inline std::string_view to_string(BiasInit b) { return b == BiasInit::Zero ? "zero" : "fan-in"; }

// ---------------------------------------------------------------------------
// Linear / MLP

inline Matrix linear_forward(const LinearParams& p, const Matrix& x) {
  if (x.cols() != p.in_dim()) throw ShapeError("linear input dimension mismatch");
  Matrix y(x.rows(), p.out_dim());
  for (int r = 0; r < x.rows(); ++r) {
    for (int o = 0; o < p.out_dim(); ++o) {
      double acc = p.bias[o];
      for (int i = 0; i < p.in_dim(); ++i) acc += p.weight(o, i) * x(r, i);
      y(r, o) = acc;
    }
  }
  return y;
}

// Accumulates weight/bias gradients into `grads` and returns d(loss)/dx.
inline Matrix linear_backward(const LinearParams& p, const Matrix& x, const Matrix& grad_out,
                              LinearParams& grads) {
  Matrix grad_in(x.rows(), p.in_dim());
  for (int r = 0; r < x.rows(); ++r) {
    for (int o = 0; o < p.out_dim(); ++o) {
      const double g = grad_out(r, o);
      if (g == 0.0) continue;
      grads.bias[o] += g;
      for (int i = 0; i < p.in_dim(); ++i) {
        grads.weight(o, i) += g * x(r, i);
        grad_in(r, i) += g * p.weight(o, i);
      }
    }
  }
  return grad_in;
}

struct MlpCache {
  Matrix input;
  Matrix pre_activation;
  Matrix hidden;
};

inline Matrix mlp_forward(const MlpParams& p, const Matrix& x, MlpCache* cache = nullptr) {
  Matrix pre = linear_forward(p.first, x);
  Matrix hidden = pre;
  for (double& v : hidden.values()) v = std::max(v, 0.0);
  Matrix out = linear_forward(p.second, hidden);
  if (cache) *cache = {x, std::move(pre), std::move(hidden)};
  return out;
}

inline Matrix mlp_backward(const MlpParams& p, const MlpCache& cache, const Matrix& grad_out,
                           MlpParams& grads) {
  Matrix grad_hidden = linear_backward(p.second, cache.hidden, grad_out, grads.second);
  auto pre = cache.pre_activation.values();
  auto gh = grad_hidden.values();
  for (std::size_t i = 0; i < gh.size(); ++i)
    if (pre[i] <= 0.0) gh[i] = 0.0;
  return linear_backward(p.first, cache.input, grad_hidden, grads.first);
}

// ---------------------------------------------------------------------------
// GIN

/// (1 + eps) h_v + sum over neighbors of h_u, row by row.
inline Matrix gin_aggregate(const Graph& g, const Matrix& x, double epsilon) {
  if (x.rows() != g.size()) throw ShapeError("feature rows do not match node count");
  Matrix z(x.rows(), x.cols());
  for (Node v = 0; v < g.size(); ++v) {
    auto out = z.row(v);
    auto self = x.row(v);
    for (int c = 0; c < x.cols(); ++c) out[c] = (1.0 + epsilon) * self[c];
    for (Node u : g.neighbors(v)) {
      auto nb = x.row(u);
      for (int c = 0; c < x.cols(); ++c) out[c] += nb[c];
    }
  }
  return z;
}

struct GinCache {
  Matrix input;
  MlpCache mlp;
};

inline Matrix gin_layer_forward(const GinLayerParams& p, const Graph& g, const Matrix& x,
                                GinCache* cache = nullptr) {
  if (x.cols() != p.mlp.in_dim()) throw ShapeError("GIN input dimension mismatch");
  const double eps = p.epsilon_mode == EpsilonMode::Fixed0 ? 0.0 : p.epsilon;
  Matrix z = gin_aggregate(g, x, eps);
  if (!cache) return mlp_forward(p.mlp, z);
  cache->input = x;
  return mlp_forward(p.mlp, z, &cache->mlp);
}

inline Matrix gin_layer_backward(const GinLayerParams& p, const Graph& g, const GinCache& cache,
                                 const Matrix& grad_out, GinLayerParams& grads) {
  Matrix grad_z = mlp_backward(p.mlp, cache.mlp, grad_out, grads.mlp);
  const double eps = p.epsilon_mode == EpsilonMode::Fixed0 ? 0.0 : p.epsilon;
  if (p.epsilon_mode == EpsilonMode::Trainable) {
    auto gz = grad_z.values();
    auto in = cache.input.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < gz.size(); ++i) acc += gz[i] * in[i];
    grads.epsilon += acc;
  }
  // The aggregation operator is (1 + eps) I + A with A symmetric.
  return gin_aggregate(g, grad_z, eps);
}

// ---------------------------------------------------------------------------
// Recoloring

enum class RecolorFraction { SingleNode, Half };

inline std::string_view to_string(RecolorFraction f) {
  return f == RecolorFraction::SingleNode ? "single" : "half";
}

struct RecolorResult {
  Matrix features;
  std::vector<Node> selected_class;  // sorted; empty when the partition is discrete
  std::vector<Node> recolored;       // sorted
};

/// Groups nodes by message (rows rounded to `precision`), selects the class
/// with the lexicographically largest (size, message) key and zeroes one
/// node (SingleNode) or ceil(size / 2) nodes (Half) of it, drawn uniformly.
/// A discrete partition is returned unchanged.
inline RecolorResult recolor_layer(const Graph& g, const Matrix& x, RecolorFraction fraction,
                                   std::mt19937_64& rng, double precision = 1e-6) {
  if (x.rows() != g.size()) throw ShapeError("feature rows do not match node count");
  RecolorResult result{x, {}, {}};

  // Rounded row -> members (ascending node ids).
  std::map<std::vector<double>, std::vector<Node>> classes;
  for (Node v = 0; v < x.rows(); ++v) {
    std::vector<double> key(static_cast<std::size_t>(x.cols()));
    for (int c = 0; c < x.cols(); ++c) key[c] = std::round(x(v, c) / precision);
    classes[std::move(key)].push_back(v);
  }
  if (static_cast<int>(classes.size()) == x.rows()) return result;

  // Map iteration is ascending in the message, so on equal size the later
  // class has the larger key.
  const std::vector<Node>* chosen = nullptr;
  for (const auto& [message, members] : classes) {
    if (!chosen || members.size() >= chosen->size()) chosen = &members;
  }
  result.selected_class = *chosen;

  std::vector<Node> pool = *chosen;
  const std::size_t count = fraction == RecolorFraction::SingleNode ? 1 : (pool.size() + 1) / 2;
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  for (Node v : pool) {
    for (double& value : result.features.row(v)) value = 0.0;
  }
  result.recolored = std::move(pool);
  return result;
}

// ---------------------------------------------------------------------------
// Readout

/// sum_l weights[l] * (column sums of per_layer[l]).
inline std::vector<double> jk_readout(std::span<const Matrix> per_layer, std::span<const double> weights) {
  if (per_layer.size() != weights.size()) throw ShapeError("one JK weight per GIN layer required");
  if (per_layer.empty()) return {};
  const int dim = per_layer.front().cols();
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t l = 0; l < per_layer.size(); ++l) {
    if (per_layer[l].cols() != dim) throw ShapeError("JK layers must share a dimension");
    auto sums = per_layer[l].column_sums();
    for (int c = 0; c < dim; ++c) out[c] += weights[l] * sums[c];
  }
  return out;
}

}  // namespace wlt::nn
