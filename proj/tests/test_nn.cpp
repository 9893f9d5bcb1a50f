// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "wlt/nn/train.hpp"

namespace {

using namespace wlt;
using namespace wlt::nn;

LinearParams identity_linear(int n) {
  LinearParams p = zero_linear(n, n);
  for (int i = 0; i < n; ++i) p.weight(i, i) = 1.0;
  return p;
}

GinLayerParams identity_gin(int dim, EpsilonMode mode = EpsilonMode::Fixed0, double eps = 0.0) {
  return {eps, mode, {identity_linear(dim), identity_linear(dim)}};
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = d(rng);
  return m;
}

Matrix permute_rows(const Matrix& x, const Permutation& p) {
  Matrix out(x.rows(), x.cols());
  for (int v = 0; v < x.rows(); ++v)
    for (int c = 0; c < x.cols(); ++c) out(p(v), c) = x(v, c);
  return out;
}

Matrix one_hot_degrees(const Graph& g, int dim) {
  Matrix x(g.size(), dim);
  for (Node v = 0; v < g.size(); ++v) x(v, g.degree(v)) = 1.0;
  return x;
}

TEST(Gin, IdentityMlpOnTriangle) {
  Graph k3 = graphs::complete(3);
  Matrix out = gin_layer_forward(identity_gin(1), k3, Matrix(3, 1, 1.0));
  for (int v = 0; v < 3; ++v) EXPECT_DOUBLE_EQ(out(v, 0), 3.0);
}

TEST(Gin, TrainableEpsilonOnIsolatedNode) {
  Matrix out = gin_layer_forward(identity_gin(1, EpsilonMode::Trainable, 1.0), graphs::empty(1), Matrix(1, 1, 2.5));
  EXPECT_DOUBLE_EQ(out(0, 0), 5.0);
}

TEST(Gin, Fixed0IgnoresStoredEpsilon) {
  Matrix out = gin_layer_forward(identity_gin(1, EpsilonMode::Fixed0, 7.0), graphs::empty(1), Matrix(1, 1, 2.5));
  EXPECT_DOUBLE_EQ(out(0, 0), 2.5);
}

TEST(Gin, RejectsDimensionMismatch) {
  EXPECT_THROW(gin_layer_forward(identity_gin(2), graphs::complete(3), Matrix(3, 1)), ShapeError);
  EXPECT_THROW(gin_layer_forward(identity_gin(1), graphs::complete(3), Matrix(2, 1)), ShapeError);
}

TEST(Gin, PermutationEquivariant) {
  std::mt19937_64 rng(3);
  Graph g = build_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {3, 4}, {4, 5}});
  Permutation p({4, 0, 5, 2, 1, 3});
  GinLayerParams params{0.3, EpsilonMode::Trainable, glorot_mlp(3, 5, 4, rng)};
  Matrix x = random_matrix(6, 3, rng);
  Matrix a = permute_rows(gin_layer_forward(params, g, x), p);
  Matrix b = gin_layer_forward(params, apply_permutation(g, p), permute_rows(x, p));
  for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-9);
}

TEST(Recolor, SingleClassLosesOneRow) {
  std::mt19937_64 rng(1);
  Matrix x(6, 2, 0.25);
  auto r = recolor_layer(graphs::cycle(6), x, RecolorFraction::SingleNode, rng);
  ASSERT_EQ(r.recolored.size(), 1u);
  EXPECT_EQ(r.selected_class.size(), 6u);
  int zero_rows = 0;
  for (int v = 0; v < 6; ++v) {
    const bool zero = r.features(v, 0) == 0.0 && r.features(v, 1) == 0.0;
    zero_rows += zero;
    if (!zero) {
      EXPECT_EQ(r.features(v, 0), 0.25);
    }
  }
  EXPECT_EQ(zero_rows, 1);
}

TEST(Recolor, LargerClassWinsOverLargerMessage) {
  std::mt19937_64 rng(2);
  Matrix x(6, 1);
  const double values[] = {5.0, 3.0, 3.0, 5.0, 3.0, 3.0};
  for (int v = 0; v < 6; ++v) x(v, 0) = values[v];
  auto r = recolor_layer(graphs::cycle(6), x, RecolorFraction::SingleNode, rng);
  EXPECT_EQ(r.selected_class, (std::vector<Node>{1, 2, 4, 5}));
  ASSERT_EQ(r.recolored.size(), 1u);
  EXPECT_EQ(x(r.recolored[0], 0), 3.0);
}

TEST(Recolor, EqualSizesBrokenByMessage) {
  std::mt19937_64 rng(2);
  Matrix x(4, 1);
  const double values[] = {1.0, 2.0, 1.0, 2.0};
  for (int v = 0; v < 4; ++v) x(v, 0) = values[v];
  auto r = recolor_layer(graphs::cycle(4), x, RecolorFraction::SingleNode, rng);
  EXPECT_EQ(r.selected_class, (std::vector<Node>{1, 3}));
}

TEST(Recolor, DiscretePartitionIsIdentity) {
  std::mt19937_64 rng(3);
  Matrix x(3, 1);
  x(0, 0) = 1.0;
  x(1, 0) = 2.0;
  x(2, 0) = 3.0;
  auto r = recolor_layer(graphs::path(3), x, RecolorFraction::Half, rng);
  EXPECT_EQ(r.features, x);
  EXPECT_TRUE(r.recolored.empty());
  EXPECT_TRUE(r.selected_class.empty());
}

TEST(Recolor, HalfRoundsUp) {
  std::mt19937_64 rng(4);
  Matrix x(3, 1, 1.0);
  auto r = recolor_layer(graphs::complete(3), x, RecolorFraction::Half, rng);
  EXPECT_EQ(r.recolored.size(), 2u);
  Matrix y(6, 1, 1.0);
  EXPECT_EQ(recolor_layer(graphs::cycle(6), y, RecolorFraction::Half, rng).recolored.size(), 3u);
}

TEST(Recolor, GroupsAfterRounding) {
  std::mt19937_64 rng(5);
  Matrix x(3, 1);
  x(0, 0) = 1.0;
  x(1, 0) = 1.0 + 1e-9;
  x(2, 0) = 2.0;
  auto r = recolor_layer(graphs::path(3), x, RecolorFraction::SingleNode, rng);
  EXPECT_EQ(r.selected_class, (std::vector<Node>{0, 1}));
}

TEST(Recolor, VictimsAreRoughlyUniform) {
  std::mt19937_64 rng(6);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 6000; ++i) {
    auto r = recolor_layer(graphs::cycle(6), Matrix(6, 1, 1.0), RecolorFraction::SingleNode, rng);
    hits[r.recolored[0]]++;
  }
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
}

TEST(Recolor, SelectedClassCorrespondsUnderRelabeling) {
  std::mt19937_64 rng(7);
  Graph g = build_graph(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 0}, {0, 3}});
  GinLayerParams params{0.0, EpsilonMode::Fixed0, glorot_mlp(4, 4, 4, rng)};
  Matrix x = gin_layer_forward(params, g, one_hot_degrees(g, 4));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Node> m(7);
    std::iota(m.begin(), m.end(), 0);
    std::shuffle(m.begin(), m.end(), rng);
    Permutation p(m);
    Graph h = apply_permutation(g, p);
    Matrix y = gin_layer_forward(params, h, one_hot_degrees(h, 4));
    auto a = recolor_layer(g, x, RecolorFraction::SingleNode, rng);
    auto b = recolor_layer(h, y, RecolorFraction::SingleNode, rng);
    std::vector<Node> mapped;
    for (Node v : a.selected_class) mapped.push_back(p(v));
    std::sort(mapped.begin(), mapped.end());
    EXPECT_EQ(mapped, b.selected_class);
  }
}

TEST(Readout, Examples) {
  Matrix a(2, 2, 1.0);
  Matrix b(2, 2, 2.0);
  std::vector<Matrix> one{a};
  EXPECT_EQ(jk_readout(one, std::vector<double>{1.0}), (std::vector<double>{2.0, 2.0}));
  std::vector<Matrix> two{a, b};
  EXPECT_EQ(jk_readout(two, std::vector<double>{0.0, 0.0}), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(jk_readout(two, std::vector<double>{1.0, 1.0}), (std::vector<double>{6.0, 6.0}));
  EXPECT_THROW(jk_readout(two, std::vector<double>{1.0}), ShapeError);
}

TEST(Model, ZeroHeadGivesZeroLogits) {
  std::mt19937_64 rng(8);
  ModelConfig cfg;
  cfg.layout = "g";
  cfg.input_dim = 3;
  cfg.hidden_dim = 4;
  ModelParams p = init_params(cfg, rng);
  p.head = zero_mlp(4, 4, 2);
  Graph g = graphs::path(3);
  auto logits = model_forward(cfg, p, g, one_hot_degrees(g, 3), rng);
  EXPECT_EQ(logits, (std::vector<double>{0.0, 0.0}));
}

TEST(Model, ValidatesLayoutAndShapes) {
  ModelConfig cfg;
  cfg.layout = "gx";
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg.layout = "rr";
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg.layout = "g";
  cfg.hidden_dim = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg.hidden_dim = 4;
  cfg.input_dim = 2;
  std::mt19937_64 rng(0);
  auto p = init_params(cfg, rng);
  EXPECT_THROW(model_forward(cfg, p, graphs::path(3), Matrix(3, 3), rng), ShapeError);
}

TEST(Model, AllGinLayoutCannotSeparateWlEquivalentGraphs) {
  Graph c6 = graphs::cycle(6);
  Graph tt = graphs::two_cycles(3, 3);
  ModelConfig cfg;
  cfg.layout = "ggggg";
  cfg.input_dim = 3;
  cfg.hidden_dim = 8;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    ModelParams p = init_params(cfg, rng);
    auto a = model_forward(cfg, p, c6, one_hot_degrees(c6, 3), rng);
    auto b = model_forward(cfg, p, tt, one_hot_degrees(tt, 3), rng);
    for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-9);
  }
}

TEST(Model, PermutationInvariantWithoutRecoloring) {
  std::mt19937_64 rng(9);
  Graph g = build_graph(5, {{0, 1}, {1, 2}, {2, 3}, {1, 4}});
  Graph h = apply_permutation(g, Permutation({3, 4, 0, 1, 2}));
  ModelConfig cfg;
  cfg.layout = "ggg";
  cfg.input_dim = 4;
  cfg.hidden_dim = 6;
  ModelParams p = init_params(cfg, rng);
  auto a = model_forward(cfg, p, g, one_hot_degrees(g, 4), rng);
  auto b = model_forward(cfg, p, h, one_hot_degrees(h, 4), rng);
  for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-9);
}

TEST(Loss, UniformLogitsGiveLogOfClassCount) {
  for (int classes : {2, 3, 7}) {
    std::vector<double> logits(static_cast<std::size_t>(classes), 0.4);
    EXPECT_NEAR(cross_entropy(logits, 0), std::log(classes), 1e-12);
  }
}

TEST(Loss, ConfidentCorrectLogitsGiveNearZero) {
  std::vector<double> logits{50.0, 0.0};
  EXPECT_LT(cross_entropy(logits, 0), 1e-20);
  EXPECT_NEAR(cross_entropy(logits, 1), 50.0, 1e-9);
}

TEST(Loss, SoftmaxSumsToOne) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(-30.0, 30.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> logits(5);
    for (double& l : logits) l = d(rng);
    auto p = softmax(logits);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Gradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  ModelConfig cfg;
  cfg.layout = "grg";
  cfg.input_dim = 4;
  cfg.hidden_dim = 5;
  cfg.class_count = 3;
  cfg.epsilon_mode = EpsilonMode::Trainable;
  ModelParams p = init_params(cfg, rng);
  for (auto& gin : p.gin) gin.epsilon = 0.2;
  for_each_tensor(p, [&](const std::string& name, std::span<double> s) {
    if (name.ends_with(".bias")) {
      std::uniform_real_distribution<double> d(-0.3, 0.3);
      for (double& b : s) b = d(rng);
    }
  });
  std::vector<LabeledGraph> batch;
  for (const Graph& g : {graphs::path(5), graphs::star(3), graphs::cycle(4)}) {
    batch.push_back({g, one_hot_degrees(g, 4), static_cast<int>(batch.size())});
  }
  for (const auto& e : wlt::testing::finite_difference_errors(cfg, p, batch, 99)) {
    EXPECT_LT(e.relative_error, 1e-4) << e.name;
  }
}

TEST(Gradients, Fixed0EpsilonIsNotATensor) {
  std::mt19937_64 rng(12);
  ModelConfig cfg;
  cfg.layout = "gg";
  ModelParams p = init_params(cfg, rng);
  int count = 0;
  for_each_tensor(p, [&](const std::string& name, std::span<const double>) {
    EXPECT_EQ(name.find("epsilon"), std::string::npos);
    ++count;
  });
  EXPECT_EQ(count, 2 * 4 + 1 + 4);
}

TEST(Gradients, RejectsEmptyBatch) {
  std::mt19937_64 rng(13);
  ModelConfig cfg;
  ModelParams p = init_params(cfg, rng);
  EXPECT_THROW(loss_and_grads(cfg, p, std::vector<LabeledGraph>{}, rng), std::invalid_argument);
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  std::mt19937_64 rng(14);
  ModelConfig cfg;
  cfg.layout = "g";
  cfg.hidden_dim = 3;
  ModelParams p = init_params(cfg, rng);
  ModelParams before = p;
  AdamState state;
  TrainConfig t;
  for (int i = 0; i < 10; ++i) adam_step(p, zeros_like(p), state, 0.01, t);
  EXPECT_EQ(p.head.first.weight, before.head.first.weight);
  EXPECT_EQ(p.jk_weights, before.jk_weights);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::mt19937_64 rng(15);
  ModelConfig cfg;
  cfg.layout = "g";
  cfg.hidden_dim = 3;
  ModelParams p = init_params(cfg, rng);
  ModelParams g = zeros_like(p);
  g.jk_weights[0] = 0.37;
  AdamState state;
  TrainConfig t;
  adam_step(p, g, state, 0.01, t);
  EXPECT_NEAR(p.jk_weights[0], 1.0 - 0.01, 1e-9);
  EXPECT_EQ(state.step, 1);
}

TEST(Adam, RejectsShapeMismatch) {
  std::mt19937_64 rng(16);
  ModelConfig a;
  a.layout = "g";
  ModelConfig b;
  b.layout = "gg";
  ModelParams pa = init_params(a, rng);
  ModelParams pb = init_params(b, rng);
  AdamState state;
  EXPECT_THROW(adam_step(pa, pb, state, 0.01, TrainConfig{}), ShapeError);
}

TEST(Schedule, HalvesAfterFiftyEpochs) {
  TrainConfig t;
  t.learning_rate = 0.01;
  t.lr_decay = 0.5;
  t.decay_period = 50;
  EXPECT_DOUBLE_EQ(scheduled_learning_rate(t, 1), 0.01);
  EXPECT_DOUBLE_EQ(scheduled_learning_rate(t, 50), 0.01);
  EXPECT_DOUBLE_EQ(scheduled_learning_rate(t, 51), 0.005);
  EXPECT_DOUBLE_EQ(scheduled_learning_rate(t, 101), 0.0025);
}

std::vector<LabeledGraph> separable_toy() {
  std::vector<LabeledGraph> data;
  for (int i = 0; i < 10; ++i) {
    Graph a = graphs::path(2 + i % 3);
    Graph b = graphs::star(3 + i % 2);
    data.push_back({a, one_hot_degrees(a, 5), 0});
    data.push_back({b, one_hot_degrees(b, 5), 1});
  }
  return data;
}

TEST(Train, SeparableToyReachesFullAccuracy) {
  auto data = separable_toy();
  ModelConfig cfg;
  cfg.layout = "gg";
  cfg.input_dim = 5;
  cfg.hidden_dim = 8;
  TrainConfig t;
  t.epochs = 100;
  t.seed = 1;
  auto r = train(data, cfg, t);
  ASSERT_EQ(r.history.size(), 100u);
  EXPECT_EQ(r.final_accuracy(), 1.0);
}

TEST(Train, DeterministicForSeed) {
  auto data = separable_toy();
  ModelConfig cfg;
  cfg.layout = "grg";
  cfg.input_dim = 5;
  cfg.hidden_dim = 6;
  TrainConfig t;
  t.epochs = 15;
  t.batch_size = 7;
  t.seed = 21;
  EXPECT_EQ(metrics_csv(train(data, cfg, t).history), metrics_csv(train(data, cfg, t).history));
  TrainConfig other = t;
  other.seed = 22;
  EXPECT_NE(metrics_csv(train(data, cfg, t).history), metrics_csv(train(data, cfg, other).history));
}

TEST(Train, RejectsEmptyDataAndBadConfig) {
  ModelConfig cfg;
  TrainConfig t;
  EXPECT_THROW(train(std::vector<LabeledGraph>{}, cfg, t), std::invalid_argument);
  auto data = separable_toy();
  cfg.input_dim = 5;
  t.epochs = 0;
  EXPECT_THROW(train(data, cfg, t), std::invalid_argument);
}

TEST(Metrics, CsvFormat) {
  std::vector<EpochMetrics> h{{1, 0.5, 0.25}, {2, 0.125, 1.0}};
  EXPECT_EQ(metrics_csv(h), "epoch,loss,train_accuracy\n1,0.5,0.250000\n2,0.125,1.000000\n");
}

}  // namespace
