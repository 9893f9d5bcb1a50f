// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the `wlt` tool. Each returns a RunReport;
// verdicts are data, never exit codes.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wlt/data.hpp"
#include "wlt/fractional.hpp"
#include "wlt/io.hpp"
#include "wlt/nn/train.hpp"
#include "wlt/refinement.hpp"

namespace wlt::cli {

using nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20210601;
inline constexpr const char* kDataDirEnv = "WLT_DATA_DIR";

enum ExitCode : int { kOk = 0, kUsageOrIo = 2, kTooLarge = 3 };

struct RunReport {
  std::string command;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  json results = json::object();
  double wall_time_seconds = 0.0;

  json to_json() const {
    return {{"schema_version", kReportSchemaVersion},
            {"command", command},
            {"config", config},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"results", results},
            {"wall_time_seconds", wall_time_seconds}};
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

inline RunReport cmd_wl(const std::filesystem::path& a, const std::filesystem::path& b) {
  detail::Stopwatch clock;
  Graph g = io::read_graph_file(a), h = io::read_graph_file(b);
  RunReport r{"wl", {{"a", a.string()}, {"b", b.string()}}, std::nullopt, io::verdict_to_json(wl_pair_test(g, h))};
  r.wall_time_seconds = clock.seconds();
  return r;
}

inline RunReport cmd_tinhofer(const std::filesystem::path& a, const std::filesystem::path& b) {
  detail::Stopwatch clock;
  Graph g = io::read_graph_file(a), h = io::read_graph_file(b);
  RunReport r{"tinhofer", {{"a", a.string()}, {"b", b.string()}}, std::nullopt,
              io::verdict_to_json(tinhofer_test(g, h))};
  r.wall_time_seconds = clock.seconds();
  return r;
}

/// Throws TooLarge above `limit`.
inline RunReport cmd_fraciso(const std::filesystem::path& a, const std::filesystem::path& b, int limit) {
  detail::Stopwatch clock;
  Graph g = io::read_graph_file(a), h = io::read_graph_file(b);
  RunReport r{"fraciso", {{"a", a.string()}, {"b", b.string()}, {"limit", limit}}, std::nullopt,
              io::fractional_to_json(lp_feasible_fractional_iso(g, h, limit))};
  r.wall_time_seconds = clock.seconds();
  return r;
}

/// Throws TooLarge above `limit`; the report is still produced by the caller.
inline RunReport cmd_compact(const std::filesystem::path& a, int limit) {
  detail::Stopwatch clock;
  Graph g = io::read_graph_file(a);
  auto report = is_compact(g, limit);
  RunReport r{"compact", {{"a", a.string()}, {"limit", limit}}, std::nullopt, io::compactness_to_json(report)};
  r.wall_time_seconds = clock.seconds();
  if (report.status == Compactness::TooLarge) throw TooLarge("compactness check", g.size(), limit);
  return r;
}

struct GenOptions {
  std::string family;
  data::FamilyParams params;
  int count = 40;
  std::uint64_t seed = kDefaultSeed;
};

inline data::Dataset generate(const GenOptions& o) {
  return data::gen_wl_hard_pairs(data::parse_family(o.family), o.params, o.count, o.seed);
}

inline RunReport cmd_gen(const GenOptions& o, const std::filesystem::path& out) {
  detail::Stopwatch clock;
  data::Dataset ds = generate(o);
  io::write_text_file(out, io::dataset_to_json(ds).dump() + "\n");
  RunReport r{"gen",
              {{"family", o.family},
               {"m", o.params.m},
               {"n", o.params.n},
               {"degree", o.params.degree},
               {"count", o.count},
               {"out", out.string()}},
              o.seed,
              {{"graphs", ds.size()}, {"class_count", ds.class_count}}};
  r.wall_time_seconds = clock.seconds();
  return r;
}

struct TrainOptions {
  std::string dataset;  // JSON file, "tu:NAME" or "gen:FAMILY"
  std::string data_dir;  // for tu:, falls back to $WLT_DATA_DIR then "."
  GenOptions gen;        // for gen:
  std::string layout = "gggrgg";
  std::string recolor = "single";  // none | single | half
  std::string epsilon = "fixed0";  // fixed0 | trainable
  std::string bias_init = "zero";  // zero | fan-in
  int hidden = 32;
  int runs = 1;
  nn::TrainConfig train;
  std::string csv_path;
  std::string checkpoint_path;
};

/// Resolves the dataset spec of `cmd_train`.
inline data::Dataset load_dataset(const TrainOptions& o) {
  if (o.dataset.rfind("tu:", 0) == 0) {
    std::string dir = o.data_dir;
    if (dir.empty()) {
      const char* env = std::getenv(kDataDirEnv);
      dir = env ? env : ".";
    }
    return data::parse_tu_dataset(dir, o.dataset.substr(3));
  }
  if (o.dataset.rfind("gen:", 0) == 0) {
    GenOptions g = o.gen;
    g.family = o.dataset.substr(4);
    return generate(g);
  }
  return io::read_dataset_file(o.dataset);
}

/// Effective layout: `--recolor none` removes every r layer (the GIN-only
/// ablation of the same stack).
inline nn::ModelConfig model_config(const TrainOptions& o, int input_dim, int class_count) {
  nn::ModelConfig cfg;
  cfg.layout = o.layout;
  if (cfg.layout.find_first_not_of("gr") != std::string::npos || cfg.layout.find('g') == std::string::npos) {
    throw std::invalid_argument("invalid layout \"" + o.layout + "\": use letters g and r with at least one g");
  }
  if (o.recolor == "none") {
    std::erase(cfg.layout, 'r');
  } else if (o.recolor == "single") {
    cfg.recolor_fraction = nn::RecolorFraction::SingleNode;
  } else if (o.recolor == "half") {
    cfg.recolor_fraction = nn::RecolorFraction::Half;
  } else {
    throw std::invalid_argument("--recolor must be none, single or half");
  }
  if (o.epsilon == "trainable") {
    cfg.epsilon_mode = nn::EpsilonMode::Trainable;
  } else if (o.epsilon != "fixed0") {
    throw std::invalid_argument("--eps must be fixed0 or trainable");
  }
  if (o.bias_init == "fan-in") {
    cfg.bias_init = nn::BiasInit::FanInUniform;
  } else if (o.bias_init != "zero") {
    throw std::invalid_argument("--bias-init must be zero or fan-in");
  }
  cfg.input_dim = input_dim;
  cfg.hidden_dim = o.hidden;
  cfg.class_count = class_count;
  nn::validate(cfg);
  return cfg;
}

struct TrainOutcome {
  RunReport report;
  std::string csv;  // metrics of the best run
  nn::ModelConfig config;
  nn::TrainResult best;
};

/// Trains `runs` times with seeds seed, seed+1, ... and keeps the run with
/// the best final training accuracy (first one on ties).
inline TrainOutcome run_training(const TrainOptions& o) {
  detail::Stopwatch clock;
  if (o.runs < 1) throw std::invalid_argument("--runs must be positive");
  data::Dataset ds = load_dataset(o);
  auto encoder = data::FeatureEncoder::for_dataset(ds);
  auto samples = data::make_samples(ds, encoder);
  nn::ModelConfig cfg = model_config(o, encoder.dim(), ds.class_count);

  TrainOutcome out{{}, {}, cfg, {}};
  json runs = json::array();
  int best_index = -1;
  for (int i = 0; i < o.runs; ++i) {
    nn::TrainConfig t = o.train;
    t.seed = o.train.seed + static_cast<std::uint64_t>(i);
    nn::TrainResult result = nn::train(samples, cfg, t);
    runs.push_back({{"seed", t.seed}, {"final_loss", result.history.back().loss},
                    {"final_train_accuracy", result.final_accuracy()}});
    if (best_index < 0 || result.final_accuracy() > out.best.final_accuracy()) {
      best_index = i;
      out.best = std::move(result);
    }
  }
  out.csv = nn::metrics_csv(out.best.history);

  json config = {{"dataset", o.dataset},
                 {"dataset_name", ds.name},
                 {"graphs", ds.size()},
                 {"model", io::config_to_json(cfg)},
                 {"feature_policy", encoder.policy == data::FeaturePolicy::DegreeOneHot ? "degree" : "node_label"},
                 {"recolor", o.recolor},
                 {"runs", o.runs},
                 {"epochs", o.train.epochs},
                 {"learning_rate", o.train.learning_rate},
                 {"lr_decay", o.train.lr_decay},
                 {"decay_period", o.train.decay_period},
                 {"batch_size", o.train.batch_size},
                 {"adam", {{"beta1", o.train.beta1}, {"beta2", o.train.beta2}, {"epsilon", o.train.adam_epsilon}}}};
  out.report = RunReport{"train", std::move(config), o.train.seed,
                         {{"runs", std::move(runs)},
                          {"best_run", best_index},
                          {"best_final_train_accuracy", out.best.final_accuracy()},
                          {"best_final_loss", out.best.history.back().loss}}};
  if (!o.csv_path.empty()) io::write_text_file(o.csv_path, out.csv);
  if (!o.checkpoint_path.empty()) {
    io::write_text_file(o.checkpoint_path, io::checkpoint_to_json(cfg, out.best.params).dump() + "\n");
  }
  out.report.wall_time_seconds = clock.seconds();
  return out;
}

}  // namespace wlt::cli
