// SPDX-License-Identifier: Apache-2.0
//
// wlt: command-line front end. Prints one JSON report on stdout.
// Exit codes: 0 success (any verdict), 2 usage or I/O error, 3 input too large.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wlt/cli.hpp"

namespace {

using wlt::cli::RunReport;

void emit(const RunReport& r, const std::string& out) {
  const std::string text = r.to_json().dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) wlt::io::write_text_file(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weisfeiler-Leman refinement, fractional isomorphism and recoloring GNNs"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string report_path;
  app.add_option("--report", report_path, "Also write the JSON report to this file");

  std::string a, b;
  int lp_limit = 0, compact_limit = 0;

  auto* wl = app.add_subcommand("wl", "1-WL color refinement on a pair of graphs");
  wl->add_option("a", a, "First graph (JSON)")->required()->check(CLI::ExistingFile);
  wl->add_option("b", b, "Second graph (JSON)")->required()->check(CLI::ExistingFile);

  auto* tin = app.add_subcommand("tinhofer", "Refinement with individualization and certificate");
  tin->add_option("a", a, "First graph (JSON)")->required()->check(CLI::ExistingFile);
  tin->add_option("b", b, "Second graph (JSON)")->required()->check(CLI::ExistingFile);

  auto* frac = app.add_subcommand("fraciso", "Exact LP test for fractional isomorphism");
  frac->add_option("a", a, "First graph (JSON)")->required()->check(CLI::ExistingFile);
  frac->add_option("b", b, "Second graph (JSON)")->required()->check(CLI::ExistingFile);
  frac->add_option("--limit", lp_limit, "Largest order accepted")->default_val(wlt::SizeLimits{}.lp);

  auto* compact = app.add_subcommand("compact", "Decide compactness of a graph");
  compact->add_option("a", a, "Graph (JSON)")->required()->check(CLI::ExistingFile);
  compact->add_option("--limit", compact_limit, "Largest order accepted")->default_val(wlt::SizeLimits{}.compact);

  wlt::cli::GenOptions gen_opts;
  std::string gen_out;
  auto add_gen_flags = [&](CLI::App* cmd) {
    cmd->add_option("--m", gen_opts.params.m, "Cycle length for CyclePair")->default_val(3);
    cmd->add_option("--n", gen_opts.params.n, "Order for RandomRegular")->default_val(8);
    cmd->add_option("--degree", gen_opts.params.degree, "Degree for RandomRegular")->default_val(3);
    cmd->add_option("--count", gen_opts.count, "Number of graphs")->default_val(40);
    cmd->add_option("--gen-seed", gen_opts.seed, "Generator seed")->default_val(wlt::cli::kDefaultSeed);
  };
  auto* gen = app.add_subcommand("gen", "Generate a labeled dataset of WL-hard pairs");
  gen->add_option("family", gen_opts.family, "CyclePair | K33Prism | RandomRegular")->required();
  gen->add_option("out", gen_out, "Output dataset (JSON)")->required();
  add_gen_flags(gen);

  wlt::cli::TrainOptions t;
  auto* train = app.add_subcommand("train", "Train a GIN/recolor model");
  train->add_option("dataset", t.dataset, "Dataset JSON file, tu:NAME or gen:FAMILY")->required();
  train->add_option("--data-dir", t.data_dir, "Directory holding TU datasets (default $WLT_DATA_DIR)");
  train->add_option("--layout", t.layout, "Layer string over {g, r}")->default_val("gggrgg");
  train->add_option("--hidden", t.hidden, "Hidden width")->default_val(32);
  train->add_option("--recolor", t.recolor, "none | single | half")
      ->check(CLI::IsMember({"none", "single", "half"}))
      ->default_val("single");
  train->add_option("--eps", t.epsilon, "fixed0 | trainable")
      ->check(CLI::IsMember({"fixed0", "trainable"}))
      ->default_val("fixed0");
  train->add_option("--bias-init", t.bias_init, "zero | fan-in")
      ->check(CLI::IsMember({"zero", "fan-in"}))
      ->default_val("zero");
  train->add_option("--epochs", t.train.epochs, "Epochs")->default_val(100);
  train->add_option("--lr", t.train.learning_rate, "Base learning rate")->default_val(0.01);
  train->add_option("--lr-decay", t.train.lr_decay, "Rate multiplier per period")->default_val(0.5);
  train->add_option("--decay-period", t.train.decay_period, "Epochs per decay step")->default_val(50);
  train->add_option("--batch-size", t.train.batch_size, "Mini-batch size")->default_val(32);
  train->add_option("--seed", t.train.seed, "Training seed")->default_val(wlt::cli::kDefaultSeed);
  train->add_option("--runs", t.runs, "Seeded runs; the best final accuracy is kept")->default_val(1);
  train->add_option("--csv", t.csv_path, "Write per-epoch metrics of the best run");
  train->add_option("--out", t.checkpoint_path, "Write a checkpoint of the best run");
  add_gen_flags(train);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wlt::cli::kUsageOrIo;
  }

  try {
    if (*wl) {
      emit(wlt::cli::cmd_wl(a, b), report_path);
    } else if (*tin) {
      emit(wlt::cli::cmd_tinhofer(a, b), report_path);
    } else if (*frac) {
      emit(wlt::cli::cmd_fraciso(a, b, lp_limit), report_path);
    } else if (*compact) {
      emit(wlt::cli::cmd_compact(a, compact_limit), report_path);
    } else if (*gen) {
      emit(wlt::cli::cmd_gen(gen_opts, gen_out), report_path);
    } else if (*train) {
      emit(wlt::cli::run_training(t).report, report_path);
    }
  } catch (const wlt::TooLarge& e) {
    std::cerr << "wlt: " << e.what() << "\n";
    return wlt::cli::kTooLarge;
  } catch (const std::exception& e) {
    std::cerr << "wlt: " << e.what() << "\n";
    return wlt::cli::kUsageOrIo;
  }
  return wlt::cli::kOk;
}
