// nfbt - near-field beam training simulator for multiuser XL-MIMO
// Copyright 2026 the nfbt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfbt/config.hpp"
#include "nfbt/errors.hpp"
#include "nfbt/experiment.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string profile = "desk";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;  // key=value
  std::string schemes;
};

nfbt::ExperimentConfig resolve_config(const GlobalArgs& args) {
  nfbt::ExperimentConfig cfg = nfbt::config_profile(args.profile);
  if (!args.config_path.empty()) cfg = nfbt::load_config_file(args.config_path, cfg);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw nfbt::ConfigError("--set expects key=value, got '" + kv + "'");
    nfbt::apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.schemes.empty()) nfbt::apply_config_override(cfg, "eval.schemes", args.schemes);
  if (args.seed_set) cfg.seed = args.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nfbt: three-phase near-field beam training simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs args;
  app.add_option("--config", args.config_path, "config file (dotted key = value lines)");
  app.add_option("--profile", args.profile, "built-in profile: paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--seed", args.seed, "master seed")->each([&args](const std::string&) {
    args.seed_set = true;
  });
  app.add_option("--set", args.overrides, "config override key=value (repeatable)");
  app.add_option("--schemes", args.schemes, "comma list, e.g. gnn_mmse,exhaustive_mmse");

  auto* gen = app.add_subcommand("gen-data", "generate labelled training scenarios");
  std::string gen_out;
  gen->add_option("--out", gen_out, "output dataset file")->required();

  auto* train = app.add_subcommand("train", "train the angle and distance networks");
  std::string train_dataset, train_out;
  nfbt::TrainOptions train_opts;
  train->add_option("--dataset", train_dataset, "dataset file from gen-data")->required();
  train->add_option("--out", train_out, "output checkpoint file")->required();
  train->add_flag("--fc-ablation", train_opts.fc_ablation,
                  "train the FC baseline (aggregation zeroed)");
  train->add_flag("--resume", train_opts.resume, "continue from an existing checkpoint");

  auto* eval = app.add_subcommand("eval", "run the pipeline over the configured sweep");
  std::string eval_out;
  nfbt::EvalOptions eval_opts;
  eval->add_option("--checkpoint", eval_opts.checkpoint, "GNN checkpoint");
  eval->add_option("--fc-checkpoint", eval_opts.fc_checkpoint, "FC ablation checkpoint");
  eval->add_option("--out", eval_out, "output results CSV")->required();
  eval->add_flag("--trace-pilots", eval_opts.trace_pilots, "dump pilot traces as JSON lines");
  eval->add_flag("--trace-alloc", eval_opts.trace_alloc, "dump allocation traces as JSON lines");

  auto* sweep = app.add_subcommand("sweep", "eval with one sweep axis overridden");
  std::string sweep_out, sweep_axis, sweep_values;
  nfbt::EvalOptions sweep_opts;
  sweep->add_option("--checkpoint", sweep_opts.checkpoint, "GNN checkpoint");
  sweep->add_option("--fc-checkpoint", sweep_opts.fc_checkpoint, "FC ablation checkpoint");
  sweep->add_option("--out", sweep_out, "output results CSV")->required();
  sweep->add_option("--vary", sweep_axis, "axis: p_ul, p_dl or k")
      ->required()
      ->check(CLI::IsMember({"p_ul", "p_dl", "k"}));
  sweep->add_option("--values", sweep_values, "comma list of axis values")->required();
  sweep->add_flag("--trace-pilots", sweep_opts.trace_pilots, "dump pilot traces as JSON lines");
  sweep->add_flag("--trace-alloc", sweep_opts.trace_alloc, "dump allocation traces as JSON lines");

  auto* dump = app.add_subcommand("dump-codebook", "emit a CSV of (n, s, r, phi)");
  std::string dump_out, dump_bin;
  dump->add_option("--out", dump_out, "output CSV")->required();
  dump->add_option("--bin", dump_bin, "also write the binary codebook container");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      cmd_gen_data(resolve_config(args), gen_out);
    } else if (train->parsed()) {
      cmd_train(resolve_config(args), train_dataset, train_out, train_opts);
    } else if (eval->parsed()) {
      cmd_eval(resolve_config(args), eval_opts, eval_out);
    } else if (sweep->parsed()) {
      nfbt::ExperimentConfig cfg = resolve_config(args);
      const std::string key = sweep_axis == "p_ul"  ? "eval.p_ul_sweep_dbm"
                              : sweep_axis == "p_dl" ? "eval.p_dl_sweep_dbm"
                                                     : "eval.k_sweep";
      nfbt::apply_config_override(cfg, key, sweep_values);
      cmd_eval(cfg, sweep_opts, sweep_out);
    } else if (dump->parsed()) {
      cmd_dump_codebook(resolve_config(args), dump_out, dump_bin);
    }
  } catch (const nfbt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const nfbt::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
