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

#pragma once

#include <string>

#include "nfbt/config.hpp"
#include "nfbt/serialize.hpp"

namespace nfbt {

struct Workspace {
  ArrayGeometry geom;
  WideBeamCodebook wide;
  NearFieldCodebook nf;
};

Workspace make_workspace(const ExperimentConfig& cfg);

/// Generates train.samples scenarios with labels and phase-1 gain matrices.
/// Scenario i uses seed cfg.seed + i; pilot noise and the optional per-
/// sample uplink power come from tagged mix64 side streams of that seed.
void cmd_gen_data(const ExperimentConfig& cfg, const std::string& out_path);

struct TrainOptions {
  bool fc_ablation = false;  // train with the aggregation zeroed
  bool resume = false;       // continue from an existing checkpoint
};

/// Trains the angle and distance networks on a dataset file; writes the
/// checkpoint and a history CSV (checkpoint path + ".history.csv").
void cmd_train(const ExperimentConfig& cfg, const std::string& dataset_path,
               const std::string& checkpoint_path, const TrainOptions& options = {});

struct EvalOptions {
  std::string checkpoint;     // needed by gnn_* schemes
  std::string fc_checkpoint;  // needed by fc_* schemes
  bool trace_pilots = false;
  bool trace_alloc = false;
};

/// Runs the full three-phase pipeline plus the enabled baselines over the
/// configured sweep and writes one CSV row per (sweep point, scenario,
/// scheme). The resolved config is stamped into the CSV header.
void cmd_eval(const ExperimentConfig& cfg, const EvalOptions& options,
              const std::string& out_csv);

/// CSV of (n, s, r, phi) for every near-field codeword; optionally also the
/// binary codebook container.
void cmd_dump_codebook(const ExperimentConfig& cfg, const std::string& out_csv,
                       const std::string& out_container = "");

/// Shortest round-trip decimal text (CSV number format).
std::string format_csv_double(double v);

inline constexpr char kResultsColumns[] =
    "scheme,seed,K,P_ul_dbm,P_dl_dbm,sum_rate,eff_sum_rate,acc_angle,acc_dist,acc_overall,"
    "pilot_symbols";

}  // namespace nfbt
