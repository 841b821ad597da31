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

#include <cstdint>
#include <string>
#include <vector>

#include "nfbt/array_channel.hpp"
#include "nfbt/gnn.hpp"
#include "nfbt/pilot_sim.hpp"

namespace nfbt {

/// Full experiment configuration. The text form is a flat dotted-key file
/// ("geometry.n_bs = 256", "#" comments); parse -> serialize -> parse is an
/// identity. dBm values are converted to watts only when the resolved
/// runtime structs are built.
struct ExperimentConfig {
  struct Geometry {
    int n_bs = 256;
    double carrier_freq_hz = 30e9;
    double spacing_wavelengths = 0.5;
  } geometry;

  struct Codebook {
    int beams_per_wide = 4;  // M
    int rings = 5;           // S
    std::string ring_rule = "reciprocal";
    double r_min = 3.0;
    double r_max_cap = 400.0;  // effective r_max = min(cap, rayleigh distance)
  } codebook;

  ScenarioConfig scenario;

  struct Power {
    double p_ul_dbm = 4.0;
    double p_dl_dbm = 5.0;
    double noise_ul_dbm = -81.0;
    double noise_dl_dbm = -81.0;
  } power;

  struct Timing {
    double symbol_time = 1e-7;  // 0.1 us slot
    double frame_time = 2e-4;   // 0.2 ms session
  } timing;

  struct Training {
    int samples = 12000;
    TrainSchedule schedule;
    int feature_dim = 128;  // V
    int num_layers = 3;     // L_G
    bool randomize_p_ul = false;
    double p_ul_min_dbm = 0.0;
    double p_ul_max_dbm = 8.0;
  } train;

  struct Eval {
    int scenarios = 200;
    std::vector<double> p_ul_sweep_dbm{0.0, 2.0, 4.0, 6.0, 8.0};
    std::vector<double> p_dl_sweep_dbm{5.0};
    std::vector<int> k_sweep{8};
    std::vector<std::string> schemes{"gnn_zf",        "gnn_mmse",        "exhaustive_zf",
                                     "exhaustive_mmse", "fc_mmse",       "omp_mmse"};
    bool count_phase3_for_exhaustive = false;
    int pilot_n_rf = 0;  // 0 = use scenario.num_users
  } eval;

  std::uint64_t seed = 1;

  void validate() const;

  // resolved quantities
  ArrayGeometry make_geometry() const;
  double r_max_effective() const;
  int resolved_n_rf() const;
  PilotConfig make_pilot(double p_ul_dbm) const;
  double p_dl_watts(double p_dl_dbm) const { return dbm_to_watts(p_dl_dbm); }
  double noise_dl_watts() const { return dbm_to_watts(power.noise_dl_dbm); }
  NetDims make_net_dims() const;
};

/// Built-in profiles: "paper" (N_BS = 256, K = 8, 12000 samples) and
/// "desk" (N_BS = 64, K = 4, L = 2, 2000 samples, minutes-scale).
ExperimentConfig config_profile(const std::string& name);

/// Applies "key = value" lines on top of a base config. Unknown keys are
/// errors; a "profile" key (allowed only before other keys) replaces the
/// base first.
ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base);

std::string serialize_config(const ExperimentConfig& cfg);

ExperimentConfig load_config_file(const std::string& path, const ExperimentConfig& base);

/// Applies one key = value override (used by CLI flags).
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);

}  // namespace nfbt
