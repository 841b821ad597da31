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

#include "nfbt/experiment.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "nfbt/baselines.hpp"
#include "nfbt/beam_alloc.hpp"
#include "nfbt/errors.hpp"
#include "nfbt/precoder.hpp"

namespace nfbt {

namespace {

// side-stream tags for mix64(scenario_seed, tag)
constexpr std::uint64_t kTagPhase1 = 0x501;
constexpr std::uint64_t kTagPower = 0x502;
constexpr std::uint64_t kTagEval = 0x503;
constexpr std::uint64_t kTagPhase2 = 0x510;  // + scheme family
constexpr std::uint64_t kTagPhase3 = 0x520;  // + scheme family
constexpr std::uint64_t kTagExhaustive = 0x530;

std::uint64_t family_offset(Scheme family) {
  switch (family) {
    case Scheme::proposed: return 0;
    case Scheme::exhaustive: return 1;
    case Scheme::fc: return 2;
    case Scheme::omp: return 3;
  }
  return 4;
}

std::string config_stamp(const ExperimentConfig& cfg) {
  std::string stamp = "# nfbt results v1\n";
  std::istringstream lines(serialize_config(cfg));
  std::string line;
  while (std::getline(lines, line)) stamp += "# " + line + "\n";
  return stamp;
}

struct SchemeSpec {
  std::string id;
  Scheme family = Scheme::proposed;
  bool mmse = false;
};

SchemeSpec parse_scheme(const std::string& id) {
  const auto sep = id.rfind('_');
  if (sep == std::string::npos)
    throw ConfigError("scheme id needs a precoder suffix: " + id);
  SchemeSpec spec;
  spec.id = id;
  spec.family = scheme_from_string(id.substr(0, sep));
  const std::string precoder = id.substr(sep + 1);
  if (precoder == "mmse")
    spec.mmse = true;
  else if (precoder != "zf")
    throw ConfigError("unknown precoder variant in scheme " + id);
  return spec;
}

struct ComponentAccuracy {
  double angle = 0.0;
  double dist = 0.0;
  double overall = 0.0;
};

ComponentAccuracy component_accuracy(const std::vector<CodewordIndex>& predicted,
                                     const std::vector<CodewordIndex>& labels) {
  ComponentAccuracy acc;
  long a = 0, d = 0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    a += predicted[k].angle == labels[k].angle;
    d += predicted[k].ring == labels[k].ring;
  }
  const double n = static_cast<double>(predicted.size());
  acc.angle = a / n;
  acc.dist = d / n;
  acc.overall = estimation_accuracy(predicted, labels);
  return acc;
}

void verify_checkpoint_dims(const Checkpoint& ckpt, const NetDims& dims,
                            const std::string& what) {
  if (ckpt.dims.input_dim != dims.input_dim || ckpt.dims.num_angles != dims.num_angles ||
      ckpt.dims.num_rings != dims.num_rings)
    throw ConfigError(what + ": checkpoint dimensions do not match the configuration");
}

}  // namespace

Workspace make_workspace(const ExperimentConfig& cfg) {
  Workspace ws;
  ws.geom = cfg.make_geometry();
  ws.wide = build_wide_codebook(ws.geom, cfg.codebook.beams_per_wide);
  ws.nf = build_near_field_codebook(ws.geom, cfg.codebook.rings, cfg.codebook.r_min,
                                    cfg.r_max_effective());
  return ws;
}

std::string format_csv_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

void cmd_gen_data(const ExperimentConfig& cfg, const std::string& out_path) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg);

  DatasetFile file;
  file.meta.config_text = serialize_config(cfg);
  file.meta.n_bs = static_cast<std::uint32_t>(cfg.geometry.n_bs);
  file.meta.beams_per_wide = static_cast<std::uint32_t>(cfg.codebook.beams_per_wide);
  file.meta.num_rings = static_cast<std::uint32_t>(cfg.codebook.rings);
  file.meta.num_rf_chains = static_cast<std::uint32_t>(cfg.resolved_n_rf());
  file.meta.num_users = static_cast<std::uint32_t>(cfg.scenario.num_users);
  file.meta.count = static_cast<std::uint64_t>(cfg.train.samples);

  for (int i = 0; i < cfg.train.samples; ++i) {
    const std::uint64_t scenario_seed = cfg.seed + static_cast<std::uint64_t>(i);
    Scenario scen = generate_scenario(ws.geom, cfg.scenario, scenario_seed);

    double p_ul_dbm = cfg.power.p_ul_dbm;
    if (cfg.train.randomize_p_ul) {
      Rng power_rng(mix64(scenario_seed, kTagPower));
      p_ul_dbm = power_rng.uniform(cfg.train.p_ul_min_dbm, cfg.train.p_ul_max_dbm);
    }
    const PilotConfig pilot = cfg.make_pilot(p_ul_dbm);

    Rng noise_rng(mix64(scenario_seed, kTagPhase1));
    TrainSample sample;
    sample.gains = wide_beam_sweep(scen, ws.wide, pilot, noise_rng);
    sample.labels = label_scenario(scen, ws.nf);
    file.scenarios.push_back(std::move(scen));
    file.samples.push_back(std::move(sample));
  }
  save_dataset(out_path, file);
}

void cmd_train(const ExperimentConfig& cfg, const std::string& dataset_path,
               const std::string& checkpoint_path, const TrainOptions& options) {
  cfg.validate();
  const DatasetFile data = load_dataset(dataset_path);
  if (data.samples.empty()) throw ConfigError("cmd_train: dataset is empty");

  NetDims dims = cfg.make_net_dims();
  dims.input_dim = 2 * static_cast<int>(data.meta.n_bs / data.meta.beams_per_wide);
  dims.num_angles = static_cast<int>(data.meta.n_bs);
  dims.num_rings = static_cast<int>(data.meta.num_rings);

  Aggregation mode = options.fc_ablation ? Aggregation::zeroed : Aggregation::mean_others;
  std::uint64_t train_seed = cfg.seed;
  TrainState state;
  if (options.resume) {
    Checkpoint ckpt = load_checkpoint(checkpoint_path);
    verify_checkpoint_dims(ckpt, dims, "cmd_train");
    state = std::move(ckpt.state);
    train_seed = ckpt.train_seed;
    mode = ckpt.mode;
  } else {
    state = train_init(cfg.train.schedule, dims, train_seed, feature_scale(data.samples));
  }

  train_epochs(state, data.samples, cfg.train.schedule, cfg.train.schedule.epochs, train_seed,
               mode);

  Checkpoint out;
  out.config_text = serialize_config(cfg);
  out.dims = dims;
  out.mode = mode;
  out.train_seed = train_seed;
  out.state = std::move(state);
  save_checkpoint(checkpoint_path, out);

  std::string csv = "epoch,lr,train_loss,val_acc_angle,val_acc_dist,val_acc_overall\n";
  for (const HistoryRow& row : out.state.history) {
    csv += std::to_string(row.epoch);
    csv += ',' + format_csv_double(row.lr);
    csv += ',' + format_csv_double(row.train_loss);
    csv += ',' + format_csv_double(row.val_acc_angle);
    csv += ',' + format_csv_double(row.val_acc_dist);
    csv += ',' + format_csv_double(row.val_acc_overall);
    csv += '\n';
  }
  write_file(checkpoint_path + ".history.csv", csv);
}

void cmd_eval(const ExperimentConfig& cfg, const EvalOptions& options,
              const std::string& out_csv) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg);
  const NetDims dims = cfg.make_net_dims();

  std::vector<SchemeSpec> specs;
  bool need_gnn = false, need_fc = false, need_omp = false;
  for (const std::string& id : cfg.eval.schemes) {
    const SchemeSpec spec = parse_scheme(id);
    need_gnn |= spec.family == Scheme::proposed;
    need_fc |= spec.family == Scheme::fc;
    need_omp |= spec.family == Scheme::omp;
    specs.push_back(spec);
  }
  if (specs.empty()) throw ConfigError("cmd_eval: no schemes enabled");

  std::optional<Checkpoint> gnn_ckpt, fc_ckpt;
  if (need_gnn) {
    if (options.checkpoint.empty()) throw ConfigError("cmd_eval: gnn scheme needs --checkpoint");
    gnn_ckpt = load_checkpoint(options.checkpoint);
    verify_checkpoint_dims(*gnn_ckpt, dims, "cmd_eval (gnn)");
  }
  if (need_fc) {
    if (options.fc_checkpoint.empty())
      throw ConfigError("cmd_eval: fc scheme needs --fc-checkpoint");
    fc_ckpt = load_checkpoint(options.fc_checkpoint);
    verify_checkpoint_dims(*fc_ckpt, dims, "cmd_eval (fc)");
  }

  std::optional<OmpSolver> omp_solver;
  if (need_omp)
    omp_solver.emplace(omp_sweep_sensing(ws.wide, cfg.geometry.n_bs), ws.nf.codewords);

  std::ostringstream pilot_trace, alloc_trace;
  const double noise_dl = cfg.noise_dl_watts();
  const double symbol_time = cfg.timing.symbol_time;
  const double frame_time = cfg.timing.frame_time;

  std::string csv = config_stamp(cfg);
  csv += kResultsColumns;
  csv += '\n';

  const std::uint64_t eval_base = mix64(cfg.seed, kTagEval);
  for (int k_users : cfg.eval.k_sweep) {
    ScenarioConfig scen_cfg = cfg.scenario;
    scen_cfg.num_users = k_users;
    for (double p_ul_dbm : cfg.eval.p_ul_sweep_dbm) {
      const PilotConfig pilot = cfg.make_pilot(p_ul_dbm);
      for (double p_dl_dbm : cfg.eval.p_dl_sweep_dbm) {
        const double p_dl = cfg.p_dl_watts(p_dl_dbm);
        for (int i = 0; i < cfg.eval.scenarios; ++i) {
          const std::uint64_t scenario_seed = eval_base + static_cast<std::uint64_t>(i);
          const Scenario scen = generate_scenario(ws.geom, scen_cfg, scenario_seed);
          const std::vector<CodewordIndex> labels = label_scenario(scen, ws.nf);

          Rng phase1_rng(mix64(scenario_seed, kTagPhase1));
          const std::vector<GainMatrix> gains = wide_beam_sweep(scen, ws.wide, pilot, phase1_rng);
          if (options.trace_pilots) {
            nlohmann::json line;
            line["seed"] = scenario_seed;
            line["phase"] = 1;
            line["p_ul_dbm"] = p_ul_dbm;
            auto& moduli = line["gain_moduli"] = nlohmann::json::array();
            for (const GainMatrix& gm : gains) {
              nlohmann::json user = nlohmann::json::array();
              for (int t = 0; t < gm.sweeps(); ++t)
                for (int c = 0; c < gm.rf_chains(); ++c)
                  user.push_back(std::abs(gm.entries(t, c)));
              moduli.push_back(user);
            }
            pilot_trace << line.dump() << '\n';
          }

          // analog stage + effective channel once per scheme family
          std::map<std::string, std::string> rows;
          for (const SchemeSpec& spec : specs) {
            if (rows.count(spec.id)) continue;
            std::vector<SchemeSpec> siblings;
            for (const SchemeSpec& other : specs)
              if (other.family == spec.family) siblings.push_back(other);

            CMatrix f_rf;
            std::vector<CodewordIndex> predicted;
            bool codebook_analog = true;
            bool have_accuracy = true;

            if (spec.family == Scheme::proposed || spec.family == Scheme::fc) {
              const Checkpoint& ckpt =
                  spec.family == Scheme::fc ? *fc_ckpt : *gnn_ckpt;
              const Aggregation mode = spec.family == Scheme::fc ? Aggregation::zeroed
                                                                 : Aggregation::mean_others;
              const std::vector<ProbabilityPair> pairs =
                  forward(ckpt.state.best.angle, ckpt.state.best.dist, gains, mode);

              Rng phase2_rng(mix64(scenario_seed, kTagPhase2 + family_offset(spec.family)));
              std::vector<SortedCandidates> sorted(pairs.size());
              for (std::size_t k = 0; k < pairs.size(); ++k) {
                predicted.push_back(argmax_pair(pairs[k]));
                const RVector joint = combine_probabilities(pairs[k]);
                const std::vector<int> candidates = select_candidates(joint, k_users);
                CMatrix cand_cols(ws.nf.codewords.rows(), candidates.size());
                for (std::size_t c = 0; c < candidates.size(); ++c)
                  cand_cols.col(static_cast<Eigen::Index>(c)) =
                      ws.nf.codewords.col(candidates[c] - 1);
                const CVector probe =
                    candidate_probe(scen.channels[k], cand_cols, pilot, phase2_rng);
                sorted[k] = sort_candidates(candidates, probe);
              }
              std::vector<AllocationEvent> events;
              const AllocationResult alloc =
                  allocate_beams(sorted, options.trace_alloc ? &events : nullptr);
              if (options.trace_alloc) {
                nlohmann::json line;
                line["seed"] = scenario_seed;
                line["scheme"] = spec.family == Scheme::fc ? "fc" : "gnn";
                auto& steps = line["steps"] = nlohmann::json::array();
                for (const AllocationEvent& e : events)
                  steps.push_back({{"iter", e.iteration},
                                   {"user", e.user},
                                   {"codeword", e.codeword},
                                   {"modulus", e.modulus},
                                   {"assigned", e.assigned}});
                alloc_trace << line.dump() << '\n';
              }
              f_rf = assemble_analog(alloc, ws.nf);
            } else if (spec.family == Scheme::exhaustive) {
              Rng probe_rng(mix64(scenario_seed, kTagExhaustive));
              const ExhaustiveResult res = exhaustive_search(scen, ws.nf, pilot, probe_rng);
              predicted = res.top;
              f_rf = assemble_analog(res.allocation, ws.nf);
            } else {  // omp
              std::vector<CVector> estimates;
              estimates.reserve(gains.size());
              for (const GainMatrix& gm : gains)
                estimates.push_back(
                    omp_solver->estimate(omp_measurements(gm), scen_cfg.num_paths));
              f_rf = mrc_analog(estimates);
              codebook_analog = false;
              have_accuracy = false;
            }

            Rng phase3_rng(mix64(scenario_seed, kTagPhase3 + family_offset(spec.family)));
            const CMatrix h_ef = effective_channel_probe(scen, f_rf, pilot, phase3_rng);

            ComponentAccuracy acc;
            if (have_accuracy) acc = component_accuracy(predicted, labels);
            const long pilots =
                pilot_overhead(spec.family, cfg.geometry.n_bs, cfg.codebook.beams_per_wide,
                               cfg.codebook.rings, k_users, cfg.eval.count_phase3_for_exhaustive);

            for (const SchemeSpec& variant : siblings) {
              HybridPrecoder precoder;
              precoder.f_rf = f_rf;
              precoder.codebook_analog = codebook_analog;
              precoder.f_bb = variant.mmse ? mmse_digital(h_ef, p_dl, k_users, noise_dl)
                                           : zf_digital(h_ef);
              normalize_columns(precoder.f_rf, precoder.f_bb);
              const RVector rates = per_user_rates(scen, precoder, p_dl, noise_dl);
              const double sum_rate = rates.sum();
              const double eff = effective_sum_rate(sum_rate, pilots, symbol_time, frame_time);

              std::string row = variant.id;
              row += ',' + std::to_string(scenario_seed);
              row += ',' + std::to_string(k_users);
              row += ',' + format_csv_double(p_ul_dbm);
              row += ',' + format_csv_double(p_dl_dbm);
              row += ',' + format_csv_double(sum_rate);
              row += ',' + format_csv_double(eff);
              if (have_accuracy) {
                row += ',' + format_csv_double(acc.angle);
                row += ',' + format_csv_double(acc.dist);
                row += ',' + format_csv_double(acc.overall);
              } else {
                row += ",nan,nan,nan";
              }
              row += ',' + std::to_string(pilots);
              row += '\n';
              rows[variant.id] = std::move(row);
            }
          }
          for (const SchemeSpec& spec : specs) csv += rows[spec.id];
        }
      }
    }
  }
  write_file(out_csv, csv);
  if (options.trace_pilots) write_file(out_csv + ".pilots.jsonl", pilot_trace.str());
  if (options.trace_alloc) write_file(out_csv + ".alloc.jsonl", alloc_trace.str());
}

void cmd_dump_codebook(const ExperimentConfig& cfg, const std::string& out_csv,
                       const std::string& out_container) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg);
  std::string csv = "n,s,r,phi\n";
  for (int s = 1; s <= ws.nf.num_rings(); ++s)
    for (int n = 1; n <= ws.nf.num_angles(); ++n) {
      csv += std::to_string(n);
      csv += ',' + std::to_string(s);
      csv += ',' + format_csv_double(ws.nf.ring_distances[s - 1]);
      csv += ',' + format_csv_double(ws.nf.sine_angles[n - 1]);
      csv += '\n';
    }
  write_file(out_csv, csv);
  if (!out_container.empty()) save_codebook(out_container, ws.nf);
}

}  // namespace nfbt
