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

#include "nfbt/pilot_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "nfbt/errors.hpp"

namespace nfbt {

void PilotConfig::validate() const {
  if (!(power_ul > 0.0)) throw ConfigError("pilot: power_ul must be positive");
  if (noise_ul < 0.0) throw ConfigError("pilot: noise_ul must be non-negative");
  if (num_rf_chains < 1) throw ConfigError("pilot: num_rf_chains must be >= 1");
  if (!(symbol_time > 0.0)) throw ConfigError("pilot: symbol_time must be positive");
}

std::vector<GainMatrix> wide_beam_sweep(const Scenario& scenario,
                                        const WideBeamCodebook& wide_cb,
                                        const PilotConfig& cfg, Rng& rng) {
  cfg.validate();
  const int subarray = wide_cb.subarray();
  const int num_wide = wide_cb.size();
  if (num_wide % cfg.num_rf_chains != 0)
    throw ConfigError("wide_beam_sweep: N_BS / M must be divisible by N_RF");
  const int sweeps = num_wide / cfg.num_rf_chains;
  const double noise_var = cfg.noise_ul / cfg.power_ul;

  const std::uint64_t stream_base = rng.next_u64();
  std::vector<GainMatrix> result;
  result.reserve(scenario.channels.size());
  for (int k = 0; k < scenario.num_users(); ++k) {
    const CVector& h = scenario.channels[k].h;
    const CVector h_sub = h.head(subarray);
    Rng user_rng(mix64(stream_base, static_cast<std::uint64_t>(k)));

    GainMatrix gm;
    gm.entries.resize(sweeps, cfg.num_rf_chains);
    for (int t = 0; t < sweeps; ++t) {
      for (int i = 0; i < cfg.num_rf_chains; ++i) {
        const Complex clean = beam_response(h_sub, wide_cb.codewords.col(gm.wide_index(t, i)));
        const Complex noise =
            noise_var > 0.0 ? user_rng.complex_gaussian(noise_var) : Complex(0.0, 0.0);
        gm.entries(t, i) = clean + noise;
      }
    }
    result.push_back(std::move(gm));
  }
  return result;
}

CVector candidate_probe(const NearFieldChannel& channel, const CMatrix& candidates,
                        const PilotConfig& cfg, Rng& rng) {
  cfg.validate();
  if (candidates.rows() != channel.h.size())
    throw ConfigError("candidate_probe: codeword length mismatch");
  const double amp = std::sqrt(cfg.power_ul);
  CVector r(candidates.cols());
  for (Eigen::Index i = 0; i < candidates.cols(); ++i) {
    const Complex noise =
        cfg.noise_ul > 0.0 ? rng.complex_gaussian(cfg.noise_ul) : Complex(0.0, 0.0);
    r[i] = amp * beam_response(channel.h, candidates.col(i)) + noise;
  }
  return r;
}

CMatrix effective_channel_probe(const Scenario& scenario, const CMatrix& f_rf,
                                const PilotConfig& cfg, Rng& rng) {
  cfg.validate();
  if (f_rf.rows() != scenario.geometry.num_antennas)
    throw ConfigError("effective_channel_probe: analog precoder has wrong height");
  const int num_users = scenario.num_users();
  const double noise_var = cfg.noise_ul / cfg.power_ul;

  const std::uint64_t stream_base = rng.next_u64();
  CMatrix h_ef(num_users, f_rf.cols());
  for (int k = 0; k < num_users; ++k) {
    Rng user_rng(mix64(stream_base, static_cast<std::uint64_t>(k)));
    for (Eigen::Index j = 0; j < f_rf.cols(); ++j) {
      const Complex noise =
          noise_var > 0.0 ? user_rng.complex_gaussian(noise_var) : Complex(0.0, 0.0);
      h_ef(k, j) = beam_response(scenario.channels[k].h, f_rf.col(j)) + noise;
    }
  }
  return h_ef;
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "proposed" || name == "gnn") return Scheme::proposed;
  if (name == "exhaustive") return Scheme::exhaustive;
  if (name == "fc") return Scheme::fc;
  if (name == "omp") return Scheme::omp;
  throw ConfigError("unknown scheme id: " + name);
}

long pilot_overhead(Scheme scheme, int n_bs, int beams_per_wide, int num_rings, int num_users,
                    bool count_phase3_for_exhaustive) {
  if (n_bs < 1 || beams_per_wide < 1 || n_bs % beams_per_wide != 0 || num_rings < 1 ||
      num_users < 1)
    throw ConfigError("pilot_overhead: invalid dimensions");
  switch (scheme) {
    case Scheme::exhaustive: {
      long symbols = static_cast<long>(n_bs) * num_rings;
      if (count_phase3_for_exhaustive) symbols += num_users;
      return symbols;
    }
    case Scheme::proposed:
    case Scheme::fc:
    case Scheme::omp:
      return static_cast<long>(n_bs) / beams_per_wide + 2L * num_users;
  }
  throw ConfigError("pilot_overhead: unknown scheme");
}

}  // namespace nfbt
