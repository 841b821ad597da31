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
#include <vector>

#include "nfbt/array_channel.hpp"
#include "nfbt/codebooks.hpp"
#include "nfbt/linalg.hpp"
#include "nfbt/rng.hpp"

namespace nfbt {

struct PilotConfig {
  double power_ul = 0.0;        // W
  double noise_ul = 0.0;        // sigma_ul^2, W
  int num_rf_chains = 1;        // N_RF
  double symbol_time = 1e-7;    // s per pilot symbol

  void validate() const;
};

/// Wide-beam gain observations of one user: T x N_RF complex entries,
/// T = (N_BS / M) / N_RF. Entry (t, i) observes wide codeword
/// t * N_RF + i (0-based), i.e. codeword index (t-1) * N_RF + n 1-based.
struct GainMatrix {
  CMatrix entries;

  int sweeps() const { return static_cast<int>(entries.rows()); }
  int rf_chains() const { return static_cast<int>(entries.cols()); }
  /// 0-based wide codeword index observed at entry (t, i).
  int wide_index(int t, int i) const { return t * rf_chains() + i; }
};

/// Phase 1: sweep every wide beam once with ideal orthogonal pilots.
/// Noiseless entries are h_w^H e with h_w the channel restricted to the
/// first N_BS / M antennas; noise is i.i.d. CN(0, sigma^2 / P_ul).
/// Per-user noise comes from independent derived streams, so per-user work
/// can be reordered or parallelized without changing the result.
std::vector<GainMatrix> wide_beam_sweep(const Scenario& scenario,
                                        const WideBeamCodebook& wide_cb,
                                        const PilotConfig& cfg, Rng& rng);

/// Phase 2: one user tests its K candidate codewords in its own time slot.
/// Entries are sqrt(P_ul) h^H b_i + CN(0, sigma^2); the noise here carries
/// no 1 / sqrt(P_ul) because the received pilot is combined unscaled
/// (within-user ordering is scale invariant either way).
CVector candidate_probe(const NearFieldChannel& channel, const CMatrix& candidates,
                        const PilotConfig& cfg, Rng& rng);

/// Phase 3: estimate the K x K effective channel through the chosen analog
/// beams; row k = h_k^H F_RF + CN(0, sigma^2 / P_ul) per entry.
CMatrix effective_channel_probe(const Scenario& scenario, const CMatrix& f_rf,
                                const PilotConfig& cfg, Rng& rng);

enum class Scheme { proposed, exhaustive, fc, omp };

Scheme scheme_from_string(const std::string& name);

/// Uplink pilot symbols consumed by a scheme. Proposed, FC and OMP use
/// N_BS / M + 2 K; exhaustive uses N_BS * S (plus K effective-channel
/// symbols only when count_phase3_for_exhaustive is set).
long pilot_overhead(Scheme scheme, int n_bs, int beams_per_wide, int num_rings, int num_users,
                    bool count_phase3_for_exhaustive = false);

}  // namespace nfbt
