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

#include <vector>

#include "nfbt/array_channel.hpp"
#include "nfbt/beam_alloc.hpp"
#include "nfbt/codebooks.hpp"
#include "nfbt/linalg.hpp"

namespace nfbt {

/// Analog codeword matrix cascaded with the digital precoder. MRC analog
/// columns (OMP baseline) are not codebook members and violate the
/// constant-modulus constraint; codebook_analog marks them exempt.
struct HybridPrecoder {
  CMatrix f_rf;  // N_BS x K
  CMatrix f_bb;  // K x K
  bool codebook_analog = true;
};

struct RateReport {
  RVector per_user_rates;  // bits/s/Hz
  double sum_rate = 0.0;
  double effective_sum_rate = 0.0;
  long pilot_symbols = 0;
  double acc_angle = 0.0;
  double acc_dist = 0.0;
  double acc_overall = 0.0;
};

/// Column k = codebook codeword at flat index u_k.
CMatrix assemble_analog(const AllocationResult& allocation, const NearFieldCodebook& codebook);

/// F_BB = H^H (H H^H)^{-1}. Throws NumericalError when the effective
/// channel is close to singular (condition number above 1e12), which
/// signals a degenerate allocation upstream.
CMatrix zf_digital(const CMatrix& h_ef);

/// F_BB = H^H ((P_dl / K) H H^H + sigma^2 I)^{-1}.
CMatrix mmse_digital(const CMatrix& h_ef, double power_dl, int num_users, double noise_dl);

/// Scales each digital column so that || F_RF f_k^BB ||_F = 1.
void normalize_columns(const CMatrix& f_rf, CMatrix& f_bb);

/// Genie-aided per-user rates against the true channels:
/// R_k = log2(1 + (P/K) |h_k^H F_RF f_k|^2 /
///            ((P/K) sum_{n != k} |h_k^H F_RF f_n|^2 + sigma^2)).
RVector per_user_rates(const Scenario& scenario, const HybridPrecoder& precoder, double power_dl,
                       double noise_dl);

/// (1 - T_p / T_t) R_sum with T_p = pilot_symbols * symbol_time. Throws
/// when the pilots do not fit in the frame.
double effective_sum_rate(double sum_rate, long pilot_symbols, double symbol_time,
                          double frame_time);

/// Fraction of users whose top-1 predicted (n, s) matches the label,
/// conflicts ignored.
double estimation_accuracy(const std::vector<CodewordIndex>& predicted,
                           const std::vector<CodewordIndex>& labels);

}  // namespace nfbt
