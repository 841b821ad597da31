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

#include "nfbt/beam_alloc.hpp"
#include "nfbt/codebooks.hpp"
#include "nfbt/gnn.hpp"
#include "nfbt/linalg.hpp"
#include "nfbt/pilot_sim.hpp"

namespace nfbt {

struct ExhaustiveResult {
  std::vector<CVector> gains;      // per user, all N_BS * S probed responses
  std::vector<CodewordIndex> top;  // per user argmax before allocation
  AllocationResult allocation;
};

/// Benchmark 1: probe every near-field codeword per user through the pilot
/// model (entries sqrt(P) h^H b + CN(0, sigma^2)), take the K largest
/// moduli as candidates and run the conflict-free allocation.
ExhaustiveResult exhaustive_search(const Scenario& scenario, const NearFieldCodebook& codebook,
                                   const PilotConfig& cfg, Rng& rng);

/// Benchmark 2: the GNN forward pass with the aggregation forced to zero,
/// so every user is processed independently with the shared weights.
std::vector<ProbabilityPair> fc_ablation_forward(const DualParams& params,
                                                 const std::vector<GainMatrix>& gains);

/// Benchmark 4, estimation step: standard OMP over the effective dictionary
/// sensing * dict (columns normalized internally). Model: y = sensing * h,
/// h sparse in dict. Returns the length-N_BS channel estimate dict * c.
CVector omp_estimate(const CVector& y, const CMatrix& sensing, const CMatrix& dict, int sparsity);

/// Caches the normalized effective dictionary for repeated estimates.
class OmpSolver {
 public:
  OmpSolver(const CMatrix& sensing, const CMatrix& dict);
  CVector estimate(const CVector& y, int sparsity) const;

 private:
  CMatrix dict_;
  CMatrix atoms_;       // normalized sensing * dict
  RVector atom_norms_;  // original column norms
};

/// Builds the OMP measurement operator for the wide-beam sweep: row c is
/// the conjugated wide codeword c zero-padded to N_BS columns, so that
/// sensing * h reproduces the clean sweep responses (conjugated).
CMatrix omp_sweep_sensing(const WideBeamCodebook& wide_cb, int n_bs);

/// Sweep observations of one user rearranged into the OMP measurement
/// vector (codeword order, conjugated to match omp_sweep_sensing).
CVector omp_measurements(const GainMatrix& gains);

/// Benchmark 4, precoding step: analog column k = h_k normalized (maximum
/// ratio direction for the h^H f response convention).
CMatrix mrc_analog(const std::vector<CVector>& estimates);

}  // namespace nfbt
