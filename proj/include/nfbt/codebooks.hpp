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
#include "nfbt/linalg.hpp"

namespace nfbt {

/// Far-field wide-beam codebook: N_BS / M codewords of length N_BS / M,
/// meant for a subarray of the first N_BS / M elements. Column n - 1 holds
/// codeword n (indices are 1-based at the API, matching (n, s) notation).
struct WideBeamCodebook {
  int beams_per_wide = 1;  // M
  CMatrix codewords;       // (N_BS/M) x (N_BS/M)
  RVector sine_angles;     // length N_BS/M

  int size() const { return static_cast<int>(codewords.cols()); }
  int subarray() const { return static_cast<int>(codewords.rows()); }
};

/// Polar near-field codebook: N_BS sine-angles times S distance rings.
/// Column (s-1) * N_BS + n - 1 holds codeword (n, s); ring distances are
/// angle-independent and strictly decreasing in s.
struct NearFieldCodebook {
  RVector sine_angles;     // length N_BS
  RVector ring_distances;  // length S
  CMatrix codewords;       // N_BS x (N_BS * S)

  int num_angles() const { return static_cast<int>(sine_angles.size()); }
  int num_rings() const { return static_cast<int>(ring_distances.size()); }
  int size() const { return static_cast<int>(codewords.cols()); }
};

/// 1-based (angle, ring) pair with its flat index (s-1) * N_BS + n.
struct CodewordIndex {
  int angle = 1;  // n in 1..N_BS
  int ring = 1;   // s in 1..S
  int flat = 1;   // 1..N_BS*S

  friend bool operator==(const CodewordIndex&, const CodewordIndex&) = default;
};

/// Wide-beam codeword n (1-based): entry m = sqrt(M/N_BS)
/// exp(j 2 pi d / lambda m phi_n), phi_n = -1 + (2n - 1) / (N_BS / M).
CVector wide_codeword(const ArrayGeometry& geom, int beams_per_wide, int n);

WideBeamCodebook build_wide_codebook(const ArrayGeometry& geom, int beams_per_wide);

/// Angles phi_n = -1 + (2n - 1) / N_BS; ring distances sampled uniformly in
/// 1/r between r_max (s = 1) and r_min (s = S). Codeword (n, s) is the
/// steering vector at (ring s, angle n).
NearFieldCodebook build_near_field_codebook(const ArrayGeometry& geom, int num_rings,
                                            double r_min, double r_max);

int flat_index(int n, int s, int n_bs);
CodewordIndex unflatten(int flat, int n_bs);

/// Per-user best codeword: argmax over all columns of |h^H b|, ties broken
/// by the smallest flat index.
std::vector<CodewordIndex> label_scenario(const Scenario& scenario,
                                          const NearFieldCodebook& codebook);

}  // namespace nfbt
