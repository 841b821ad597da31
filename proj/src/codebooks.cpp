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

#include "nfbt/codebooks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nfbt/errors.hpp"

namespace nfbt {

CVector wide_codeword(const ArrayGeometry& geom, int beams_per_wide, int n) {
  const int n_bs = geom.num_antennas;
  if (beams_per_wide < 1 || n_bs % beams_per_wide != 0)
    throw ConfigError("wide_codeword: N_BS must be divisible by M");
  const int len = n_bs / beams_per_wide;
  if (n < 1 || n > len) throw std::out_of_range("wide_codeword: index out of range");

  const double phi = -1.0 + (2.0 * n - 1.0) / static_cast<double>(len);
  const double scale = std::sqrt(static_cast<double>(beams_per_wide) / n_bs);
  const double step = 2.0 * kPi * geom.spacing / geom.wavelength * phi;
  CVector e(len);
  for (int m = 0; m < len; ++m)
    e[m] = Complex(scale * std::cos(step * m), scale * std::sin(step * m));
  return e;
}

WideBeamCodebook build_wide_codebook(const ArrayGeometry& geom, int beams_per_wide) {
  const int n_bs = geom.num_antennas;
  if (beams_per_wide < 1 || n_bs % beams_per_wide != 0)
    throw ConfigError("build_wide_codebook: N_BS must be divisible by M");
  const int len = n_bs / beams_per_wide;

  WideBeamCodebook cb;
  cb.beams_per_wide = beams_per_wide;
  cb.codewords.resize(len, len);
  cb.sine_angles.resize(len);
  for (int n = 1; n <= len; ++n) {
    cb.sine_angles[n - 1] = -1.0 + (2.0 * n - 1.0) / static_cast<double>(len);
    cb.codewords.col(n - 1) = wide_codeword(geom, beams_per_wide, n);
  }
  return cb;
}

NearFieldCodebook build_near_field_codebook(const ArrayGeometry& geom, int num_rings,
                                            double r_min, double r_max) {
  if (num_rings < 1) throw ConfigError("near_field_codebook: need S >= 1");
  if (!(r_min > 0.0) || !(r_min < r_max))
    throw ConfigError("near_field_codebook: need 0 < r_min < r_max");

  const int n_bs = geom.num_antennas;
  NearFieldCodebook cb;
  cb.sine_angles.resize(n_bs);
  for (int n = 1; n <= n_bs; ++n)
    cb.sine_angles[n - 1] = -1.0 + (2.0 * n - 1.0) / static_cast<double>(n_bs);

  // uniform sampling in reciprocal distance, s = 1 farthest
  cb.ring_distances.resize(num_rings);
  if (num_rings == 1) {
    cb.ring_distances[0] = r_max;
  } else {
    const double inv_max = 1.0 / r_max;
    const double inv_min = 1.0 / r_min;
    for (int s = 1; s <= num_rings; ++s) {
      const double inv = inv_max + (static_cast<double>(s - 1) / (num_rings - 1)) * (inv_min - inv_max);
      cb.ring_distances[s - 1] = 1.0 / inv;
    }
  }

  cb.codewords.resize(n_bs, static_cast<Eigen::Index>(n_bs) * num_rings);
  for (int s = 1; s <= num_rings; ++s)
    for (int n = 1; n <= n_bs; ++n)
      cb.codewords.col(flat_index(n, s, n_bs) - 1) =
          steering_vector(geom, cb.ring_distances[s - 1], cb.sine_angles[n - 1]);
  return cb;
}

int flat_index(int n, int s, int n_bs) {
  if (n < 1 || n > n_bs || s < 1)
    throw std::out_of_range("flat_index: (n, s) out of range");
  return (s - 1) * n_bs + n;
}

CodewordIndex unflatten(int flat, int n_bs) {
  if (flat < 1) throw std::out_of_range("unflatten: flat index out of range");
  CodewordIndex idx;
  idx.flat = flat;
  idx.ring = (flat - 1) / n_bs + 1;
  idx.angle = (flat - 1) % n_bs + 1;
  return idx;
}

std::vector<CodewordIndex> label_scenario(const Scenario& scenario,
                                          const NearFieldCodebook& codebook) {
  if (scenario.geometry.num_antennas != codebook.num_angles())
    throw ConfigError("label_scenario: scenario and codebook geometry mismatch");

  std::vector<CodewordIndex> labels;
  labels.reserve(scenario.channels.size());
  const int n_bs = codebook.num_angles();
  for (const NearFieldChannel& ch : scenario.channels) {
    // |h^H B| over all columns at once
    const CVector responses = codebook.codewords.transpose() * ch.h.conjugate();
    int best = 0;
    double best_gain = -1.0;
    for (int c = 0; c < responses.size(); ++c) {
      const double g = std::abs(responses[c]);
      if (g > best_gain) {
        best_gain = g;
        best = c;
      }
    }
    labels.push_back(unflatten(best + 1, n_bs));
  }
  return labels;
}

}  // namespace nfbt
