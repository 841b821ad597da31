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
#include <utility>
#include <vector>

#include "nfbt/linalg.hpp"
#include "nfbt/rng.hpp"

namespace nfbt {

/// Uniform linear array at the base station. The array axis is the x axis
/// of the scenario coordinate frame; antenna n sits at offset delta(n) * d
/// from the array center, delta(n) = (2n - N + 1) / 2.
struct ArrayGeometry {
  int num_antennas = 1;        // N_BS
  double carrier_freq = 0.0;   // Hz
  double wavelength = 0.0;     // m
  double spacing = 0.0;        // m, element pitch

  /// Half-wavelength array at carrier f_c (wavelength = c / f_c).
  static ArrayGeometry from_frequency(int num_antennas, double carrier_freq_hz,
                                      double spacing_wavelengths = 0.5);
  /// Explicit wavelength, for tests that pin lambda to round values.
  static ArrayGeometry from_wavelength(int num_antennas, double wavelength_m,
                                       double spacing_m);

  double delta(int n) const { return 0.5 * (2.0 * n - num_antennas + 1.0); }
  double aperture() const { return num_antennas * spacing; }
  void validate() const;
};

/// One propagation path: complex gain, range from the array center, and the
/// sine of the azimuth angle. The sine is stored directly (not the angle)
/// because every consumer of the direction needs the sine only.
struct PathComponent {
  Complex gain{0.0, 0.0};
  double distance = 0.0;    // m, > 0
  double sine_angle = 0.0;  // in [-1, 1]
};

/// Per-user channel vector together with the paths that generated it, so a
/// stored channel can always be regenerated from its components.
struct NearFieldChannel {
  CVector h;                        // length N_BS
  PathComponent los;
  std::vector<PathComponent> nlos;  // length L - 1, may be empty
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

/// A drawn multiuser drop: K users clustered inside the bounds, a scatterer
/// pool shared by all users of the drop, and the synthesized channels.
struct Scenario {
  ArrayGeometry geometry;
  std::vector<Vec3> user_positions;
  std::vector<Vec3> scatterer_positions;
  std::vector<NearFieldChannel> channels;
  std::uint64_t seed = 0;

  int num_users() const { return static_cast<int>(channels.size()); }
  int num_paths() const;  // L, identical for every user
};

struct ScenarioConfig {
  int num_users = 8;              // K
  double cluster_diameter = 6.0;  // m, max pairwise user distance
  double range_min = 3.0;         // m, user range window
  double range_max = 39.0;
  int num_paths = 3;              // L = 1 LoS + (L-1) NLoS
  double nlos_deficit_db = 10.0;  // NLoS power below LoS power
  int scatterer_pool = 4;         // shared scatterers per drop
  Vec3 bounds{40.0, 30.0, 5.0};   // box (0,0,0)..(bounds)
  Vec3 bs_position{15.0, 0.0, 2.0};

  void validate() const;
};

/// Distance from antenna n to a point at range r and direction sine phi:
/// sqrt(r^2 + delta_n^2 d^2 - 2 r phi delta_n d). Throws std::domain_error
/// when the radicand is negative (non-physical source inside the array).
double element_distance(const ArrayGeometry& geom, double r, double phi, int n);

/// Spherical-wavefront steering vector, entry n =
/// exp(j 2 pi / lambda (r_n - r)) / sqrt(N_BS). Unit Euclidean norm.
CVector steering_vector(const ArrayGeometry& geom, double r, double phi);

/// h = sqrt(N) a0 b(r0, phi0) + sqrt(N / (L-1)) sum_l a_l b(r_l, phi_l).
/// The NLoS term is absent when nlos is empty.
NearFieldChannel synthesize_channel(const ArrayGeometry& geom,
                                    const PathComponent& los,
                                    const std::vector<PathComponent>& nlos);

/// Draws one scenario: a user cluster of the configured diameter inside the
/// bounds, a shared scatterer pool, free-space LoS gains and complex
/// Gaussian NLoS gains sitting nlos_deficit_db below LoS power.
/// Deterministic given (config, seed).
Scenario generate_scenario(const ArrayGeometry& geom, const ScenarioConfig& cfg,
                           std::uint64_t seed);

/// Near/far field boundary 2 (N d)^2 / lambda.
double rayleigh_distance(const ArrayGeometry& geom);

/// (range, direction sine) of a point seen from the BS. The sine comes from
/// the horizontal projection onto the array plane; z offsets only affect
/// the range.
std::pair<double, double> polar_from_position(const Vec3& bs, const Vec3& p);

/// Response of beamformer f to channel h. The stored channel vector is the
/// column form of the downlink channel, so the product conjugates the
/// channel side: response = h^H f. All pilot observations, labels and rate
/// expressions use this one convention.
inline Complex beam_response(const CVector& h, const CVector& f) { return h.dot(f); }

}  // namespace nfbt
