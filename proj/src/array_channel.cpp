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

#include "nfbt/array_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nfbt/errors.hpp"

namespace nfbt {

ArrayGeometry ArrayGeometry::from_frequency(int num_antennas, double carrier_freq_hz,
                                            double spacing_wavelengths) {
  ArrayGeometry g;
  g.num_antennas = num_antennas;
  g.carrier_freq = carrier_freq_hz;
  g.wavelength = kSpeedOfLight / carrier_freq_hz;
  g.spacing = spacing_wavelengths * g.wavelength;
  g.validate();
  return g;
}

ArrayGeometry ArrayGeometry::from_wavelength(int num_antennas, double wavelength_m,
                                             double spacing_m) {
  ArrayGeometry g;
  g.num_antennas = num_antennas;
  g.wavelength = wavelength_m;
  g.carrier_freq = kSpeedOfLight / wavelength_m;
  g.spacing = spacing_m;
  g.validate();
  return g;
}

void ArrayGeometry::validate() const {
  if (num_antennas < 1) throw ConfigError("geometry: num_antennas must be >= 1");
  if (!(wavelength > 0.0)) throw ConfigError("geometry: wavelength must be positive");
  if (!(spacing > 0.0)) throw ConfigError("geometry: spacing must be positive");
}

int Scenario::num_paths() const {
  if (channels.empty()) return 0;
  return 1 + static_cast<int>(channels.front().nlos.size());
}

void ScenarioConfig::validate() const {
  if (num_users < 1) throw ConfigError("scenario: num_users must be >= 1");
  if (!(cluster_diameter > 0.0)) throw ConfigError("scenario: cluster_diameter must be positive");
  if (!(range_min > 0.0) || range_min >= range_max)
    throw ConfigError("scenario: need 0 < range_min < range_max");
  if (num_paths < 1) throw ConfigError("scenario: num_paths must be >= 1");
  if (scatterer_pool < num_paths - 1)
    throw ConfigError("scenario: scatterer_pool smaller than the NLoS paths per user");
  if (!(bounds.x > 0.0) || !(bounds.y > 0.0) || !(bounds.z > 0.0))
    throw ConfigError("scenario: bounds must be positive");
}

double element_distance(const ArrayGeometry& geom, double r, double phi, int n) {
  if (n < 0 || n >= geom.num_antennas)
    throw std::out_of_range("element_distance: antenna index out of range");
  if (!(r > 0.0)) throw std::domain_error("element_distance: range must be positive");
  const double dn = geom.delta(n) * geom.spacing;
  const double radicand = r * r + dn * dn - 2.0 * r * phi * dn;
  if (radicand < 0.0)
    throw std::domain_error("element_distance: negative radicand (source inside the array)");
  return std::sqrt(radicand);
}

CVector steering_vector(const ArrayGeometry& geom, double r, double phi) {
  if (std::abs(phi) > 1.0)
    throw std::domain_error("steering_vector: |sine angle| must be <= 1");
  const int n = geom.num_antennas;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double wavenumber = 2.0 * kPi / geom.wavelength;
  CVector b(n);
  for (int i = 0; i < n; ++i) {
    const double phase = wavenumber * (element_distance(geom, r, phi, i) - r);
    b[i] = Complex(scale * std::cos(phase), scale * std::sin(phase));
  }
  return b;
}

NearFieldChannel synthesize_channel(const ArrayGeometry& geom, const PathComponent& los,
                                    const std::vector<PathComponent>& nlos) {
  NearFieldChannel ch;
  ch.los = los;
  ch.nlos = nlos;
  const double root_n = std::sqrt(static_cast<double>(geom.num_antennas));
  ch.h = root_n * los.gain * steering_vector(geom, los.distance, los.sine_angle);
  if (!nlos.empty()) {
    const double nlos_scale = root_n / std::sqrt(static_cast<double>(nlos.size()));
    for (const PathComponent& p : nlos)
      ch.h += nlos_scale * p.gain * steering_vector(geom, p.distance, p.sine_angle);
  }
  return ch;
}

double rayleigh_distance(const ArrayGeometry& geom) {
  const double aperture = geom.aperture();
  return 2.0 * aperture * aperture / geom.wavelength;
}

std::pair<double, double> polar_from_position(const Vec3& bs, const Vec3& p) {
  const double dx = p.x - bs.x;
  const double dy = p.y - bs.y;
  const double dz = p.z - bs.z;
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  const double horizontal = std::hypot(dx, dy);
  const double phi = horizontal > 0.0 ? dx / horizontal : 0.0;
  return {r, phi};
}

namespace {

Vec3 uniform_in_box(Rng& rng, const Vec3& bounds) {
  return {rng.uniform(0.0, bounds.x), rng.uniform(0.0, bounds.y), rng.uniform(0.0, bounds.z)};
}

// Uniform draw in ball(center, radius) intersected with the bounding box.
Vec3 uniform_in_cluster(Rng& rng, const Vec3& center, double radius, const Vec3& bounds) {
  for (int attempt = 0; attempt < 4096; ++attempt) {
    const double x = center.x + rng.uniform(-radius, radius);
    const double y = center.y + rng.uniform(-radius, radius);
    const double z = center.z + rng.uniform(-radius, radius);
    const double dx = x - center.x, dy = y - center.y, dz = z - center.z;
    if (dx * dx + dy * dy + dz * dz > radius * radius) continue;
    if (x < 0.0 || x > bounds.x || y < 0.0 || y > bounds.y || z < 0.0 || z > bounds.z) continue;
    return {x, y, z};
  }
  throw ConfigError("generate_scenario: cluster does not intersect the bounds");
}

// First k entries of a Fisher-Yates shuffle of 0..n-1.
std::vector<int> sample_without_replacement(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
  idx.resize(k);
  return idx;
}

}  // namespace

Scenario generate_scenario(const ArrayGeometry& geom, const ScenarioConfig& cfg,
                           std::uint64_t seed) {
  geom.validate();
  cfg.validate();
  if (cfg.cluster_diameter > std::max({cfg.bounds.x, cfg.bounds.y, cfg.bounds.z}) * 2.0)
    throw ConfigError("generate_scenario: bounds cannot contain the cluster");

  Rng rng(seed);
  Scenario scen;
  scen.geometry = geom;
  scen.seed = seed;

  scen.scatterer_positions.reserve(cfg.scatterer_pool);
  for (int i = 0; i < cfg.scatterer_pool; ++i) {
    Vec3 s = uniform_in_box(rng, cfg.bounds);
    // keep scatterers off the array itself
    for (int attempt = 0; attempt < 1000 && polar_from_position(cfg.bs_position, s).first < 0.5;
         ++attempt)
      s = uniform_in_box(rng, cfg.bounds);
    scen.scatterer_positions.push_back(s);
  }

  const double radius = 0.5 * cfg.cluster_diameter;
  bool placed = false;
  for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
    const Vec3 center = uniform_in_box(rng, cfg.bounds);
    std::vector<Vec3> users;
    users.reserve(cfg.num_users);
    bool ok = true;
    for (int k = 0; k < cfg.num_users && ok; ++k) {
      const Vec3 u = uniform_in_cluster(rng, center, radius, cfg.bounds);
      const auto [r, phi] = polar_from_position(cfg.bs_position, u);
      if (r < cfg.range_min || r > cfg.range_max) {
        ok = false;
        break;
      }
      (void)phi;
      users.push_back(u);
    }
    if (ok) {
      scen.user_positions = std::move(users);
      placed = true;
    }
  }
  if (!placed)
    throw ConfigError(
        "generate_scenario: could not place a user cluster satisfying the range window");

  const int num_nlos = cfg.num_paths - 1;
  const double deficit = std::pow(10.0, -cfg.nlos_deficit_db / 10.0);
  scen.channels.reserve(cfg.num_users);
  for (const Vec3& u : scen.user_positions) {
    const auto [r0, phi0] = polar_from_position(cfg.bs_position, u);
    PathComponent los;
    los.distance = r0;
    los.sine_angle = phi0;
    const double magnitude = geom.wavelength / (4.0 * kPi * r0);
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    los.gain = Complex(magnitude * std::cos(theta), magnitude * std::sin(theta));

    std::vector<PathComponent> nlos;
    if (num_nlos > 0) {
      const double nlos_var = magnitude * magnitude * deficit;
      for (int idx : sample_without_replacement(rng, cfg.scatterer_pool, num_nlos)) {
        PathComponent p;
        const auto [rl, phil] = polar_from_position(cfg.bs_position, scen.scatterer_positions[idx]);
        p.distance = rl;
        p.sine_angle = phil;
        p.gain = rng.complex_gaussian(nlos_var);
        nlos.push_back(p);
      }
    }
    scen.channels.push_back(synthesize_channel(geom, los, nlos));
  }
  return scen;
}

}  // namespace nfbt
