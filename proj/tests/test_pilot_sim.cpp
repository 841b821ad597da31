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

#include <cmath>

#include <doctest.h>

#include "nfbt/errors.hpp"
#include "nfbt/pilot_sim.hpp"

using namespace nfbt;

namespace {

Scenario small_scenario(const ArrayGeometry& g, int users, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_users = users;
  cfg.num_paths = 2;
  cfg.range_min = 3.0;
  cfg.range_max = 18.0;
  return generate_scenario(g, cfg, seed);
}

PilotConfig noiseless(int n_rf) {
  PilotConfig cfg;
  cfg.power_ul = dbm_to_watts(4.0);
  cfg.noise_ul = 0.0;
  cfg.num_rf_chains = n_rf;
  return cfg;
}

}  // namespace

TEST_CASE("noiseless sweep equals direct inner products") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const WideBeamCodebook wide = build_wide_codebook(g, 4);
  const Scenario scen = small_scenario(g, 3, 21);
  Rng rng(1);
  const std::vector<GainMatrix> gains = wide_beam_sweep(scen, wide, noiseless(4), rng);
  REQUIRE(gains.size() == 3);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(gains[k].sweeps() == 4);
    REQUIRE(gains[k].rf_chains() == 4);
    for (int t = 0; t < 4; ++t)
      for (int i = 0; i < 4; ++i) {
        // oracle: scalar loop over the active subarray
        Complex acc(0.0, 0.0);
        const int wide_idx = t * 4 + i;
        for (int a = 0; a < 16; ++a)
          acc += std::conj(scen.channels[k].h[a]) * wide.codewords(a, wide_idx);
        CHECK(std::abs(gains[k].entries(t, i) - acc) < 1e-15);
      }
  }
}

TEST_CASE("paper dimensions: T = 8 sweeps of 8 chains") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(256, 30e9);
  const WideBeamCodebook wide = build_wide_codebook(g, 4);
  ScenarioConfig cfg;
  cfg.num_users = 8;
  const Scenario scen = generate_scenario(g, cfg, 4);
  Rng rng(2);
  const std::vector<GainMatrix> gains = wide_beam_sweep(scen, wide, noiseless(8), rng);
  CHECK(gains[0].sweeps() == 8);
  CHECK(gains[0].rf_chains() == 8);
  CHECK(gains[0].entries.size() == 64);
}

TEST_CASE("sweep noise variance matches sigma^2 / P") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const WideBeamCodebook wide = build_wide_codebook(g, 4);
  // zero channel: entries are pure noise
  Scenario scen;
  scen.geometry = g;
  for (int k = 0; k < 8; ++k) {
    NearFieldChannel ch;
    ch.h = CVector::Zero(64);
    ch.los = {Complex(0, 0), 10.0, 0.0};
    scen.channels.push_back(ch);
    scen.user_positions.push_back({0, 0, 0});
  }
  PilotConfig cfg = noiseless(4);
  cfg.noise_ul = 2.5e-10;
  const double expected = cfg.noise_ul / cfg.power_ul;

  Rng rng(3);
  double acc = 0.0;
  long count = 0;
  for (int rep = 0; rep < 800; ++rep) {  // 800 * 8 users * 16 entries > 1e5 draws
    const std::vector<GainMatrix> gains = wide_beam_sweep(scen, wide, cfg, rng);
    for (const GainMatrix& gm : gains) {
      acc += gm.entries.cwiseAbs2().sum();
      count += gm.entries.size();
    }
  }
  CHECK(acc / count == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("wide index convention round-trips sweep entries") {
  GainMatrix gm;
  gm.entries.resize(4, 4);
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 4; ++i) CHECK(gm.wide_index(t, i) == t * 4 + i);
}

TEST_CASE("sweep requires divisibility") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const WideBeamCodebook wide = build_wide_codebook(g, 4);
  const Scenario scen = small_scenario(g, 1, 5);
  Rng rng(4);
  CHECK_THROWS_AS(wide_beam_sweep(scen, wide, noiseless(3), rng), ConfigError);  // 16 % 3 != 0
}

TEST_CASE("candidate probe: noiseless equals the direct product") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const NearFieldCodebook nf = build_near_field_codebook(g, 3, 3.0, 20.0);
  const Scenario scen = small_scenario(g, 1, 9);
  CMatrix candidates(64, 3);
  candidates.col(0) = nf.codewords.col(10);
  candidates.col(1) = nf.codewords.col(99);
  candidates.col(2) = nf.codewords.col(150);
  Rng rng(5);
  const PilotConfig cfg = noiseless(1);
  const CVector r = candidate_probe(scen.channels[0], candidates, cfg, rng);
  REQUIRE(r.size() == 3);
  const double amp = std::sqrt(cfg.power_ul);
  for (int i = 0; i < 3; ++i) {
    Complex acc(0.0, 0.0);
    for (int a = 0; a < 64; ++a)
      acc += std::conj(scen.channels[0].h[a]) * candidates(a, i);
    CHECK(std::abs(r[i] - amp * acc) < 1e-12);
  }
}

TEST_CASE("candidate probe: equal candidates give equal moduli") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const NearFieldCodebook nf = build_near_field_codebook(g, 3, 3.0, 20.0);
  const Scenario scen = small_scenario(g, 1, 8);
  CMatrix candidates(64, 4);
  for (int i = 0; i < 4; ++i) candidates.col(i) = nf.codewords.col(7);
  Rng rng(6);
  const CVector r = candidate_probe(scen.channels[0], candidates, noiseless(1), rng);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(r[i] - r[0]) < 1e-15);

  CMatrix single = candidates.leftCols(1);
  const CVector r1 = candidate_probe(scen.channels[0], single, noiseless(1), rng);
  CHECK(r1.size() == 1);
}

TEST_CASE("effective channel probe: noiseless and noise statistics") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const NearFieldCodebook nf = build_near_field_codebook(g, 3, 3.0, 20.0);
  const Scenario scen = small_scenario(g, 3, 13);
  CMatrix f_rf(64, 3);
  f_rf.col(0) = nf.codewords.col(3);
  f_rf.col(1) = nf.codewords.col(44);
  f_rf.col(2) = nf.codewords.col(120);

  Rng rng(7);
  const CMatrix h_ef = effective_channel_probe(scen, f_rf, noiseless(3), rng);
  REQUIRE(h_ef.rows() == 3);
  REQUIRE(h_ef.cols() == 3);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      Complex acc(0.0, 0.0);
      for (int a = 0; a < 64; ++a) acc += std::conj(scen.channels[k].h[a]) * f_rf(a, j);
      CHECK(std::abs(h_ef(k, j) - acc) < 1e-15);
    }

  // noise-only statistics
  Scenario zero = scen;
  for (NearFieldChannel& ch : zero.channels) ch.h.setZero();
  PilotConfig noisy = noiseless(3);
  noisy.noise_ul = 1e-9;
  double acc = 0.0;
  long count = 0;
  Rng rng2(8);
  for (int rep = 0; rep < 12000; ++rep) {
    const CMatrix e = effective_channel_probe(zero, f_rf, noisy, rng2);
    acc += e.cwiseAbs2().sum();
    count += e.size();
  }
  CHECK(acc / count == doctest::Approx(noisy.noise_ul / noisy.power_ul).epsilon(0.05));
}

TEST_CASE("probes are deterministic given the seed") {
  const ArrayGeometry g = ArrayGeometry::from_frequency(64, 30e9);
  const WideBeamCodebook wide = build_wide_codebook(g, 4);
  const Scenario scen = small_scenario(g, 2, 31);
  PilotConfig cfg = noiseless(2);
  cfg.noise_ul = 1e-9;
  Rng rng_a(99), rng_b(99);
  const auto a = wide_beam_sweep(scen, wide, cfg, rng_a);
  const auto b = wide_beam_sweep(scen, wide, cfg, rng_b);
  for (std::size_t k = 0; k < a.size(); ++k)
    CHECK(a[k].entries == b[k].entries);
}

TEST_CASE("pilot overhead accounting") {
  CHECK(pilot_overhead(Scheme::proposed, 256, 4, 5, 8) == 80);
  CHECK(pilot_overhead(Scheme::exhaustive, 256, 4, 5, 8) == 1280);
  CHECK(pilot_overhead(Scheme::exhaustive, 256, 4, 5, 8, true) == 1288);
  CHECK(pilot_overhead(Scheme::fc, 256, 4, 5, 8) == 80);
  CHECK(pilot_overhead(Scheme::omp, 256, 4, 5, 8) == 80);
  // 80 / 1280 = 6.25%, i.e. more than a 93% reduction
  CHECK(80.0 / 1280.0 == doctest::Approx(0.0625));

  // monotone in K and in N_BS / M
  CHECK(pilot_overhead(Scheme::proposed, 256, 4, 5, 9) >
        pilot_overhead(Scheme::proposed, 256, 4, 5, 8));
  CHECK(pilot_overhead(Scheme::proposed, 512, 4, 5, 8) >
        pilot_overhead(Scheme::proposed, 256, 4, 5, 8));
  // exhaustive = S * M * sweep portion
  CHECK(pilot_overhead(Scheme::exhaustive, 256, 4, 5, 8) == 5L * 4L * (256 / 4));
  CHECK_THROWS_AS(pilot_overhead(Scheme::proposed, 256, 3, 5, 8), ConfigError);
}
