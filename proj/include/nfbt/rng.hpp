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

#include <complex>
#include <cstdint>
#include <random>

namespace nfbt {

/// Deterministic random source. std::mt19937_64 fully specifies the bit
/// stream; the distribution transforms live here so that outputs are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n).
  int uniform_int(int n);

  /// Standard normal via Box-Muller.
  double gaussian();

  /// Circularly symmetric complex Gaussian with E|x|^2 = variance.
  std::complex<double> complex_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from (base, index). Scenario i of a
/// batch uses master_seed + i; auxiliary streams (pilot noise phases, batch
/// shuffling) use mix64 with a fixed tag so that per-user or per-epoch work
/// can run in any order and still reproduce the sequential results.
std::uint64_t mix64(std::uint64_t base, std::uint64_t index);

}  // namespace nfbt
