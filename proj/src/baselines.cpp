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

#include "nfbt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

#include "nfbt/errors.hpp"

namespace nfbt {

ExhaustiveResult exhaustive_search(const Scenario& scenario, const NearFieldCodebook& codebook,
                                   const PilotConfig& cfg, Rng& rng) {
  cfg.validate();
  if (scenario.geometry.num_antennas != codebook.num_angles())
    throw ConfigError("exhaustive_search: scenario and codebook geometry mismatch");
  const int num_users = scenario.num_users();
  const double amp = std::sqrt(cfg.power_ul);

  const std::uint64_t stream_base = rng.next_u64();
  ExhaustiveResult result;
  result.gains.reserve(num_users);
  result.top.reserve(num_users);
  std::vector<SortedCandidates> sorted(num_users);
  for (int k = 0; k < num_users; ++k) {
    Rng user_rng(mix64(stream_base, static_cast<std::uint64_t>(k)));
    // sqrt(P) h^H b_c for every codeword at once
    CVector probe = amp * (codebook.codewords.transpose() * scenario.channels[k].h.conjugate());
    if (cfg.noise_ul > 0.0)
      for (Eigen::Index c = 0; c < probe.size(); ++c)
        probe[c] += user_rng.complex_gaussian(cfg.noise_ul);

    RVector moduli = probe.cwiseAbs();
    const std::vector<int> candidates = select_candidates(moduli, num_users);
    SortedCandidates sc;
    for (int flat : candidates) {
      sc.indices.push_back(flat);
      sc.moduli.push_back(moduli[flat - 1]);
    }
    sorted[k] = std::move(sc);
    result.top.push_back(unflatten(candidates.front(), codebook.num_angles()));
    result.gains.push_back(std::move(probe));
  }
  result.allocation = allocate_beams(sorted);
  return result;
}

std::vector<ProbabilityPair> fc_ablation_forward(const DualParams& params,
                                                 const std::vector<GainMatrix>& gains) {
  return forward(params.angle, params.dist, gains, Aggregation::zeroed);
}

OmpSolver::OmpSolver(const CMatrix& sensing, const CMatrix& dict) : dict_(dict) {
  if (sensing.cols() != dict.rows())
    throw ConfigError("OmpSolver: sensing and dictionary shapes do not chain");
  atoms_ = sensing * dict;
  atom_norms_.resize(atoms_.cols());
  for (Eigen::Index c = 0; c < atoms_.cols(); ++c) {
    const double norm = atoms_.col(c).norm();
    atom_norms_[c] = norm;
    if (norm > 0.0) atoms_.col(c) /= norm;
  }
}

CVector OmpSolver::estimate(const CVector& y, int sparsity) const {
  if (sparsity < 1) throw ConfigError("omp: sparsity must be >= 1");
  if (sparsity > y.size())
    throw ConfigError("omp: sparsity exceeds the measurement count");
  if (y.size() != atoms_.rows()) throw ConfigError("omp: measurement length mismatch");

  CVector residual = y;
  std::vector<Eigen::Index> support;
  CVector coeffs;
  double previous_norm = residual.norm();
  for (int it = 0; it < sparsity; ++it) {
    // atom most correlated with the residual, skipping chosen ones
    const CVector correlation = atoms_.adjoint() * residual;
    Eigen::Index best = -1;
    double best_abs = -1.0;
    for (Eigen::Index c = 0; c < correlation.size(); ++c) {
      if (std::find(support.begin(), support.end(), c) != support.end()) continue;
      const double a = std::abs(correlation[c]);
      if (a > best_abs) {
        best_abs = a;
        best = c;
      }
    }
    if (best < 0) break;
    support.push_back(best);

    CMatrix subdict(atoms_.rows(), support.size());
    for (std::size_t i = 0; i < support.size(); ++i) subdict.col(i) = atoms_.col(support[i]);
    coeffs = subdict.colPivHouseholderQr().solve(y);
    residual = y - subdict * coeffs;

    const double norm = residual.norm();
    if (norm > previous_norm * (1.0 + 1e-9))
      throw NumericalError("omp: residual increased");
    previous_norm = norm;
  }

  CVector estimate = CVector::Zero(dict_.rows());
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double scale = atom_norms_[support[i]];
    if (scale > 0.0) estimate += dict_.col(support[i]) * (coeffs[i] / scale);
  }
  return estimate;
}

CVector omp_estimate(const CVector& y, const CMatrix& sensing, const CMatrix& dict,
                     int sparsity) {
  return OmpSolver(sensing, dict).estimate(y, sparsity);
}

CMatrix omp_sweep_sensing(const WideBeamCodebook& wide_cb, int n_bs) {
  const int subarray = wide_cb.subarray();
  if (subarray > n_bs) throw ConfigError("omp_sweep_sensing: subarray larger than the array");
  CMatrix sensing = CMatrix::Zero(wide_cb.size(), n_bs);
  for (int c = 0; c < wide_cb.size(); ++c)
    sensing.row(c).head(subarray) = wide_cb.codewords.col(c).conjugate().transpose();
  return sensing;
}

CVector omp_measurements(const GainMatrix& gains) {
  CVector y(gains.entries.size());
  for (int t = 0; t < gains.sweeps(); ++t)
    for (int i = 0; i < gains.rf_chains(); ++i)
      y[gains.wide_index(t, i)] = std::conj(gains.entries(t, i));
  return y;
}

CMatrix mrc_analog(const std::vector<CVector>& estimates) {
  if (estimates.empty()) throw ConfigError("mrc_analog: no estimates");
  CMatrix f_rf(estimates.front().size(), estimates.size());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const double norm = estimates[k].norm();
    if (!(norm > 0.0)) throw NumericalError("mrc_analog: zero-norm channel estimate");
    f_rf.col(static_cast<Eigen::Index>(k)) = estimates[k] / norm;
  }
  return f_rf;
}

}  // namespace nfbt
