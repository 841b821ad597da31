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

#include "nfbt/precoder.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "nfbt/errors.hpp"

namespace nfbt {

namespace {
constexpr double kConditionLimit = 1e12;
}

CMatrix assemble_analog(const AllocationResult& allocation, const NearFieldCodebook& codebook) {
  CMatrix f_rf(codebook.codewords.rows(), allocation.assigned.size());
  for (std::size_t k = 0; k < allocation.assigned.size(); ++k) {
    const int flat = allocation.assigned[k];
    if (flat < 1 || flat > codebook.size())
      throw std::out_of_range("assemble_analog: flat codeword index out of range");
    f_rf.col(static_cast<Eigen::Index>(k)) = codebook.codewords.col(flat - 1);
  }
  return f_rf;
}

CMatrix zf_digital(const CMatrix& h_ef) {
  if (h_ef.rows() != h_ef.cols()) throw ConfigError("zf_digital: effective channel must be square");
  const Eigen::JacobiSVD<CMatrix> svd(h_ef);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0.0) || smax / smin > kConditionLimit)
    throw NumericalError("zf_digital: effective channel is singular (degenerate allocation)");
  const CMatrix gram = h_ef * h_ef.adjoint();
  return h_ef.adjoint() * gram.inverse();
}

CMatrix mmse_digital(const CMatrix& h_ef, double power_dl, int num_users, double noise_dl) {
  if (h_ef.rows() != h_ef.cols())
    throw ConfigError("mmse_digital: effective channel must be square");
  if (!(power_dl > 0.0) || num_users < 1 || noise_dl < 0.0)
    throw ConfigError("mmse_digital: invalid power parameters");
  const CMatrix gram = (power_dl / num_users) * (h_ef * h_ef.adjoint()) +
                       noise_dl * CMatrix::Identity(h_ef.rows(), h_ef.rows());
  return h_ef.adjoint() * gram.inverse();
}

void normalize_columns(const CMatrix& f_rf, CMatrix& f_bb) {
  if (f_rf.cols() != f_bb.rows()) throw ConfigError("normalize_columns: shape mismatch");
  for (Eigen::Index k = 0; k < f_bb.cols(); ++k) {
    const double norm = (f_rf * f_bb.col(k)).norm();
    if (!(norm > 0.0))
      throw NumericalError("normalize_columns: zero-power digital column");
    f_bb.col(k) /= norm;
  }
}

RVector per_user_rates(const Scenario& scenario, const HybridPrecoder& precoder, double power_dl,
                       double noise_dl) {
  const int num_users = scenario.num_users();
  if (precoder.f_rf.cols() != precoder.f_bb.rows() || precoder.f_bb.cols() != num_users)
    throw ConfigError("per_user_rates: precoder shapes do not match the scenario");
  const double power_share = power_dl / static_cast<double>(num_users);

  RVector rates(num_users);
  for (int k = 0; k < num_users; ++k) {
    const CVector& h = scenario.channels[k].h;
    // w_n = h_k^H F_RF f_n^BB for all n at once
    const CVector effective_row = (precoder.f_rf.adjoint() * h).conjugate();
    const CVector w = precoder.f_bb.transpose() * effective_row;
    const double signal = power_share * std::norm(w[k]);
    double interference = 0.0;
    for (int n = 0; n < num_users; ++n)
      if (n != k) interference += power_share * std::norm(w[n]);
    rates[k] = std::log2(1.0 + signal / (interference + noise_dl));
  }
  return rates;
}

double effective_sum_rate(double sum_rate, long pilot_symbols, double symbol_time,
                          double frame_time) {
  if (pilot_symbols < 0 || !(symbol_time > 0.0) || !(frame_time > 0.0))
    throw ConfigError("effective_sum_rate: invalid timing parameters");
  const double pilot_time = static_cast<double>(pilot_symbols) * symbol_time;
  if (pilot_time > frame_time)
    throw ConfigError("effective_sum_rate: pilot symbols exceed the frame");
  return (1.0 - pilot_time / frame_time) * sum_rate;
}

double estimation_accuracy(const std::vector<CodewordIndex>& predicted,
                           const std::vector<CodewordIndex>& labels) {
  if (predicted.size() != labels.size())
    throw ConfigError("estimation_accuracy: length mismatch");
  if (predicted.empty()) return 0.0;
  long hits = 0;
  for (std::size_t k = 0; k < predicted.size(); ++k)
    hits += predicted[k].angle == labels[k].angle && predicted[k].ring == labels[k].ring;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace nfbt
