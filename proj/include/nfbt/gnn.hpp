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
#include <span>
#include <vector>

#include "nfbt/codebooks.hpp"
#include "nfbt/linalg.hpp"
#include "nfbt/pilot_sim.hpp"
#include "nfbt/rng.hpp"

namespace nfbt {

using FeatureVector = RVector;

/// One graph updating layer: ReLU(W [z; z_agg] + bias). W maps the
/// concatenated input (own features stacked on the aggregated neighbor
/// features) back to the feature width V.
struct UpdateLayerParams {
  RMatrix weight;  // V x (2 * previous width)
  RVector bias;    // V
};

struct AffineParams {
  RMatrix weight;
  RVector bias;
};

/// Parameters of one estimation network (the angle and distance networks
/// share this structure, differing only in the output width).
struct NetworkParams {
  std::vector<UpdateLayerParams> updating_layers;  // L_G layers
  AffineParams fc_hidden;  // V -> V, ReLU
  AffineParams fc_out;     // V -> C_out, Softmax
  /// Fixed input standardization applied to the preprocessed features
  /// before the first updating layer. Physical pilot gains are of order
  /// 1e-4, which leaves the network in a dead regime under the plain
  /// fan-in initialization; training sets this to 1 / RMS of the training
  /// features. Not a trained parameter.
  double input_scale = 1.0;

  int input_dim() const {
    return static_cast<int>(updating_layers.front().weight.cols() / 2);
  }
  int feature_dim() const { return static_cast<int>(fc_hidden.weight.rows()); }
  int output_dim() const { return static_cast<int>(fc_out.weight.rows()); }

  /// Weights uniform in (-sqrt(1/fan_in), sqrt(1/fan_in)), zero biases.
  static NetworkParams init(int input_dim, int feature_dim, int num_layers, int output_dim,
                            Rng& rng);
  static NetworkParams zeros_like(const NetworkParams& p);
};

/// Angle network and distance network evaluated side by side on the same
/// wide-beam gain information.
struct DualParams {
  NetworkParams angle;
  NetworkParams dist;
};

/// Softmax outputs of both heads for one user.
struct ProbabilityPair {
  RVector angle;  // length N_BS
  RVector dist;   // length S
};

/// mean_others: element-wise mean over all users except the target (the
/// graph aggregation); zeroed: aggregation forced to zero, which turns the
/// GNN into the per-user FC ablation.
enum class Aggregation { mean_others, zeroed };

/// z0 = [vec(Re R); vec(Im R)], column-major vectorization.
FeatureVector preprocess(const GainMatrix& gains);

/// Element-wise mean over features of all users except k; the zero vector
/// when the neighbor set is empty (K = 1).
FeatureVector aggregate(const std::vector<FeatureVector>& features, int k);

/// Concatenation [z; z_agg].
FeatureVector combine(const FeatureVector& z, const FeatureVector& z_agg);

FeatureVector update_layer(const UpdateLayerParams& params, const FeatureVector& v);

/// Full forward pass of both networks over one scenario's users.
std::vector<ProbabilityPair> forward(const NetworkParams& angle_net,
                                     const NetworkParams& dist_net,
                                     const std::vector<GainMatrix>& gains,
                                     Aggregation mode = Aggregation::mean_others);

/// Joint codeword probabilities p(n, s) = p_a(n) p_d(s), flattened in
/// (s - 1) * N_BS + n order.
RVector combine_probabilities(const ProbabilityPair& pair);

/// Top-1 prediction of a pair (argmax of the joint probability; ties go to
/// the smaller index).
CodewordIndex argmax_pair(const ProbabilityPair& pair);

struct TrainSample {
  std::vector<GainMatrix> gains;     // K gain matrices
  std::vector<CodewordIndex> labels; // K labels
};

using Dataset = std::vector<TrainSample>;

/// Mean summed cross-entropy of the angle and distance heads over all users
/// of the batch, with exact reverse-mode gradients shaped like the
/// parameters. Throws NumericalError when the loss is not finite.
std::pair<double, DualParams> loss_and_gradients(const DualParams& params,
                                                 std::span<const TrainSample> batch,
                                                 Aggregation mode = Aggregation::mean_others);

/// Loss only (used by the finite-difference tests).
double batch_loss(const DualParams& params, std::span<const TrainSample> batch,
                  Aggregation mode = Aggregation::mean_others);

struct TrainSchedule {
  double initial_lr = 0.006;
  int epochs = 50;
  int batch_size = 800;
  int plateau_epochs = 2;          // flat epochs before the lr decays
  double lr_decay_factor = 0.5;
  double improve_threshold = 0.001;  // minimum accuracy gain that counts
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double validation_fraction = 0.1;

  void validate() const;
};

struct AdamState {
  DualParams m;
  DualParams v;
  long step = 0;
};

/// One bias-corrected Adam update, in place.
void adam_step(AdamState& state, DualParams& params, const DualParams& grads, double lr,
               const TrainSchedule& schedule);

struct HistoryRow {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_acc_angle = 0.0;
  double val_acc_dist = 0.0;
  double val_acc_overall = 0.0;
};

struct NetDims {
  int input_dim = 0;   // 2 * N_BS / M
  int feature_dim = 128;
  int num_layers = 3;
  int num_angles = 0;  // N_BS
  int num_rings = 0;   // S
};

/// Full training state; checkpoints persist it so an interrupted run can
/// resume and produce the same history as an uninterrupted one.
struct TrainState {
  DualParams current;
  DualParams best;
  AdamState adam;
  std::vector<HistoryRow> history;
  double lr = 0.0;
  double best_acc_plateau = -1.0;  // significant-improvement tracker
  double best_acc_exact = -1.0;    // best-parameter tracker
  int stall = 0;
  int next_epoch = 1;
};

struct AccuracyReport {
  double angle = 0.0;
  double dist = 0.0;
  double overall = 0.0;
};

AccuracyReport evaluate_accuracy(const DualParams& params, std::span<const TrainSample> samples,
                                 Aggregation mode = Aggregation::mean_others);

TrainState train_init(const TrainSchedule& schedule, const NetDims& dims, std::uint64_t seed,
                      double input_scale = 1.0);

/// 1 / RMS of the preprocessed features over (a prefix of) the dataset;
/// 1.0 for an all-zero prefix.
double feature_scale(const Dataset& dataset);

/// Runs epochs [state.next_epoch, until_epoch]. The dataset is split with
/// the first (1 - validation_fraction) samples for training and the rest
/// for validation; when the validation slice is empty the training slice
/// doubles as the plateau metric. Minibatch order for epoch e comes from
/// mix64(seed, e), so resumed runs reproduce uninterrupted ones.
void train_epochs(TrainState& state, const Dataset& dataset, const TrainSchedule& schedule,
                  int until_epoch, std::uint64_t seed,
                  Aggregation mode = Aggregation::mean_others);

struct TrainResult {
  DualParams best;
  std::vector<HistoryRow> history;
};

TrainResult train(const Dataset& dataset, const TrainSchedule& schedule, const NetDims& dims,
                  std::uint64_t seed, Aggregation mode = Aggregation::mean_others);

/// Mutable views over every parameter tensor, in a fixed documented order
/// (updating layers first, then fc_hidden, then fc_out; weight before
/// bias). Optimizer, serialization and the gradient checks all iterate
/// parameters through this.
struct TensorView {
  double* data = nullptr;
  Eigen::Index size = 0;
};
std::vector<TensorView> tensor_views(NetworkParams& p);
std::vector<TensorView> tensor_views(DualParams& p);

}  // namespace nfbt
