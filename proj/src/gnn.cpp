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

#include "nfbt/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "nfbt/errors.hpp"

namespace nfbt {

namespace {

RMatrix relu(const RMatrix& x) { return x.cwiseMax(0.0); }

RMatrix relu_mask(const RMatrix& post_activation) {
  return (post_activation.array() > 0.0).cast<double>().matrix();
}

// Column ranges of each scenario inside a concatenated batch matrix.
struct BatchLayout {
  std::vector<Eigen::Index> offset;  // size = scenarios + 1

  Eigen::Index scenarios() const { return static_cast<Eigen::Index>(offset.size()) - 1; }
  Eigen::Index total() const { return offset.back(); }
};

struct PreparedBatch {
  RMatrix z0;  // input_dim x total users
  BatchLayout layout;
  std::vector<int> angle_labels;  // 0-based, empty when labels are absent
  std::vector<int> ring_labels;
};

PreparedBatch prepare_batch(std::span<const TrainSample* const> samples, bool with_labels) {
  if (samples.empty()) throw ConfigError("gnn: empty batch");
  PreparedBatch b;
  b.layout.offset.push_back(0);
  Eigen::Index total = 0;
  for (const TrainSample* s : samples) {
    if (s->gains.empty()) throw ConfigError("gnn: sample without users");
    total += static_cast<Eigen::Index>(s->gains.size());
    b.layout.offset.push_back(total);
  }
  const FeatureVector first = preprocess(samples.front()->gains.front());
  b.z0.resize(first.size(), total);

  Eigen::Index col = 0;
  for (const TrainSample* s : samples) {
    for (std::size_t k = 0; k < s->gains.size(); ++k) {
      const FeatureVector z = preprocess(s->gains[k]);
      if (z.size() != b.z0.rows()) throw ConfigError("gnn: inconsistent gain matrix shapes");
      b.z0.col(col++) = z;
      if (with_labels) {
        if (s->labels.size() != s->gains.size())
          throw ConfigError("gnn: labels and gains disagree on user count");
        b.angle_labels.push_back(s->labels[k].angle - 1);
        b.ring_labels.push_back(s->labels[k].ring - 1);
      }
    }
  }
  return b;
}

// Column k of the result is the element-wise mean over the other columns of
// the same scenario block (zero for K = 1 or in the FC ablation).
RMatrix aggregate_blocks(const RMatrix& z, const BatchLayout& layout, Aggregation mode) {
  RMatrix agg = RMatrix::Zero(z.rows(), z.cols());
  if (mode == Aggregation::zeroed) return agg;
  for (Eigen::Index s = 0; s < layout.scenarios(); ++s) {
    const Eigen::Index begin = layout.offset[s];
    const Eigen::Index count = layout.offset[s + 1] - begin;
    if (count < 2) continue;
    const RVector sum = z.middleCols(begin, count).rowwise().sum();
    agg.middleCols(begin, count) =
        (sum.replicate(1, count) - z.middleCols(begin, count)) / static_cast<double>(count - 1);
  }
  return agg;
}

struct NetworkCache {
  std::vector<RMatrix> z;  // z[0] = inputs, z[l] = layer l output
  std::vector<RMatrix> v;  // combined layer inputs
  RMatrix hidden;
  RMatrix logits;
  RMatrix probs;
  RVector lse;  // per-column log-sum-exp of the logits
};

NetworkCache forward_network(const NetworkParams& net, const RMatrix& z0,
                             const BatchLayout& layout, Aggregation mode) {
  NetworkCache cache;
  const std::size_t num_layers = net.updating_layers.size();
  cache.z.reserve(num_layers + 1);
  cache.v.reserve(num_layers);
  cache.z.push_back(net.input_scale == 1.0 ? z0 : RMatrix(net.input_scale * z0));

  for (std::size_t l = 0; l < num_layers; ++l) {
    const RMatrix& prev = cache.z.back();
    const RMatrix agg = aggregate_blocks(prev, layout, mode);
    RMatrix v(2 * prev.rows(), prev.cols());
    v.topRows(prev.rows()) = prev;
    v.bottomRows(prev.rows()) = agg;
    const UpdateLayerParams& layer = net.updating_layers[l];
    if (layer.weight.cols() != v.rows())
      throw ConfigError("gnn: updating layer shape mismatch");
    cache.z.push_back(relu((layer.weight * v).colwise() + layer.bias));
    cache.v.push_back(std::move(v));
  }

  cache.hidden = relu((net.fc_hidden.weight * cache.z.back()).colwise() + net.fc_hidden.bias);
  cache.logits = (net.fc_out.weight * cache.hidden).colwise() + net.fc_out.bias;

  cache.probs.resize(cache.logits.rows(), cache.logits.cols());
  cache.lse.resize(cache.logits.cols());
  for (Eigen::Index c = 0; c < cache.logits.cols(); ++c) {
    const double peak = cache.logits.col(c).maxCoeff();
    const double sum = (cache.logits.col(c).array() - peak).exp().sum();
    cache.lse[c] = peak + std::log(sum);
    cache.probs.col(c) = (cache.logits.col(c).array() - cache.lse[c]).exp();
  }
  return cache;
}

void backward_network(const NetworkParams& net, const NetworkCache& cache,
                      const RMatrix& dlogits, const BatchLayout& layout, Aggregation mode,
                      NetworkParams& grads) {
  grads.fc_out.weight.noalias() += dlogits * cache.hidden.transpose();
  grads.fc_out.bias += dlogits.rowwise().sum();

  RMatrix dhidden = (net.fc_out.weight.transpose() * dlogits).cwiseProduct(relu_mask(cache.hidden));
  const std::size_t num_layers = net.updating_layers.size();
  grads.fc_hidden.weight.noalias() += dhidden * cache.z[num_layers].transpose();
  grads.fc_hidden.bias += dhidden.rowwise().sum();

  RMatrix dz = net.fc_hidden.weight.transpose() * dhidden;
  for (std::size_t l = num_layers; l >= 1; --l) {
    const RMatrix ds = dz.cwiseProduct(relu_mask(cache.z[l]));
    grads.updating_layers[l - 1].weight.noalias() += ds * cache.v[l - 1].transpose();
    grads.updating_layers[l - 1].bias += ds.rowwise().sum();

    const RMatrix dv = net.updating_layers[l - 1].weight.transpose() * ds;
    const Eigen::Index dim = cache.z[l - 1].rows();
    RMatrix dz_prev = dv.topRows(dim);
    if (mode == Aggregation::mean_others) {
      const RMatrix da = dv.bottomRows(dim);
      for (Eigen::Index s = 0; s < layout.scenarios(); ++s) {
        const Eigen::Index begin = layout.offset[s];
        const Eigen::Index count = layout.offset[s + 1] - begin;
        if (count < 2) continue;
        const RVector sum = da.middleCols(begin, count).rowwise().sum();
        dz_prev.middleCols(begin, count) +=
            (sum.replicate(1, count) - da.middleCols(begin, count)) /
            static_cast<double>(count - 1);
      }
    }
    dz = std::move(dz_prev);
  }
}

// Cross-entropy of one head over the batch plus the softmax gradient,
// both scaled by 1 / total users.
double head_loss(const NetworkCache& cache, const std::vector<int>& labels, double weight,
                 RMatrix& dlogits) {
  double loss = 0.0;
  dlogits = cache.probs * weight;
  for (Eigen::Index c = 0; c < cache.logits.cols(); ++c) {
    const int label = labels[static_cast<std::size_t>(c)];
    if (label < 0 || label >= cache.logits.rows())
      throw ConfigError("gnn: label outside the output range");
    loss += (cache.lse[c] - cache.logits(label, c)) * weight;
    dlogits(label, c) -= weight;
  }
  return loss;
}

std::pair<double, DualParams> loss_and_gradients_prepared(const DualParams& params,
                                                          const PreparedBatch& batch,
                                                          Aggregation mode) {
  const NetworkCache cache_a = forward_network(params.angle, batch.z0, batch.layout, mode);
  const NetworkCache cache_d = forward_network(params.dist, batch.z0, batch.layout, mode);

  const double weight = 1.0 / static_cast<double>(batch.layout.total());
  RMatrix dlogits_a, dlogits_d;
  double loss = head_loss(cache_a, batch.angle_labels, weight, dlogits_a);
  loss += head_loss(cache_d, batch.ring_labels, weight, dlogits_d);
  if (!std::isfinite(loss)) throw NumericalError("gnn: training loss diverged");

  DualParams grads{NetworkParams::zeros_like(params.angle), NetworkParams::zeros_like(params.dist)};
  backward_network(params.angle, cache_a, dlogits_a, batch.layout, mode, grads.angle);
  backward_network(params.dist, cache_d, dlogits_d, batch.layout, mode, grads.dist);
  return {loss, std::move(grads)};
}

std::vector<const TrainSample*> to_pointers(std::span<const TrainSample> samples) {
  std::vector<const TrainSample*> ptrs;
  ptrs.reserve(samples.size());
  for (const TrainSample& s : samples) ptrs.push_back(&s);
  return ptrs;
}

}  // namespace

NetworkParams NetworkParams::init(int input_dim, int feature_dim, int num_layers,
                                  int output_dim, Rng& rng) {
  if (input_dim < 1 || feature_dim < 1 || num_layers < 1 || output_dim < 1)
    throw ConfigError("gnn: network dimensions must be positive");

  auto fill_uniform = [&rng](RMatrix& w) {
    const double bound = std::sqrt(1.0 / static_cast<double>(w.cols()));
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w.data()[i] = rng.uniform(-bound, bound);
  };

  NetworkParams p;
  int width = input_dim;
  for (int l = 0; l < num_layers; ++l) {
    UpdateLayerParams layer;
    layer.weight.resize(feature_dim, 2 * width);
    fill_uniform(layer.weight);
    layer.bias = RVector::Zero(feature_dim);
    p.updating_layers.push_back(std::move(layer));
    width = feature_dim;
  }
  p.fc_hidden.weight.resize(feature_dim, feature_dim);
  fill_uniform(p.fc_hidden.weight);
  p.fc_hidden.bias = RVector::Zero(feature_dim);
  p.fc_out.weight.resize(output_dim, feature_dim);
  fill_uniform(p.fc_out.weight);
  p.fc_out.bias = RVector::Zero(output_dim);
  return p;
}

NetworkParams NetworkParams::zeros_like(const NetworkParams& p) {
  NetworkParams z;
  z.input_scale = p.input_scale;
  for (const UpdateLayerParams& l : p.updating_layers)
    z.updating_layers.push_back(
        {RMatrix::Zero(l.weight.rows(), l.weight.cols()), RVector::Zero(l.bias.size())});
  z.fc_hidden = {RMatrix::Zero(p.fc_hidden.weight.rows(), p.fc_hidden.weight.cols()),
                 RVector::Zero(p.fc_hidden.bias.size())};
  z.fc_out = {RMatrix::Zero(p.fc_out.weight.rows(), p.fc_out.weight.cols()),
              RVector::Zero(p.fc_out.bias.size())};
  return z;
}

FeatureVector preprocess(const GainMatrix& gains) {
  const Eigen::Index rows = gains.entries.rows();
  const Eigen::Index cols = gains.entries.cols();
  FeatureVector z(2 * rows * cols);
  Eigen::Index pos = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z[pos++] = gains.entries(i, j).real();
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z[pos++] = gains.entries(i, j).imag();
  return z;
}

FeatureVector aggregate(const std::vector<FeatureVector>& features, int k) {
  if (features.empty()) throw ConfigError("aggregate: no features");
  if (k < 0 || k >= static_cast<int>(features.size()))
    throw std::out_of_range("aggregate: user index out of range");
  FeatureVector mean = FeatureVector::Zero(features.front().size());
  const int count = static_cast<int>(features.size()) - 1;
  if (count == 0) return mean;
  for (int j = 0; j < static_cast<int>(features.size()); ++j) {
    if (j == k) continue;
    if (features[j].size() != mean.size()) throw ConfigError("aggregate: length mismatch");
    mean += features[j];
  }
  return mean / static_cast<double>(count);
}

FeatureVector combine(const FeatureVector& z, const FeatureVector& z_agg) {
  if (z.size() != z_agg.size()) throw ConfigError("combine: length mismatch");
  FeatureVector v(2 * z.size());
  v.head(z.size()) = z;
  v.tail(z.size()) = z_agg;
  return v;
}

FeatureVector update_layer(const UpdateLayerParams& params, const FeatureVector& v) {
  if (params.weight.cols() != v.size()) throw ConfigError("update_layer: shape mismatch");
  return ((params.weight * v) + params.bias).cwiseMax(0.0);
}

std::vector<ProbabilityPair> forward(const NetworkParams& angle_net,
                                     const NetworkParams& dist_net,
                                     const std::vector<GainMatrix>& gains, Aggregation mode) {
  TrainSample sample;
  sample.gains = gains;
  const TrainSample* ptr = &sample;
  const PreparedBatch batch = prepare_batch({&ptr, 1}, /*with_labels=*/false);

  const NetworkCache cache_a = forward_network(angle_net, batch.z0, batch.layout, mode);
  const NetworkCache cache_d = forward_network(dist_net, batch.z0, batch.layout, mode);

  std::vector<ProbabilityPair> pairs;
  pairs.reserve(gains.size());
  for (Eigen::Index c = 0; c < batch.layout.total(); ++c)
    pairs.push_back({cache_a.probs.col(c), cache_d.probs.col(c)});
  return pairs;
}

RVector combine_probabilities(const ProbabilityPair& pair) {
  const Eigen::Index n_bs = pair.angle.size();
  const Eigen::Index rings = pair.dist.size();
  RVector joint(n_bs * rings);
  for (Eigen::Index s = 0; s < rings; ++s)
    for (Eigen::Index n = 0; n < n_bs; ++n) joint[s * n_bs + n] = pair.angle[n] * pair.dist[s];
  return joint;
}

CodewordIndex argmax_pair(const ProbabilityPair& pair) {
  int best_n = 0, best_s = 0;
  for (Eigen::Index n = 1; n < pair.angle.size(); ++n)
    if (pair.angle[n] > pair.angle[best_n]) best_n = static_cast<int>(n);
  for (Eigen::Index s = 1; s < pair.dist.size(); ++s)
    if (pair.dist[s] > pair.dist[best_s]) best_s = static_cast<int>(s);
  CodewordIndex idx;
  idx.angle = best_n + 1;
  idx.ring = best_s + 1;
  idx.flat = flat_index(idx.angle, idx.ring, static_cast<int>(pair.angle.size()));
  return idx;
}

std::pair<double, DualParams> loss_and_gradients(const DualParams& params,
                                                 std::span<const TrainSample> batch,
                                                 Aggregation mode) {
  const auto ptrs = to_pointers(batch);
  return loss_and_gradients_prepared(params, prepare_batch(ptrs, /*with_labels=*/true), mode);
}

double batch_loss(const DualParams& params, std::span<const TrainSample> batch,
                  Aggregation mode) {
  const auto ptrs = to_pointers(batch);
  const PreparedBatch prepared = prepare_batch(ptrs, /*with_labels=*/true);
  const NetworkCache cache_a = forward_network(params.angle, prepared.z0, prepared.layout, mode);
  const NetworkCache cache_d = forward_network(params.dist, prepared.z0, prepared.layout, mode);
  const double weight = 1.0 / static_cast<double>(prepared.layout.total());
  double loss = 0.0;
  for (Eigen::Index c = 0; c < prepared.layout.total(); ++c) {
    loss += (cache_a.lse[c] - cache_a.logits(prepared.angle_labels[c], c)) * weight;
    loss += (cache_d.lse[c] - cache_d.logits(prepared.ring_labels[c], c)) * weight;
  }
  return loss;
}

void TrainSchedule::validate() const {
  if (!(initial_lr > 0.0)) throw ConfigError("schedule: initial_lr must be positive");
  if (epochs < 1) throw ConfigError("schedule: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("schedule: batch_size must be >= 1");
  if (plateau_epochs < 1) throw ConfigError("schedule: plateau_epochs must be >= 1");
  if (!(lr_decay_factor > 0.0) || !(lr_decay_factor < 1.0))
    throw ConfigError("schedule: lr_decay_factor must be in (0, 1)");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0)
    throw ConfigError("schedule: validation_fraction must be in [0, 1)");
}

std::vector<TensorView> tensor_views(NetworkParams& p) {
  std::vector<TensorView> views;
  for (UpdateLayerParams& l : p.updating_layers) {
    views.push_back({l.weight.data(), l.weight.size()});
    views.push_back({l.bias.data(), l.bias.size()});
  }
  views.push_back({p.fc_hidden.weight.data(), p.fc_hidden.weight.size()});
  views.push_back({p.fc_hidden.bias.data(), p.fc_hidden.bias.size()});
  views.push_back({p.fc_out.weight.data(), p.fc_out.weight.size()});
  views.push_back({p.fc_out.bias.data(), p.fc_out.bias.size()});
  return views;
}

std::vector<TensorView> tensor_views(DualParams& p) {
  std::vector<TensorView> views = tensor_views(p.angle);
  const std::vector<TensorView> dist_views = tensor_views(p.dist);
  views.insert(views.end(), dist_views.begin(), dist_views.end());
  return views;
}

void adam_step(AdamState& state, DualParams& params, const DualParams& grads, double lr,
               const TrainSchedule& schedule) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(schedule.adam_beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(schedule.adam_beta2, static_cast<double>(state.step));

  const auto p_views = tensor_views(params);
  const auto m_views = tensor_views(state.m);
  const auto v_views = tensor_views(state.v);
  const auto g_views = tensor_views(const_cast<DualParams&>(grads));
  if (p_views.size() != g_views.size() || p_views.size() != m_views.size())
    throw ConfigError("adam_step: state shapes do not match the parameters");

  for (std::size_t t = 0; t < p_views.size(); ++t) {
    if (p_views[t].size != g_views[t].size || p_views[t].size != m_views[t].size ||
        p_views[t].size != v_views[t].size)
      throw ConfigError("adam_step: tensor size mismatch");
    double* p = p_views[t].data;
    double* m = m_views[t].data;
    double* v = v_views[t].data;
    const double* g = g_views[t].data;
    for (Eigen::Index i = 0; i < p_views[t].size; ++i) {
      m[i] = schedule.adam_beta1 * m[i] + (1.0 - schedule.adam_beta1) * g[i];
      v[i] = schedule.adam_beta2 * v[i] + (1.0 - schedule.adam_beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + schedule.adam_eps);
    }
  }
}

AccuracyReport evaluate_accuracy(const DualParams& params, std::span<const TrainSample> samples,
                                 Aggregation mode) {
  AccuracyReport report;
  if (samples.empty()) return report;
  long users = 0, angle_hits = 0, dist_hits = 0, both_hits = 0;

  constexpr std::size_t kChunk = 512;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, samples.size() - start);
    const auto ptrs = to_pointers(samples.subspan(start, count));
    const PreparedBatch batch = prepare_batch(ptrs, /*with_labels=*/true);
    const NetworkCache cache_a = forward_network(params.angle, batch.z0, batch.layout, mode);
    const NetworkCache cache_d = forward_network(params.dist, batch.z0, batch.layout, mode);
    for (Eigen::Index c = 0; c < batch.layout.total(); ++c) {
      Eigen::Index pred_a, pred_d;
      cache_a.probs.col(c).maxCoeff(&pred_a);
      cache_d.probs.col(c).maxCoeff(&pred_d);
      const bool a_ok = pred_a == batch.angle_labels[c];
      const bool d_ok = pred_d == batch.ring_labels[c];
      angle_hits += a_ok;
      dist_hits += d_ok;
      both_hits += a_ok && d_ok;
      ++users;
    }
  }
  report.angle = static_cast<double>(angle_hits) / static_cast<double>(users);
  report.dist = static_cast<double>(dist_hits) / static_cast<double>(users);
  report.overall = static_cast<double>(both_hits) / static_cast<double>(users);
  return report;
}

double feature_scale(const Dataset& dataset) {
  double sum_sq = 0.0;
  long count = 0;
  const std::size_t prefix = std::min<std::size_t>(dataset.size(), 256);
  for (std::size_t i = 0; i < prefix; ++i)
    for (const GainMatrix& gm : dataset[i].gains) {
      sum_sq += gm.entries.cwiseAbs2().sum();
      count += 2 * gm.entries.size();
    }
  if (count == 0 || !(sum_sq > 0.0)) return 1.0;
  return 1.0 / std::sqrt(sum_sq / static_cast<double>(count));
}

TrainState train_init(const TrainSchedule& schedule, const NetDims& dims, std::uint64_t seed,
                      double input_scale) {
  schedule.validate();
  Rng rng(seed);
  TrainState state;
  state.current.angle =
      NetworkParams::init(dims.input_dim, dims.feature_dim, dims.num_layers, dims.num_angles, rng);
  state.current.dist =
      NetworkParams::init(dims.input_dim, dims.feature_dim, dims.num_layers, dims.num_rings, rng);
  state.current.angle.input_scale = input_scale;
  state.current.dist.input_scale = input_scale;
  state.best = state.current;
  state.adam.m = {NetworkParams::zeros_like(state.current.angle),
                  NetworkParams::zeros_like(state.current.dist)};
  state.adam.v = state.adam.m;
  state.lr = schedule.initial_lr;
  return state;
}

void train_epochs(TrainState& state, const Dataset& dataset, const TrainSchedule& schedule,
                  int until_epoch, std::uint64_t seed, Aggregation mode) {
  schedule.validate();
  if (dataset.empty()) throw ConfigError("train: empty dataset");

  const long n = static_cast<long>(dataset.size());
  const long n_val = static_cast<long>(schedule.validation_fraction * static_cast<double>(n));
  const long n_train = n - n_val;
  const std::span<const TrainSample> train_span(dataset.data(), static_cast<std::size_t>(n_train));
  const std::span<const TrainSample> val_span =
      n_val > 0 ? std::span<const TrainSample>(dataset.data() + n_train,
                                               static_cast<std::size_t>(n_val))
                : train_span;

  std::vector<int> order(static_cast<std::size_t>(n_train));
  for (int epoch = state.next_epoch; epoch <= until_epoch; ++epoch) {
    const double lr_used = state.lr;
    Rng shuffle_rng(mix64(seed, static_cast<std::uint64_t>(epoch)));
    std::iota(order.begin(), order.end(), 0);
    for (long i = 0; i < n_train - 1; ++i)
      std::swap(order[i], order[i + shuffle_rng.uniform_int(static_cast<int>(n_train - i))]);

    double ce_sum = 0.0;
    long user_count = 0;
    for (long start = 0; start < n_train; start += schedule.batch_size) {
      const long count = std::min<long>(schedule.batch_size, n_train - start);
      std::vector<const TrainSample*> ptrs(static_cast<std::size_t>(count));
      for (long i = 0; i < count; ++i) ptrs[i] = &dataset[static_cast<std::size_t>(order[start + i])];
      const PreparedBatch batch = prepare_batch(ptrs, /*with_labels=*/true);
      auto [loss, grads] = loss_and_gradients_prepared(state.current, batch, mode);
      adam_step(state.adam, state.current, grads, state.lr, schedule);
      ce_sum += loss * static_cast<double>(batch.layout.total());
      user_count += batch.layout.total();
    }

    const AccuracyReport acc = evaluate_accuracy(state.current, val_span, mode);
    state.history.push_back({epoch, lr_used, ce_sum / static_cast<double>(user_count), acc.angle,
                             acc.dist, acc.overall});

    if (acc.overall > state.best_acc_exact) {
      state.best_acc_exact = acc.overall;
      state.best = state.current;
    }
    if (acc.overall > state.best_acc_plateau + schedule.improve_threshold) {
      state.best_acc_plateau = acc.overall;
      state.stall = 0;
    } else if (++state.stall >= schedule.plateau_epochs) {
      state.lr *= schedule.lr_decay_factor;
      state.stall = 0;
    }
    state.next_epoch = epoch + 1;
  }
}

TrainResult train(const Dataset& dataset, const TrainSchedule& schedule, const NetDims& dims,
                  std::uint64_t seed, Aggregation mode) {
  TrainState state = train_init(schedule, dims, seed, feature_scale(dataset));
  train_epochs(state, dataset, schedule, schedule.epochs, seed, mode);
  return {std::move(state.best), std::move(state.history)};
}

}  // namespace nfbt
