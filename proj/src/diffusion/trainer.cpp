// Copyright 2026 The Polarsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "polar/diffusion/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polar/diffusion/optimizer.hpp"
#include "polar/error.hpp"
#include "polar/rng.hpp"

namespace polar::diffusion {

void TrainingConfig::validate() const {
  require(std::isfinite(learning_rate) && learning_rate >= 0.0, "training: learning_rate must be non-negative");
  require(batch_size >= 1, "training: batch_size must be at least 1");
  require(steps >= 1, "training: steps must be at least 1");
  require(patch_size >= 2 && patch_size % 2 == 0, "training: patch_size must be even");
}

double training_loss(Model& model, const Tensor& cond, const Tensor& z0, const std::vector<int>& t,
                     const Tensor& noise, const NoiseSchedule& schedule, bool accumulate_grad) {
  const Tensor zt = forward_diffuse(z0, t, noise, schedule);
  ForwardCache cache;
  const Tensor pred = model.forward(cond, zt, t, cache);
  const Matrix diff = pred.data - noise.data;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;
  if (accumulate_grad) {
    Tensor dpred = pred;
    dpred.data = (2.0 / count) * diff;
    model.backward(cache, dpred);
  }
  return loss;
}

namespace {

double window_mean(const std::vector<double>& curve, bool tail) {
  if (curve.empty()) return 0.0;
  const std::size_t n = std::max<std::size_t>(1, curve.size() / 10);
  const auto first = tail ? curve.end() - static_cast<std::ptrdiff_t>(n) : curve.begin();
  double sum = 0.0;
  for (auto it = first; it != first + static_cast<std::ptrdiff_t>(n); ++it) sum += *it;
  return sum / static_cast<double>(n);
}

Tensor gaussian_like(int channels, int batch, int height, int width, SplitMix64& rng) {
  Tensor out(channels, batch, height, width);
  for (Eigen::Index i = 0; i < out.data.size(); ++i) out.data.data()[i] = rng.normal();
  return out;
}

}  // namespace

double TrainingResult::initial_window_loss() const { return window_mean(loss_curve, false); }
double TrainingResult::final_window_loss() const { return window_mean(loss_curve, true); }

TrainingResult train(std::span<const PolarStateMap> dataset, const TrainingConfig& config,
                     TargetRepresentation rep, const Architecture& arch, const NoiseSchedule& schedule,
                     const StepCallback& on_step) {
  config.validate();
  require(!dataset.empty(), "train: dataset is empty");
  require(schedule.reaches_noise(), "train: schedule does not reach noise (alpha_bar_T >= 0.01)");
  require(arch.target_channels == channel_count(rep), "train: architecture channels do not match representation");
  for (const auto& s : dataset)
    if (s.width() != config.patch_size || s.height() != config.patch_size)
      throw StructuralError("train: dataset patch size differs from config");

  TrainingResult result{Model(arch, config.seed), {}};
  Model& model = result.model;
  AdamW optimizer(model.params().values().size(),
                  {config.beta1, config.beta2, config.weight_decay, 1e-8});
  result.loss_curve.reserve(config.steps);

  // Targets and conditions are fixed per patch; precompute once.
  const Tensor all_targets = make_targets(dataset, rep);
  const Tensor all_conds = make_conditions(dataset, rep);
  const int plane = all_targets.plane();
  const int n = static_cast<int>(dataset.size());

  Tensor z0(all_targets.channels(), config.batch_size, all_targets.height, all_targets.width);
  Tensor cond(1, config.batch_size, all_targets.height, all_targets.width);
  std::vector<int> t(config.batch_size);
  for (int step = 0; step < config.steps; ++step) {
    SplitMix64 rng(stream_seed(config.seed, 0x7000000000ULL + static_cast<std::uint64_t>(step)));
    for (int b = 0; b < config.batch_size; ++b) {
      const int idx = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      t[b] = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(schedule.steps()));
      z0.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane) =
          all_targets.data.middleCols(static_cast<Eigen::Index>(idx) * plane, plane);
      cond.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane) =
          all_conds.data.middleCols(static_cast<Eigen::Index>(idx) * plane, plane);
    }
    const Tensor noise = gaussian_like(z0.channels(), z0.batch, z0.height, z0.width, rng);

    model.params().zero_grad();
    const double loss = training_loss(model, cond, z0, t, noise, schedule, true);
    if (!std::isfinite(loss) || !model.params().grads().allFinite()) {
      std::ostringstream msg;
      msg << "train: non-finite loss at step " << step << " (lr=" << config.learning_rate << ")";
      throw NumericalError(msg.str());
    }
    optimizer.step(model.params().values(), model.params().grads(), config.learning_rate);
    result.loss_curve.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return result;
}

Tensor sample(const Model& model, const Tensor& cond, const NoiseSchedule& schedule, std::uint64_t seed) {
  require(schedule.reaches_noise(), "sample: schedule does not reach noise (alpha_bar_T >= 0.01)");
  if (cond.channels() != 1) throw StructuralError("sample: condition must have one channel");
  const int channels = model.architecture().target_channels;
  const int plane = cond.plane();
  std::vector<SplitMix64> streams;
  for (int b = 0; b < cond.batch; ++b) streams.emplace_back(stream_seed(seed, static_cast<std::uint64_t>(b)));

  auto draw = [&](Tensor& out) {
    for (int b = 0; b < cond.batch; ++b)
      for (int p = 0; p < plane; ++p)
        for (int c = 0; c < channels; ++c)
          out.data(c, static_cast<Eigen::Index>(b) * plane + p) = streams[b].normal();
  };

  Tensor z(channels, cond.batch, cond.height, cond.width);
  draw(z);
  Tensor xi(channels, cond.batch, cond.height, cond.width);
  std::vector<int> t(cond.batch);
  for (int step = schedule.steps(); step >= 1; --step) {
    std::fill(t.begin(), t.end(), step);
    const Tensor eps = model.forward(cond, z, t);
    const double beta = schedule.beta(step);
    const double coef = beta / std::sqrt(1.0 - schedule.alpha_bar(step));
    z.data = (z.data - coef * eps.data) / std::sqrt(schedule.alpha(step));
    if (step > 1) {
      draw(xi);
      z.data += std::sqrt(beta) * xi.data;
    }
  }
  if (!z.data.allFinite()) throw NumericalError("sample: non-finite sample");
  z.data = z.data.cwiseMax(-1.0).cwiseMin(1.0);
  return z;
}

}  // namespace polar::diffusion
