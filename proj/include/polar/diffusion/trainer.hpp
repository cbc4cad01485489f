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
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polar/diffusion/model.hpp"
#include "polar/diffusion/representation.hpp"
#include "polar/diffusion/schedule.hpp"

namespace polar::diffusion {

struct TrainingConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int steps = 1000;
  std::uint64_t seed = 1;
  int patch_size = 16;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.001;

  void validate() const;
};

/// Mean over all elements of (prediction - noise)^2 for
/// z_t = forward_diffuse(z0, t, noise). With accumulate_grad the gradient of
/// that mean is added to the model's parameter gradients.
double training_loss(Model& model, const Tensor& cond, const Tensor& z0, const std::vector<int>& t,
                     const Tensor& noise, const NoiseSchedule& schedule, bool accumulate_grad = false);

struct TrainingResult {
  Model model;
  std::vector<double> loss_curve;  ///< one entry per step

  /// Mean loss over the first / last 10% of the curve (at least one step).
  double initial_window_loss() const;
  double final_window_loss() const;
};

/// Called after each step with (step index, loss).
using StepCallback = std::function<void(int, double)>;

/// Trains every parameter with AdamW on random batches. Batch indices,
/// timesteps and noise for step k come from stream (config.seed, k), so the
/// run is a pure function of its inputs. Throws NumericalError on a
/// non-finite loss.
TrainingResult train(std::span<const PolarStateMap> dataset, const TrainingConfig& config,
                     TargetRepresentation rep, const Architecture& arch, const NoiseSchedule& schedule,
                     const StepCallback& on_step = {});

/// Ancestral sampling from z_T ~ N(0, 1) with sigma_t^2 = beta_t and no noise
/// at t = 1; the result is clamped to [-1, 1]. Sample b draws from stream
/// (seed, b), so it does not depend on the other conditions in the batch.
Tensor sample(const Model& model, const Tensor& cond, const NoiseSchedule& schedule, std::uint64_t seed);

}  // namespace polar::diffusion
