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

#include <vector>

#include "polar/diffusion/layers.hpp"

namespace polar::diffusion {

/// Linear DDPM variance schedule. Timesteps are 1-based: beta(1) .. beta(T).
class NoiseSchedule {
 public:
  int steps() const { return static_cast<int>(beta_.size()); }
  double beta_start() const { return beta_.front(); }
  double beta_end() const { return beta_.back(); }

  double beta(int t) const { return beta_.at(t - 1); }
  double alpha(int t) const { return 1.0 - beta(t); }
  double alpha_bar(int t) const { return alpha_bar_.at(t - 1); }

  /// alpha_bar_T < 0.01, i.e. z_T is close enough to N(0, 1) to start
  /// ancestral sampling from pure noise.
  bool reaches_noise() const { return alpha_bar_.back() < 0.01; }

  friend NoiseSchedule make_schedule(int steps, double beta_start, double beta_end);

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

/// Requires steps >= 10 and 0 < beta_start < beta_end < 1.
NoiseSchedule make_schedule(int steps, double beta_start, double beta_end);

/// Toy defaults: 200 steps, beta 1e-4 -> 0.1 (alpha_bar_T ~ 3.2e-5).
NoiseSchedule default_schedule();

/// z_t = sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) noise, with one
/// timestep per batch sample.
Tensor forward_diffuse(const Tensor& z0, const std::vector<int>& t, const Tensor& noise, const NoiseSchedule& schedule);

}  // namespace polar::diffusion
