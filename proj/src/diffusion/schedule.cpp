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

#include "polar/diffusion/schedule.hpp"

#include <cmath>

#include "polar/error.hpp"

namespace polar::diffusion {

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end) {
  require(steps >= 10, "make_schedule: at least 10 timesteps required");
  require(beta_start > 0.0 && beta_start < beta_end && beta_end < 1.0,
          "make_schedule: need 0 < beta_start < beta_end < 1");
  NoiseSchedule s;
  s.beta_.resize(steps);
  s.alpha_bar_.resize(steps);
  double product = 1.0;
  for (int i = 0; i < steps; ++i) {
    s.beta_[i] = beta_start + (beta_end - beta_start) * i / (steps - 1);
    product *= 1.0 - s.beta_[i];
    s.alpha_bar_[i] = product;
  }
  return s;
}

NoiseSchedule default_schedule() { return make_schedule(200, 1e-4, 0.1); }

Tensor forward_diffuse(const Tensor& z0, const std::vector<int>& t, const Tensor& noise, const NoiseSchedule& schedule) {
  if (!z0.same_layout(noise) || z0.channels() != noise.channels())
    throw StructuralError("forward_diffuse: noise shape differs from z0");
  if (static_cast<int>(t.size()) != z0.batch) throw StructuralError("forward_diffuse: one timestep per sample required");
  Tensor zt = z0;
  const int plane = z0.plane();
  for (int b = 0; b < z0.batch; ++b) {
    if (t[b] < 1 || t[b] > schedule.steps()) throw PreconditionError("forward_diffuse: timestep out of range");
    const double ab = schedule.alpha_bar(t[b]);
    auto cols = zt.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane);
    cols = std::sqrt(ab) * z0.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane) +
           std::sqrt(1.0 - ab) * noise.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane);
  }
  return zt;
}

}  // namespace polar::diffusion
