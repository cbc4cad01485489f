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
// Checkpoint layout (little-endian):
//   char[4]  "PDIF"
//   u32      version (1)
//   u32      representation (0 images4, 1 raw, 2 encoded)
//   i32 x 6  target_channels, base_width, mid_width, cond_width, time_dim, time_hidden
//   i32      schedule steps
//   f64 x 2  beta_start, beta_end
//   u64      parameter count
//   f64 x n  parameters, in registration order

#pragma once

#include <filesystem>

#include "polar/diffusion/model.hpp"
#include "polar/diffusion/representation.hpp"
#include "polar/diffusion/schedule.hpp"

namespace polar::diffusion {

struct Checkpoint {
  Architecture arch;
  TargetRepresentation representation = TargetRepresentation::kEncodedAolpDolp;
  int schedule_steps = 200;
  double beta_start = 1e-4;
  double beta_end = 0.1;
  Vector parameters;

  NoiseSchedule schedule() const { return make_schedule(schedule_steps, beta_start, beta_end); }
  /// Rebuilds the model; throws StructuralError if the blob size disagrees
  /// with the architecture.
  Model model() const;
};

Checkpoint make_checkpoint(const Model& model, TargetRepresentation rep, const NoiseSchedule& schedule);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws IoError on a missing, truncated or foreign file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace polar::diffusion
