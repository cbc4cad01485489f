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
#include <vector>

#include "polar/stokes.hpp"

namespace polar::diffusion {

/// Oracle-rendered patches: one randomly placed ellipsoid per patch with
/// random refractive index, albedo, light and (optionally) specular mode.
struct DatasetConfig {
  int train_count = 2000;
  int test_count = 64;
  int patch_size = 16;
  std::uint64_t seed = 1;
  double specular_fraction = 0.0;

  void validate() const;
};

struct PatchDataset {
  std::vector<PolarStateMap> train;
  std::vector<PolarStateMap> test;
};

/// Patch i is drawn from its own random stream, so the split and every patch
/// depend only on (seed, i).
PolarStateMap oracle_patch(const DatasetConfig& config, std::uint64_t index);
PatchDataset make_oracle_dataset(const DatasetConfig& config);

}  // namespace polar::diffusion
