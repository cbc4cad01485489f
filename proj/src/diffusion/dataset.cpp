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
#include "polar/diffusion/dataset.hpp"

#include <cmath>
#include <numbers>

#include "polar/error.hpp"
#include "polar/pbrdf.hpp"
#include "polar/rng.hpp"

namespace polar::diffusion {

void DatasetConfig::validate() const {
  require(train_count >= 1, "dataset: train_count must be positive");
  require(test_count >= 0, "dataset: test_count must be non-negative");
  require(patch_size >= 8 && patch_size % 2 == 0, "dataset: patch_size must be even and at least 8");
  require(specular_fraction >= 0.0 && specular_fraction <= 1.0, "dataset: specular_fraction must lie in [0, 1]");
}

PolarStateMap oracle_patch(const DatasetConfig& config, std::uint64_t index) {
  SplitMix64 rng(stream_seed(config.seed, index));
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  const int n = config.patch_size;
  const double scale = n / 16.0;

  const double a = uniform(4.0, 7.5) * scale;
  const double b = a * uniform(0.7, 1.0);
  const double c = uniform(0.6, 1.2) * a;
  const double rotation = uniform(0.0, std::numbers::pi);
  const double margin = 0.5 * n - 0.6 * a;
  const double cx = margin > 0 ? uniform(-margin, margin) : 0.0;
  const double cy = margin > 0 ? uniform(-margin, margin) : 0.0;
  const NormalMap shape = make_ellipsoid(n, n, cx, cy, a, b, c, rotation);

  Material material;
  material.eta = uniform(1.3, 1.8);
  material.albedo = uniform(0.5, 0.8);
  material.mode = rng.uniform() < config.specular_fraction ? ReflectionMode::kSpecular : ReflectionMode::kDiffuse;

  SceneLight light;
  const double lz = uniform(0.5, 1.0);
  const double la = uniform(0.0, 2.0 * std::numbers::pi);
  const double lr = std::sqrt(1.0 - lz * lz);
  light.direction = {lr * std::cos(la), lr * std::sin(la), lz};
  light.ambient = uniform(0.1, 0.2);
  return render_polar(shape, material, light);
}

PatchDataset make_oracle_dataset(const DatasetConfig& config) {
  config.validate();
  PatchDataset out;
  out.train.reserve(config.train_count);
  out.test.reserve(config.test_count);
  for (int i = 0; i < config.train_count; ++i) out.train.push_back(oracle_patch(config, i));
  for (int i = 0; i < config.test_count; ++i)
    out.test.push_back(oracle_patch(config, static_cast<std::uint64_t>(config.train_count) + i));
  return out;
}

}  // namespace polar::diffusion
