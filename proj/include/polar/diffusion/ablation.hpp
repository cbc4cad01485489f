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
#include <string>
#include <vector>

#include "polar/diffusion/dataset.hpp"
#include "polar/diffusion/trainer.hpp"

namespace polar::diffusion {

/// Scores of decoded samples against ground truth. Angular errors are in
/// degrees and pooled over every jointly valid pixel of the test set; the
/// wrap subset holds pixels whose true AoLP satisfies |phi| > 80 deg. PSNR and
/// SSIM are per-patch means over the four re-synthesized analyzer images.
struct RepresentationScore {
  double mange = 0.0;
  double mange_wrap = 0.0;
  double mange_interior = 0.0;
  double mabse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double final_loss = 0.0;
  std::size_t pixels = 0;
  std::size_t wrap_pixels = 0;
};

RepresentationScore score_samples(const std::vector<PolarStateMap>& truth, const Tensor& samples,
                                  TargetRepresentation rep);

/// Samples every condition in chunks of `chunk` patches (chunk k seeded from
/// stream (seed, k * chunk)).
Tensor sample_dataset(const Model& model, const std::vector<PolarStateMap>& states, TargetRepresentation rep,
                      const NoiseSchedule& schedule, std::uint64_t seed, int chunk = 16);

struct AblationConfig {
  DatasetConfig data;
  TrainingConfig train;
  Architecture arch;  ///< target_channels is overridden per representation
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int schedule_steps = 200;
  double beta_start = 1e-4;
  double beta_end = 0.1;

  void validate() const;
  /// Resolved configuration as key=value lines.
  std::string echo() const;
};

struct AblationRow {
  TargetRepresentation representation;
  std::vector<RepresentationScore> per_seed;
  RepresentationScore median;  ///< element-wise median over seeds
};

struct AblationTable {
  std::vector<AblationRow> rows;  ///< encoded, raw, images4
  RepresentationScore untrained;  ///< freshly initialized encoded model, median over seeds
  std::string config_echo;

  const AblationRow& row(TargetRepresentation rep) const;
  static std::string csv_header();
  /// One row per representation with median scores.
  std::string to_csv() const;
};

using AblationProgress = std::function<void(const std::string&)>;

/// For each seed s: dataset, initialization, batches and sampling all use s,
/// so the three representations differ only in the target encoding.
AblationTable run_ablation(const AblationConfig& config, const AblationProgress& progress = {});

}  // namespace polar::diffusion
