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

// Two-level convolutional noise predictor conditioned on image features.
//
// Condition encoder: a feature extractor (two conv+SiLU) followed by an
// encoder that mirrors the denoiser's two levels, producing guidance at full
// and half resolution.
//
// Denoiser:
//   level 0: conv([z_t, g0]) + time bias -> SiLU -> conv -> SiLU     (skip)
//   level 1: pool -> conv([., g1]) + time bias -> SiLU -> conv -> SiLU
//   decoder: upsample -> conv([., skip, g0]) -> SiLU -> conv -> noise estimate
//
// The final convolution starts at zero, so an untrained model predicts zero
// noise.

#pragma once

#include <cstdint>
#include <vector>

#include "polar/diffusion/layers.hpp"

namespace polar::diffusion {

struct Architecture {
  int target_channels = 3;
  int base_width = 12;
  int mid_width = 24;
  int cond_width = 8;
  int time_dim = 16;     ///< sinusoidal embedding size (even)
  int time_hidden = 32;

  void validate() const;
  bool operator==(const Architecture&) const = default;
};

/// Intermediate values kept by forward for backward.
struct ForwardCache {
  Tensor cond, z;
  Matrix cols_c1, cols_c2, cols_c3, cols_c4;
  Tensor c1, g1, c2, g2, c3, e0, pe0, c4, e1;
  Matrix emb, l1, ht, tb;
  Matrix cols_in, cols_a, cols_b, cols_c, cols_d, cols_out;
  Tensor x0, a0, h0, a0b, h0b, p, x1, a1, h1, a1b, h1b, u, x2, a2, h2;
};

class Model {
 public:
  /// Random initialization from `seed`; output head zeroed.
  Model(const Architecture& arch, std::uint64_t seed);

  const Architecture& architecture() const { return arch_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  /// Predicted noise for z_t at timesteps t (one per sample), conditioned on
  /// a one-channel image of the same spatial size.
  Tensor forward(const Tensor& cond, const Tensor& z, const std::vector<int>& t, ForwardCache& cache) const;
  Tensor forward(const Tensor& cond, const Tensor& z, const std::vector<int>& t) const;

  /// Accumulates parameter gradients for dL/d(prediction).
  void backward(ForwardCache& cache, const Tensor& dpred);

  /// Block index of the output head weights (zero at initialization).
  int head_weight_block() const { return conv_out_.weight_block(); }

 private:
  Architecture arch_;
  ParameterSet params_;
  Conv3x3 conv_c1_, conv_c2_, conv_c3_, conv_c4_;
  Linear time1_, time2_;
  Conv3x3 conv_in_, conv_a_, conv_b_, conv_c_, conv_d_, conv_out_;
};

/// Sinusoidal timestep embedding, (dim x batch).
Matrix timestep_embedding(const std::vector<int>& t, int dim);

}  // namespace polar::diffusion
