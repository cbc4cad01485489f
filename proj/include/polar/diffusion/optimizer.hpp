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

#include "polar/diffusion/layers.hpp"

namespace polar::diffusion {

/// Adam with decoupled weight decay: p <- p - lr * wd * p, then the usual
/// bias-corrected Adam update.
class AdamW {
 public:
  struct Options {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double weight_decay = 0.001;
    double epsilon = 1e-8;
  };

  AdamW(Eigen::Index size, const Options& options);

  void step(Vector& params, const Vector& grads, double learning_rate);
  long steps_taken() const { return step_; }

 private:
  Options opt_;
  Vector m_;
  Vector v_;
  long step_ = 0;
};

}  // namespace polar::diffusion
