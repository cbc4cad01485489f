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
#include "polar/diffusion/optimizer.hpp"

#include <cmath>

#include "polar/error.hpp"

namespace polar::diffusion {

AdamW::AdamW(Eigen::Index size, const Options& options)
    : opt_(options), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {
  require(options.beta1 >= 0.0 && options.beta1 < 1.0, "AdamW: beta1 must lie in [0, 1)");
  require(options.beta2 >= 0.0 && options.beta2 < 1.0, "AdamW: beta2 must lie in [0, 1)");
  require(options.weight_decay >= 0.0 && options.epsilon > 0.0, "AdamW: invalid decay or epsilon");
}

void AdamW::step(Vector& params, const Vector& grads, double learning_rate) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw StructuralError("AdamW: parameter vector size changed");
  ++step_;
  m_ = opt_.beta1 * m_ + (1.0 - opt_.beta1) * grads;
  v_ = opt_.beta2 * v_ + (1.0 - opt_.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(step_));
  params *= 1.0 - learning_rate * opt_.weight_decay;
  params.array() -= learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + opt_.epsilon);
}

}  // namespace polar::diffusion
