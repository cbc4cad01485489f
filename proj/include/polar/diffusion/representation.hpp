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
// Mapping between polarization states and network tensors. Every
// representation lives in [-1, 1]:
//   PolarImages4     one channel, 2H x 2W grid [[I0, I45], [I90, I135]], 2I - 1
//   RawAolpDolp      (phi / (pi/2), 2P - 1)
//   EncodedAolpDolp  (cos 2phi, sin 2phi, 2P - 1)
// The condition is the grayscale intensity 2 s0 - 1, tiled 2 x 2 for the grid
// representation so that it matches the target's spatial size.

#pragma once

#include <span>
#include <string>

#include "polar/diffusion/layers.hpp"
#include "polar/stokes.hpp"

namespace polar::diffusion {

enum class TargetRepresentation { kPolarImages4, kRawAolpDolp, kEncodedAolpDolp };

inline constexpr TargetRepresentation kAllRepresentations[] = {
    TargetRepresentation::kEncodedAolpDolp, TargetRepresentation::kRawAolpDolp, TargetRepresentation::kPolarImages4};

int channel_count(TargetRepresentation rep);
/// Spatial scale of the target relative to the patch (2 for the grid).
int spatial_scale(TargetRepresentation rep);
std::string to_string(TargetRepresentation rep);
/// Accepts "encoded", "raw", "images4" (and the enum spellings).
TargetRepresentation parse_representation(const std::string& text);

/// Targets for single-channel states of one common size, one batch sample each.
Tensor make_targets(std::span<const PolarStateMap> states, TargetRepresentation rep);
/// Conditions matching make_targets' layout.
Tensor make_conditions(std::span<const PolarStateMap> states, TargetRepresentation rep);

/// Decodes batch sample b. s0 supplies the intensity for the map
/// representations; the grid carries its own.
PolarStateMap decode_representation(const Tensor& tensor, int b, TargetRepresentation rep, const RadianceImage& s0);

}  // namespace polar::diffusion
