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

// Linear polarization image formation and recovery.
//
// An ideal linear analyzer at angle theta passes
//
//   I(theta) = s0 / 2 * (1 + P * cos(2 theta - 2 phi))
//
// where s0 is the unpolarized-equivalent intensity, P the degree of linear
// polarization (DoLP) and phi the angle of linear polarization (AoLP). Four
// analyzer angles {0, 45, 90, 135} degrees determine (s0, P, phi) through the
// linear Stokes components s1 = I0 - I90, s2 = I45 - I135.
//
// Angles are radians, measured counter-clockwise from the image +x axis with
// +y pointing up. AoLP is canonicalized to (-pi/2, pi/2].

#pragma once

#include <array>

#include "polar/grid.hpp"

namespace polar {

/// Relative Stokes magnitude below which AoLP is undefined.
inline constexpr double kEpsPol = 1e-6;
/// Absolute s0 below which a pixel is treated as dark.
inline constexpr double kEpsDark = 1e-8;
/// Minimum length of an encoded (cos 2phi, sin 2phi) vector for decoding.
inline constexpr double kEpsEnc = 1e-6;

/// Linear radiance, nominally in [0, peak]. Alias of Image; see
/// validate_radiance for the invariants.
using RadianceImage = Image;

/// Throws PreconditionError unless every value is finite and non-negative.
void validate_radiance(const RadianceImage& img, const char* what);

/// Images behind analyzers at 0, 45, 90 and 135 degrees.
struct PolarizationStack {
  static constexpr std::array<double, 4> kAnglesDeg{0.0, 45.0, 90.0, 135.0};

  std::array<RadianceImage, 4> images;

  RadianceImage& i0() { return images[0]; }
  RadianceImage& i45() { return images[1]; }
  RadianceImage& i90() { return images[2]; }
  RadianceImage& i135() { return images[3]; }
  const RadianceImage& i0() const { return images[0]; }
  const RadianceImage& i45() const { return images[1]; }
  const RadianceImage& i90() const { return images[2]; }
  const RadianceImage& i135() const { return images[3]; }

  int width() const { return images[0].width(); }
  int height() const { return images[0].height(); }
  int channels() const { return images[0].channels(); }

  /// Throws StructuralError when the four images differ in shape.
  void check_shape() const;
};

/// Per-element polarization state. All four members share one shape; with
/// multi-channel s0 the polarization is per channel.
struct PolarStateMap {
  RadianceImage s0;
  Image dolp;  ///< P in [0, 1]
  Image aolp;  ///< phi in (-pi/2, pi/2]; 0 where invalid
  Mask valid;  ///< AoLP defined

  static PolarStateMap uniform(int width, int height, double s0, double dolp, double aolp);

  int width() const { return s0.width(); }
  int height() const { return s0.height(); }
  int channels() const { return s0.channels(); }

  void check_shape() const;
};

/// Diffusion target: (cos 2phi, sin 2phi, 2P - 1).
struct EncodedPolarMap {
  Image cos2;
  Image sin2;
  Image p_norm;

  void check_shape() const;
};

/// Representative of phi modulo pi inside (-pi/2, pi/2].
double wrap_aolp(double phi);

/// Analyzer transmission for one angle (radians).
RadianceImage malus_intensity(const PolarStateMap& state, double theta);

/// Analyzer images at the four canonical angles. Uses exact quadrature of the
/// analyzer direction, so i0 + i90 and i45 + i135 agree to rounding.
PolarizationStack synthesize_stack(const PolarStateMap& state);

/// Inverts the four-angle measurement. Inputs must be non-negative.
PolarStateMap decompose_stack(const PolarizationStack& stack);

/// (i0 + i45 + i90 + i135) / 2.
RadianceImage unpolarized_intensity(const PolarizationStack& stack);

/// max |(i0 + i90) - (i45 + i135)| / max(s0, eps_dark) over all elements.
double consistency_residual(const PolarizationStack& stack);

EncodedPolarMap encode(const PolarStateMap& state);
PolarStateMap decode(const EncodedPolarMap& enc, const RadianceImage& s0);

/// Luma weights used to reduce three-channel captures to one channel.
struct GrayWeights {
  double r = 0.299;
  double g = 0.587;
  double b = 0.114;
};

/// Weighted channel sum; one-channel inputs are returned unchanged.
RadianceImage to_grayscale(const RadianceImage& img, const GrayWeights& weights = {});
PolarizationStack to_grayscale(const PolarizationStack& stack, const GrayWeights& weights = {});

// Scalar forms shared by the image operations and by callers that work per
// pixel (the diffusion dataset, the pBRDF oracle).
namespace scalar {

struct PolarState {
  double s0 = 0.0;
  double dolp = 0.0;
  double aolp = 0.0;
  bool valid = false;
};

struct Stack4 {
  double i0, i45, i90, i135;
};

Stack4 synthesize(double s0, double dolp, double aolp);
PolarState decompose(const Stack4& s);

}  // namespace scalar

}  // namespace polar
