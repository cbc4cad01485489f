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

// Division-of-focal-plane polarization sensor: a 2x2 micro-polarizer
// superpixel repeated over the frame.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "polar/grid.hpp"
#include "polar/stokes.hpp"

namespace polar {

/// Analyzer angle (degrees) of each superpixel cell, row-major:
/// {(row 0, col 0), (row 0, col 1), (row 1, col 0), (row 1, col 1)}.
class MosaicPattern {
 public:
  /// [[90, 45], [135, 0]], the common commercial layout.
  MosaicPattern() : MosaicPattern({90, 45, 135, 0}) {}
  explicit MosaicPattern(std::array<int, 4> cells_deg);

  /// Parses "90,45,135,0".
  static MosaicPattern parse(const std::string& text);
  std::string to_string() const;

  int angle_at(int row, int col) const { return cells_[(row & 1) * 2 + (col & 1)]; }
  /// Stack slot (0..3 for 0/45/90/135 degrees) sampled at a pixel.
  int slot_at(int row, int col) const { return angle_at(row, col) / 45; }
  /// Row and column offset inside the superpixel where `slot` is sampled.
  std::pair<int, int> offset_of(int slot) const;

  bool operator==(const MosaicPattern&) const = default;

 private:
  std::array<int, 4> cells_;
};

struct MosaicFrame {
  Image data;  ///< single channel, even dimensions
  MosaicPattern pattern;

  int width() const { return data.width(); }
  int height() const { return data.height(); }
  void validate() const;
};

struct SensorNoiseModel {
  double read_sigma = 0.0;         ///< Gaussian read noise, intensity units
  double shot_gain = 0.0;          ///< photons per unit intensity; 0 disables shot noise
  std::optional<int> bit_depth;    ///< 8, 12 or 16; empty skips quantization
  std::uint64_t seed = 0;

  void validate() const;
};

MosaicFrame mosaic(const PolarizationStack& stack, const MosaicPattern& pattern = {});

/// Bilinear interpolation of each analyzer lattice with clamped borders.
PolarizationStack demosaic(const MosaicFrame& frame);

/// Shot noise, read noise, clamping at zero and optional quantization. Each
/// pixel draws from its own stream so the result is independent of traversal
/// order.
MosaicFrame apply_noise(const MosaicFrame& frame, const SensorNoiseModel& model);

/// v -> floor(v * (2^b - 1) + 0.5) / (2^b - 1). Values must lie in [0, 1].
MosaicFrame quantize(const MosaicFrame& frame, int bit_depth);
double quantize_value(double v, int bit_depth);

}  // namespace polar
