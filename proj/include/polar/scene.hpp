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
// On-disk scene directories.
//
//   angle images    I000.pfm I045.pfm I090.pfm I135.pfm (or .pgm / .ppm)
//   property maps   s0.pfm aolp.pfm dolp.pfm, optional valid.pgm
//   mosaic frame    mosaic.pfm (or mosaic.pgm)
//   meta.txt        key=value lines: pattern, peak, bitdepth, seed, gray_weights
//
// Commands look only for the layout they consume, so a directory may hold
// several layouts (for example a stack and the maps decomposed from it).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "polar/mosaic.hpp"
#include "polar/stokes.hpp"

namespace polar::scene {

namespace fs = std::filesystem;

struct SceneMeta {
  MosaicPattern pattern;
  double peak = 1.0;
  std::optional<int> bitdepth;  ///< 8, 12 or 16; empty means unquantized
  std::uint64_t seed = 0;
  GrayWeights gray_weights;

  /// Throws IoError when a key is unknown or a value is malformed.
  static SceneMeta parse(const std::string& text);
  std::string to_string() const;
};

/// Defaults when meta.txt is absent.
SceneMeta read_meta(const fs::path& dir);
void write_meta(const fs::path& dir, const SceneMeta& meta);

bool has_stack(const fs::path& dir);
bool has_maps(const fs::path& dir);
bool has_mosaic(const fs::path& dir);

/// Angle images as stored (1 or 3 channels). Throws IoError when a file is
/// missing and StructuralError when the sizes disagree.
PolarizationStack read_stack(const fs::path& dir);
void write_stack(const fs::path& dir, const PolarizationStack& stack);

/// Property maps; validity comes from valid.pgm when present and otherwise
/// from s0 > eps_dark and dolp >= eps_pol.
PolarStateMap read_maps(const fs::path& dir);
void write_maps(const fs::path& dir, const PolarStateMap& state);

MosaicFrame read_mosaic(const fs::path& dir);
void write_mosaic(const fs::path& dir, const MosaicFrame& frame);

/// Property maps of a scene: the stored maps if present, otherwise the
/// grayscale-reduced stack decomposed with the scene's luma weights.
PolarStateMap load_state(const fs::path& dir);
/// Analyzer images of a scene: the stored stack if present, otherwise
/// synthesized from the maps.
PolarizationStack load_images(const fs::path& dir);

/// File name for a single analyzer image, e.g. I000.pfm or I022.500.pfm.
std::string angle_file_name(double degrees);

}  // namespace polar::scene
