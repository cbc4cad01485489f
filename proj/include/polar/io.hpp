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

// Portable float map (PFM) and binary PGM/PPM readers and writers.
//
// PFM: "Pf" (1 channel) or "PF" (3 channels), then "<width> <height>", then
// the scale line whose sign gives the byte order (negative = little endian),
// then 32-bit floats with rows stored bottom to top. Images are held in
// double; writing rounds to float, so a write/read pair is bit-exact for any
// float-representable image.
//
// PGM (P5) / PPM (P6): maxval 255 (8-bit samples) or 65535 (16-bit samples,
// big endian), rows top to bottom.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "polar/grid.hpp"

namespace polar::io {

Image read_pfm(const std::filesystem::path& path);
/// Writes little-endian PFM. Accepts 1 or 3 channels.
void write_pfm(const std::filesystem::path& path, const Image& img);

struct QuantizedImage {
  int width = 0;
  int height = 0;
  int channels = 1;      ///< 1 (PGM) or 3 (PPM)
  int maxval = 255;      ///< 255 or 65535
  std::vector<std::uint16_t> samples;  ///< interleaved, row-major, top row first

  bool operator==(const QuantizedImage&) const = default;
};

QuantizedImage read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const QuantizedImage& img);

/// Samples divided by maxval.
Image dequantize(const QuantizedImage& q);
/// round-half-up(v * maxval); values must lie in [0, 1].
QuantizedImage quantize_image(const Image& img, int maxval);

/// Reads .pfm as-is and .pgm/.ppm normalized to [0, 1].
Image read_image(const std::filesystem::path& path);

}  // namespace polar::io
