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

#include "polar/mosaic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "polar/rng.hpp"

namespace polar {

MosaicPattern::MosaicPattern(std::array<int, 4> cells_deg) : cells_(cells_deg) {
  std::array<int, 4> seen{};
  for (int a : cells_) {
    if (a != 0 && a != 45 && a != 90 && a != 135)
      throw PreconditionError("mosaic pattern: angles must be 0, 45, 90 or 135");
    ++seen[a / 45];
  }
  for (int n : seen)
    if (n != 1) throw PreconditionError("mosaic pattern: each angle must appear exactly once");
}

MosaicPattern MosaicPattern::parse(const std::string& text) {
  std::array<int, 4> cells{};
  std::istringstream in(text);
  std::string item;
  int n = 0;
  while (std::getline(in, item, ',')) {
    if (n == 4) throw PreconditionError("mosaic pattern: expected four angles, got '" + text + "'");
    try {
      std::size_t used = 0;
      cells[n] = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw PreconditionError("mosaic pattern: bad angle '" + item + "'");
    }
    ++n;
  }
  if (n != 4) throw PreconditionError("mosaic pattern: expected four angles, got '" + text + "'");
  return MosaicPattern(cells);
}

std::string MosaicPattern::to_string() const {
  return std::to_string(cells_[0]) + "," + std::to_string(cells_[1]) + "," +
         std::to_string(cells_[2]) + "," + std::to_string(cells_[3]);
}

std::pair<int, int> MosaicPattern::offset_of(int slot) const {
  for (int cell = 0; cell < 4; ++cell)
    if (cells_[cell] == slot * 45) return {cell / 2, cell % 2};
  throw PreconditionError("mosaic pattern: no cell for slot");
}

void MosaicFrame::validate() const {
  require(data.channels() == 1, "mosaic frame: must be single channel");
  require(data.width() % 2 == 0 && data.height() % 2 == 0, "mosaic frame: dimensions must be even");
  for (double v : data) require(std::isfinite(v) && v >= 0.0, "mosaic frame: values must be finite and >= 0");
}

void SensorNoiseModel::validate() const {
  require(std::isfinite(read_sigma) && read_sigma >= 0.0, "noise model: read_sigma must be >= 0");
  require(std::isfinite(shot_gain) && shot_gain >= 0.0, "noise model: shot_gain must be >= 0");
  if (bit_depth)
    require(*bit_depth == 8 || *bit_depth == 12 || *bit_depth == 16,
            "noise model: bit depth must be 8, 12 or 16");
}

MosaicFrame mosaic(const PolarizationStack& stack, const MosaicPattern& pattern) {
  stack.check_shape();
  require(stack.channels() == 1, "mosaic: stack must be single channel");
  require(stack.width() % 2 == 0 && stack.height() % 2 == 0, "mosaic: dimensions must be even");
  MosaicFrame frame{Image(stack.width(), stack.height()), pattern};
  for (int y = 0; y < frame.height(); ++y)
    for (int x = 0; x < frame.width(); ++x)
      frame.data.at(x, y) = stack.images[pattern.slot_at(y, x)].at(x, y);
  return frame;
}

PolarizationStack demosaic(const MosaicFrame& frame) {
  frame.validate();
  const int w = frame.width(), h = frame.height();
  const int lw = w / 2, lh = h / 2;
  PolarizationStack out;
  for (int slot = 0; slot < 4; ++slot) {
    const auto [ry, rx] = frame.pattern.offset_of(slot);
    Image& img = out.images[slot];
    img = Image(w, h);
    auto lattice = [&](int i, int j) { return frame.data.at(2 * j + rx, 2 * i + ry); };
    for (int y = 0; y < h; ++y) {
      const double u = std::clamp((y - ry) / 2.0, 0.0, static_cast<double>(lh - 1));
      const int i0 = static_cast<int>(u);
      const int i1 = std::min(i0 + 1, lh - 1);
      const double fu = u - i0;
      for (int x = 0; x < w; ++x) {
        const double v = std::clamp((x - rx) / 2.0, 0.0, static_cast<double>(lw - 1));
        const int j0 = static_cast<int>(v);
        const int j1 = std::min(j0 + 1, lw - 1);
        const double fv = v - j0;
        const double top = (1.0 - fv) * lattice(i0, j0) + fv * lattice(i0, j1);
        const double bottom = (1.0 - fv) * lattice(i1, j0) + fv * lattice(i1, j1);
        img.at(x, y) = std::max(0.0, (1.0 - fu) * top + fu * bottom);
      }
    }
  }
  return out;
}

double quantize_value(double v, int bit_depth) {
  require(bit_depth >= 1 && bit_depth <= 16, "quantize: bit depth must be in [1, 16]");
  require(v >= 0.0 && v <= 1.0, "quantize: values must lie in [0, 1]");
  const double levels = std::ldexp(1.0, bit_depth) - 1.0;
  return std::floor(v * levels + 0.5) / levels;
}

MosaicFrame quantize(const MosaicFrame& frame, int bit_depth) {
  MosaicFrame out = frame;
  for (double& v : out.data) v = quantize_value(v, bit_depth);
  return out;
}

MosaicFrame apply_noise(const MosaicFrame& frame, const SensorNoiseModel& model) {
  frame.validate();
  model.validate();
  MosaicFrame out = frame;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    double v = out.data[i];
    if (model.shot_gain > 0.0 || model.read_sigma > 0.0) {
      SplitMix64 rng(stream_seed(model.seed, i));
      if (model.shot_gain > 0.0 && v > 0.0) {
        std::poisson_distribution<long long> shot(v * model.shot_gain);
        v = static_cast<double>(shot(rng)) / model.shot_gain;
      }
      if (model.read_sigma > 0.0) v += model.read_sigma * rng.normal();
      v = std::max(0.0, v);
    }
    if (model.bit_depth) v = quantize_value(std::min(v, 1.0), *model.bit_depth);
    out.data[i] = v;
  }
  return out;
}

}  // namespace polar
