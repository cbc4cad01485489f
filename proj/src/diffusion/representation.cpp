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
#include "polar/diffusion/representation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polar/error.hpp"

namespace polar::diffusion {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

void check_states(std::span<const PolarStateMap> states) {
  if (states.empty()) throw PreconditionError("representation: empty batch");
  for (const auto& s : states) {
    s.check_shape();
    if (s.channels() != 1) throw StructuralError("representation: states must be single-channel");
    if (s.width() != states[0].width() || s.height() != states[0].height())
      throw StructuralError("representation: batch states differ in size");
  }
}

// Grid quadrant (qx, qy) of analyzer slot k.
constexpr int kQuadX[4] = {0, 1, 0, 1};
constexpr int kQuadY[4] = {0, 0, 1, 1};

}  // namespace

int channel_count(TargetRepresentation rep) {
  switch (rep) {
    case TargetRepresentation::kPolarImages4: return 1;
    case TargetRepresentation::kRawAolpDolp: return 2;
    case TargetRepresentation::kEncodedAolpDolp: return 3;
  }
  throw PreconditionError("unknown representation");
}

int spatial_scale(TargetRepresentation rep) { return rep == TargetRepresentation::kPolarImages4 ? 2 : 1; }

std::string to_string(TargetRepresentation rep) {
  switch (rep) {
    case TargetRepresentation::kPolarImages4: return "images4";
    case TargetRepresentation::kRawAolpDolp: return "raw";
    case TargetRepresentation::kEncodedAolpDolp: return "encoded";
  }
  throw PreconditionError("unknown representation");
}

TargetRepresentation parse_representation(const std::string& text) {
  if (text == "images4" || text == "PolarImages4") return TargetRepresentation::kPolarImages4;
  if (text == "raw" || text == "RawAolpDolp") return TargetRepresentation::kRawAolpDolp;
  if (text == "encoded" || text == "EncodedAolpDolp") return TargetRepresentation::kEncodedAolpDolp;
  throw PreconditionError("unknown representation '" + text + "' (expected encoded, raw or images4)");
}

Tensor make_targets(std::span<const PolarStateMap> states, TargetRepresentation rep) {
  check_states(states);
  const int w = states[0].width(), h = states[0].height(), k = spatial_scale(rep);
  Tensor out(channel_count(rep), static_cast<int>(states.size()), h * k, w * k);
  for (int b = 0; b < out.batch; ++b) {
    const PolarStateMap& s = states[b];
    switch (rep) {
      case TargetRepresentation::kEncodedAolpDolp: {
        const EncodedPolarMap enc = encode(s);
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            const Eigen::Index col = out.column(b, y, x);
            out.data(0, col) = enc.cos2.at(x, y);
            out.data(1, col) = enc.sin2.at(x, y);
            out.data(2, col) = enc.p_norm.at(x, y);
          }
        break;
      }
      case TargetRepresentation::kRawAolpDolp:
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            const Eigen::Index col = out.column(b, y, x);
            const bool valid = s.valid.at(x, y) != 0;
            out.data(0, col) = valid ? s.aolp.at(x, y) / kHalfPi : 0.0;
            out.data(1, col) = valid ? 2.0 * s.dolp.at(x, y) - 1.0 : -1.0;
          }
        break;
      case TargetRepresentation::kPolarImages4: {
        const PolarizationStack stack = synthesize_stack(s);
        for (int slot = 0; slot < 4; ++slot)
          for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
              out.data(0, out.column(b, kQuadY[slot] * h + y, kQuadX[slot] * w + x)) =
                  2.0 * stack.images[slot].at(x, y) - 1.0;
        break;
      }
    }
  }
  return out;
}

Tensor make_conditions(std::span<const PolarStateMap> states, TargetRepresentation rep) {
  check_states(states);
  const int w = states[0].width(), h = states[0].height(), k = spatial_scale(rep);
  Tensor out(1, static_cast<int>(states.size()), h * k, w * k);
  for (int b = 0; b < out.batch; ++b)
    for (int y = 0; y < h * k; ++y)
      for (int x = 0; x < w * k; ++x) out.data(0, out.column(b, y, x)) = 2.0 * states[b].s0.at(x % w, y % h) - 1.0;
  return out;
}

PolarStateMap decode_representation(const Tensor& t, int b, TargetRepresentation rep, const RadianceImage& s0) {
  if (t.channels() != channel_count(rep)) throw StructuralError("decode_representation: channel count mismatch");
  if (b < 0 || b >= t.batch) throw PreconditionError("decode_representation: batch index out of range");
  const int k = spatial_scale(rep);
  if (t.height % k || t.width % k) throw StructuralError("decode_representation: grid size must be even");
  const int w = t.width / k, h = t.height / k;

  if (rep == TargetRepresentation::kPolarImages4) {
    PolarizationStack stack;
    for (int slot = 0; slot < 4; ++slot) {
      stack.images[slot] = Image(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double v = t.data(0, t.column(b, kQuadY[slot] * h + y, kQuadX[slot] * w + x));
          if (!std::isfinite(v)) throw NumericalError("decode_representation: non-finite sample");
          stack.images[slot].at(x, y) = std::max(0.0, (v + 1.0) / 2.0);
        }
    }
    return decompose_stack(stack);
  }

  if (s0.width() != w || s0.height() != h || s0.channels() != 1)
    throw StructuralError("decode_representation: s0 size differs from tensor");
  if (rep == TargetRepresentation::kEncodedAolpDolp) {
    EncodedPolarMap enc{Image(w, h), Image(w, h), Image(w, h)};
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const Eigen::Index col = t.column(b, y, x);
        enc.cos2.at(x, y) = t.data(0, col);
        enc.sin2.at(x, y) = t.data(1, col);
        enc.p_norm.at(x, y) = t.data(2, col);
      }
    return decode(enc, s0);
  }

  PolarStateMap out{s0, Image(w, h), Image(w, h), Mask(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Eigen::Index col = t.column(b, y, x);
      const double phi = t.data(0, col) * kHalfPi, p = t.data(1, col);
      if (!std::isfinite(phi) || !std::isfinite(p)) continue;
      out.aolp.at(x, y) = wrap_aolp(phi);
      out.dolp.at(x, y) = std::clamp((p + 1.0) / 2.0, 0.0, 1.0);
      out.valid.at(x, y) = 1;
    }
  return out;
}

}  // namespace polar::diffusion
