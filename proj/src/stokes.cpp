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

#include "polar/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace polar {

namespace {

constexpr double kPi = std::numbers::pi;

struct Direction {
  double c;
  double s;
};

// (cos 2theta, sin 2theta), exact when 2theta is a multiple of pi/2.
Direction analyzer_direction(double theta) {
  const double quarter_turns = 4.0 * theta / kPi;
  const double k = std::round(quarter_turns);
  if (std::abs(quarter_turns - k) < 1e-12) {
    switch (((static_cast<long long>(k) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(2.0 * theta), std::sin(2.0 * theta)};
}

double transmit(double s0, double dolp, double aolp, Direction d) {
  const double half = 0.5 * s0;
  const double cos_diff = d.c * std::cos(2.0 * aolp) + d.s * std::sin(2.0 * aolp);
  return std::max(0.0, half + half * (dolp * cos_diff));
}

}  // namespace

void validate_radiance(const RadianceImage& img, const char* what) {
  for (double v : img) {
    if (!std::isfinite(v)) throw PreconditionError(std::string(what) + ": non-finite radiance");
    if (v < 0.0) throw PreconditionError(std::string(what) + ": negative radiance");
  }
}

void PolarizationStack::check_shape() const {
  for (int k = 1; k < 4; ++k) require_same_shape(images[0], images[k], "polarization stack");
}

PolarStateMap PolarStateMap::uniform(int width, int height, double s0, double dolp, double aolp) {
  PolarStateMap m;
  m.s0 = Image(width, height, 1, s0);
  m.dolp = Image(width, height, 1, dolp);
  m.aolp = Image(width, height, 1, wrap_aolp(aolp));
  const bool valid = s0 >= kEpsDark && dolp >= kEpsPol;
  m.valid = Mask(width, height, 1, valid ? 1 : 0);
  if (!valid) std::fill(m.aolp.begin(), m.aolp.end(), 0.0);
  return m;
}

void PolarStateMap::check_shape() const {
  require_same_shape(s0, dolp, "polar state (s0/dolp)");
  require_same_shape(s0, aolp, "polar state (s0/aolp)");
  require_same_shape(s0, valid, "polar state (s0/valid)");
}

void EncodedPolarMap::check_shape() const {
  require_same_shape(cos2, sin2, "encoded map (cos/sin)");
  require_same_shape(cos2, p_norm, "encoded map (cos/p)");
}

double wrap_aolp(double phi) {
  if (!std::isfinite(phi)) throw PreconditionError("wrap_aolp: non-finite angle");
  double r = std::fmod(phi, kPi);
  if (r > kPi / 2) r -= kPi;
  if (r <= -kPi / 2) r += kPi;
  return r;
}

namespace scalar {

Stack4 synthesize(double s0, double dolp, double aolp) {
  const double half = 0.5 * s0;
  const double a = half * (dolp * std::cos(2.0 * aolp));
  const double b = half * (dolp * std::sin(2.0 * aolp));
  return {std::max(0.0, half + a), std::max(0.0, half + b), std::max(0.0, half - a),
          std::max(0.0, half - b)};
}

PolarState decompose(const Stack4& s) {
  PolarState out;
  const double s1 = s.i0 - s.i90;
  const double s2 = s.i45 - s.i135;
  out.s0 = (s.i0 + s.i45 + s.i90 + s.i135) / 2.0;
  if (out.s0 < kEpsDark) return out;
  const double magnitude = std::hypot(s1, s2);
  out.dolp = std::clamp(magnitude / out.s0, 0.0, 1.0);
  out.valid = magnitude >= kEpsPol * out.s0;
  if (out.valid) out.aolp = wrap_aolp(0.5 * std::atan2(s2, s1));
  return out;
}

}  // namespace scalar

RadianceImage malus_intensity(const PolarStateMap& state, double theta) {
  state.check_shape();
  if (!std::isfinite(theta)) throw PreconditionError("malus_intensity: non-finite analyzer angle");
  const Direction d = analyzer_direction(theta);
  RadianceImage out(state.width(), state.height(), state.channels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double dolp = state.valid[i] ? state.dolp[i] : 0.0;
    out[i] = transmit(state.s0[i], dolp, state.aolp[i], d);
  }
  return out;
}

PolarizationStack synthesize_stack(const PolarStateMap& state) {
  state.check_shape();
  PolarizationStack stack;
  for (auto& img : stack.images) img = RadianceImage(state.width(), state.height(), state.channels());
  for (std::size_t i = 0; i < state.s0.size(); ++i) {
    const double dolp = state.valid[i] ? state.dolp[i] : 0.0;
    const auto s = scalar::synthesize(state.s0[i], dolp, state.aolp[i]);
    stack.images[0][i] = s.i0;
    stack.images[1][i] = s.i45;
    stack.images[2][i] = s.i90;
    stack.images[3][i] = s.i135;
  }
  return stack;
}

PolarStateMap decompose_stack(const PolarizationStack& stack) {
  stack.check_shape();
  for (const auto& img : stack.images) validate_radiance(img, "decompose_stack");
  const int w = stack.width(), h = stack.height(), c = stack.channels();
  PolarStateMap out{Image(w, h, c), Image(w, h, c), Image(w, h, c), Mask(w, h, c)};
  for (std::size_t i = 0; i < out.s0.size(); ++i) {
    const auto p = scalar::decompose({stack.images[0][i], stack.images[1][i], stack.images[2][i],
                                      stack.images[3][i]});
    out.s0[i] = p.s0;
    out.dolp[i] = p.dolp;
    out.aolp[i] = p.aolp;
    out.valid[i] = p.valid ? 1 : 0;
  }
  return out;
}

RadianceImage unpolarized_intensity(const PolarizationStack& stack) {
  stack.check_shape();
  for (const auto& img : stack.images) validate_radiance(img, "unpolarized_intensity");
  RadianceImage out(stack.width(), stack.height(), stack.channels());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (stack.images[0][i] + stack.images[1][i] + stack.images[2][i] + stack.images[3][i]) / 2.0;
  return out;
}

double consistency_residual(const PolarizationStack& stack) {
  stack.check_shape();
  double worst = 0.0;
  for (std::size_t i = 0; i < stack.images[0].size(); ++i) {
    const double i0 = stack.images[0][i], i45 = stack.images[1][i];
    const double i90 = stack.images[2][i], i135 = stack.images[3][i];
    const double s0 = (i0 + i45 + i90 + i135) / 2.0;
    worst = std::max(worst, std::abs((i0 + i90) - (i45 + i135)) / std::max(s0, kEpsDark));
  }
  return worst;
}

EncodedPolarMap encode(const PolarStateMap& state) {
  state.check_shape();
  const int w = state.width(), h = state.height(), c = state.channels();
  EncodedPolarMap enc{Image(w, h, c), Image(w, h, c), Image(w, h, c)};
  for (std::size_t i = 0; i < state.s0.size(); ++i) {
    if (state.valid[i]) {
      enc.cos2[i] = std::cos(2.0 * state.aolp[i]);
      enc.sin2[i] = std::sin(2.0 * state.aolp[i]);
      enc.p_norm[i] = 2.0 * state.dolp[i] - 1.0;
    } else {
      enc.cos2[i] = 1.0;
      enc.sin2[i] = 0.0;
      enc.p_norm[i] = -1.0;
    }
  }
  return enc;
}

PolarStateMap decode(const EncodedPolarMap& enc, const RadianceImage& s0) {
  enc.check_shape();
  require_same_shape(enc.cos2, s0, "decode");
  const int w = s0.width(), h = s0.height(), c = s0.channels();
  PolarStateMap out{s0, Image(w, h, c), Image(w, h, c), Mask(w, h, c)};
  for (std::size_t i = 0; i < s0.size(); ++i) {
    const double cs = enc.cos2[i], sn = enc.sin2[i];
    out.dolp[i] = std::clamp((enc.p_norm[i] + 1.0) / 2.0, 0.0, 1.0);
    const bool valid = std::isfinite(cs) && std::isfinite(sn) && std::hypot(cs, sn) >= kEpsEnc;
    out.valid[i] = valid ? 1 : 0;
    out.aolp[i] = valid ? wrap_aolp(0.5 * std::atan2(sn, cs)) : 0.0;
  }
  return out;
}

RadianceImage to_grayscale(const RadianceImage& img, const GrayWeights& wts) {
  if (img.channels() == 1) return img;
  if (img.channels() != 3) throw PreconditionError("to_grayscale: expected 1 or 3 channels");
  RadianceImage out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.at(x, y) = wts.r * img.at(x, y, 0) + wts.g * img.at(x, y, 1) + wts.b * img.at(x, y, 2);
  return out;
}

PolarizationStack to_grayscale(const PolarizationStack& stack, const GrayWeights& wts) {
  stack.check_shape();
  PolarizationStack out;
  for (int k = 0; k < 4; ++k) out.images[k] = to_grayscale(stack.images[k], wts);
  return out;
}

}  // namespace polar
