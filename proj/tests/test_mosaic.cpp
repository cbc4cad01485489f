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

#include <doctest.h>

#include <cmath>
#include <set>

#include "generators.hpp"
#include "polar/error.hpp"
#include "polar/metrics.hpp"
#include "polar/mosaic.hpp"

using namespace polar;
using polar::testing::Gen;

namespace {

PolarizationStack random_stack(Gen& g, int w, int h) {
  PolarizationStack st;
  for (auto& img : st.images) img = g.image(w, h, 0.0, 1.0);
  return st;
}

Mask interior(int w, int h, int border) {
  Mask m(w, h, 1, 0);
  for (int y = border; y < h - border; ++y)
    for (int x = border; x < w - border; ++x) m.at(x, y) = 1;
  return m;
}

}  // namespace

TEST_CASE("mosaic pattern layout and parsing") {
  const MosaicPattern p;
  CHECK(p.angle_at(0, 0) == 90);
  CHECK(p.angle_at(0, 1) == 45);
  CHECK(p.angle_at(1, 0) == 135);
  CHECK(p.angle_at(1, 1) == 0);
  CHECK(p.angle_at(5, 7) == 0);
  CHECK(p.to_string() == "90,45,135,0");
  CHECK(MosaicPattern::parse("0,45,90,135") == MosaicPattern({0, 45, 90, 135}));
  CHECK(MosaicPattern::parse(p.to_string()) == p);
  for (int slot = 0; slot < 4; ++slot) {
    const auto [r, c] = p.offset_of(slot);
    CHECK(p.slot_at(r, c) == slot);
  }
  CHECK_THROWS_AS(MosaicPattern({0, 0, 90, 135}), PreconditionError);
  CHECK_THROWS_AS(MosaicPattern({0, 30, 90, 135}), PreconditionError);
  CHECK_THROWS_AS(MosaicPattern::parse("0,45,90"), PreconditionError);
  CHECK_THROWS_AS(MosaicPattern::parse("0,45,90,135,0"), PreconditionError);
  CHECK_THROWS_AS(MosaicPattern::parse("0,45,ninety,135"), PreconditionError);
}

TEST_CASE("mosaic of a single lit analyzer marks its cells") {
  PolarizationStack st;
  for (auto& img : st.images) img = Image(8, 6, 1, 0.0);
  st.images[0] = Image(8, 6, 1, 1.0);
  const MosaicFrame f = mosaic(st);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 8; ++x) CHECK(f.data.at(x, y) == ((y % 2 == 1 && x % 2 == 1) ? 1.0 : 0.0));
}

TEST_CASE("mosaic and demosaic of constant inputs") {
  PolarizationStack st;
  for (auto& img : st.images) img = Image(6, 4, 1, 0.37);
  const MosaicFrame f = mosaic(st);
  for (double v : f.data) CHECK(v == 0.37);
  const PolarizationStack back = demosaic(f);
  for (const auto& img : back.images)
    for (double v : img) CHECK(v == 0.37);
}

TEST_CASE("mosaic preconditions") {
  Gen g(1);
  PolarizationStack odd = random_stack(g, 5, 4);
  CHECK_THROWS_AS(mosaic(odd), PreconditionError);
  PolarizationStack rgb;
  for (auto& img : rgb.images) img = Image(4, 4, 3, 0.1);
  CHECK_THROWS_AS(mosaic(rgb), PreconditionError);
}

TEST_CASE("property: mosaic is lossless and demosaic is exact at the knots") {
  Gen g(31);
  for (const auto& pattern : {MosaicPattern(), MosaicPattern({0, 45, 90, 135}), MosaicPattern({135, 0, 45, 90})}) {
    const PolarizationStack st = random_stack(g, 2 * g.integer(2, 12), 2 * g.integer(2, 12));
    const MosaicFrame f = mosaic(st, pattern);
    const PolarizationStack back = demosaic(f);
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x) {
        const int slot = pattern.slot_at(y, x);
        CHECK(f.data.at(x, y) == st.images[slot].at(x, y));
        CHECK(back.images[slot].at(x, y) == st.images[slot].at(x, y));
      }
  }
}

TEST_CASE("property: demosaic reproduces affine fields in the interior") {
  Gen g(4);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 2 * g.integer(4, 20), h = 2 * g.integer(4, 20);
    double a[4], b[4], c[4];
    PolarizationStack st;
    for (int k = 0; k < 4; ++k) {
      a[k] = g.uniform(-0.02, 0.02);
      b[k] = g.uniform(-0.02, 0.02);
      c[k] = 1.0;
      st.images[k] = Image(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) st.images[k].at(x, y) = a[k] * x + b[k] * y + c[k];
    }
    const PolarizationStack back = demosaic(mosaic(st));
    // Pixels whose bilinear neighbours all exist, for every lattice offset.
    for (int k = 0; k < 4; ++k)
      for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
          const double expected = a[k] * x + b[k] * y + c[k];
          CHECK(std::abs(back.images[k].at(x, y) - expected) <= 1e-13);
        }
  }
}

TEST_CASE("property: demosaic of band-limited stacks exceeds 40 dB in the interior") {
  Gen g(99);
  for (int trial = 0; trial < 4; ++trial) {
    PolarizationStack st;
    for (auto& img : st.images) img = g.blurred_noise(64, 64, 2.0);
    const PolarizationStack back = demosaic(mosaic(st));
    const Mask m = interior(64, 64, 4);
    for (int k = 0; k < 4; ++k) {
      for (double v : back.images[k]) CHECK(v >= 0.0);
      CHECK(psnr(back.images[k], st.images[k], 1.0, &m) > 40.0);
    }
  }
}

TEST_CASE("property: demosaicing smooth states barely moves the AoLP") {
  Gen g(12);
  const PolarStateMap s = g.smooth_state(64, 64, 3.0);
  const PolarizationStack st = synthesize_stack(s);
  const PolarStateMap direct = decompose_stack(st);
  const PolarStateMap via = decompose_stack(demosaic(mosaic(st)));
  Mask m = both_valid(direct.valid, via.valid);
  const Mask in = interior(64, 64, 4);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = m[i] && in[i];
  CHECK(mange(direct.aolp, via.aolp, m) < 1.0);
}

TEST_CASE("apply_noise: identity, determinism and validation") {
  Gen g(6);
  const MosaicFrame f = mosaic(random_stack(g, 16, 16));
  CHECK(apply_noise(f, {}).data == f.data);

  SensorNoiseModel model;
  model.read_sigma = 0.05;
  model.shot_gain = 200.0;
  model.seed = 17;
  const MosaicFrame a = apply_noise(f, model), b = apply_noise(f, model);
  CHECK(a.data == b.data);
  for (double v : a.data) CHECK(v >= 0.0);
  model.seed = 18;
  CHECK(apply_noise(f, model).data != a.data);

  model.read_sigma = -1.0;
  CHECK_THROWS_AS(apply_noise(f, model), PreconditionError);
  model.read_sigma = 0.0;
  model.bit_depth = 10;
  CHECK_THROWS_AS(apply_noise(f, model), PreconditionError);
}

TEST_CASE("apply_noise: read noise standard deviation matches the model") {
  MosaicFrame f{Image(1000, 1000, 1, 0.5), MosaicPattern()};
  SensorNoiseModel model;
  model.read_sigma = 0.01;
  model.seed = 3;
  const MosaicFrame n = apply_noise(f, model);
  CompensatedSum sum, sq;
  for (double v : n.data) sum.add(v);
  const double mean = sum.value() / n.data.size();
  for (double v : n.data) sq.add((v - mean) * (v - mean));
  const double sd = std::sqrt(sq.value() / (n.data.size() - 1));
  CHECK(sd >= 0.0099);
  CHECK(sd <= 0.0101);
  CHECK(std::abs(mean - 0.5) < 1e-4);
}

TEST_CASE("apply_noise: shot noise variance scales as value over gain") {
  MosaicFrame f{Image(500, 500, 1, 0.4), MosaicPattern()};
  SensorNoiseModel model;
  model.shot_gain = 100.0;
  model.seed = 9;
  const MosaicFrame n = apply_noise(f, model);
  CompensatedSum sum, sq;
  for (double v : n.data) sum.add(v);
  const double mean = sum.value() / n.data.size();
  for (double v : n.data) sq.add((v - mean) * (v - mean));
  const double var = sq.value() / (n.data.size() - 1);
  CHECK(mean == doctest::Approx(0.4).epsilon(0.005));
  CHECK(var == doctest::Approx(0.4 / 100.0).epsilon(0.02));
  // Poisson counts divided by the gain land on a 1/gain lattice.
  for (std::size_t i = 0; i < 1000; ++i) CHECK(std::abs(n.data[i] * 100.0 - std::round(n.data[i] * 100.0)) < 1e-9);
}

TEST_CASE("quantization rounds half up") {
  CHECK(quantize_value(0.5, 8) == 128.0 / 255.0);
  CHECK(quantize_value(1.0, 16) == 1.0);
  CHECK(quantize_value(0.0, 8) == 0.0);
  CHECK(quantize_value(1.0 / 510.0, 8) == 1.0 / 255.0);
  CHECK(quantize_value(0.25, 12) == std::floor(0.25 * 4095 + 0.5) / 4095);
  CHECK_THROWS_AS(quantize_value(1.0 + 1e-12, 8), PreconditionError);
  CHECK_THROWS_AS(quantize_value(-1e-12, 8), PreconditionError);

  MosaicFrame f{Image(2, 2, 1, 0.5), MosaicPattern()};
  SensorNoiseModel model;
  model.bit_depth = 8;
  for (double v : apply_noise(f, model).data) CHECK(v == 128.0 / 255.0);
  Gen g(2);
  MosaicFrame r{g.image(32, 32, 0.0, 1.0), MosaicPattern()};
  const MosaicFrame q = quantize(r, 12);
  std::set<double> levels(q.data.begin(), q.data.end());
  for (double v : levels) CHECK(std::abs(v * 4095 - std::round(v * 4095)) < 1e-9);
  for (std::size_t i = 0; i < q.data.size(); ++i) CHECK(std::abs(q.data[i] - r.data[i]) <= 0.5 / 4095 + 1e-15);
}
