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

#include <fstream>

#include "generators.hpp"
#include "polar/error.hpp"
#include "polar/io.hpp"
#include "polar/scene.hpp"
#include "temp_dir.hpp"

using namespace polar;
using polar::testing::Gen;
using polar::testing::TempDir;

namespace {

Image as_float(Image img) {
  for (double& v : img) v = static_cast<float>(v);
  return img;
}

}  // namespace

TEST_CASE("scene meta parses and prints every key") {
  const scene::SceneMeta m = scene::SceneMeta::parse(
      "# comment\npattern=0,45,90,135\npeak=255\nbitdepth=12\nseed=42\ngray_weights=0.2,0.7,0.1\n\n");
  CHECK(m.pattern == MosaicPattern({0, 45, 90, 135}));
  CHECK(m.peak == 255.0);
  CHECK(m.bitdepth == 12);
  CHECK(m.seed == 42);
  CHECK(m.gray_weights.g == 0.7);
  const scene::SceneMeta again = scene::SceneMeta::parse(m.to_string());
  CHECK(again.to_string() == m.to_string());
  CHECK(again.gray_weights.r == m.gray_weights.r);
  CHECK_FALSE(scene::SceneMeta::parse("bitdepth=none").bitdepth.has_value());
}

TEST_CASE("scene meta rejects bad keys and values") {
  for (const char* text : {"colour=red", "peak=-1", "peak=abc", "bitdepth=10", "seed=x", "pattern=0,0,90,135",
                           "gray_weights=1,2", "novalue"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(scene::SceneMeta::parse(text), IoError);
  }
}

TEST_CASE("scene meta defaults when absent") {
  TempDir dir;
  const scene::SceneMeta m = scene::read_meta(dir.path());
  CHECK(m.peak == 1.0);
  CHECK(m.pattern == MosaicPattern());
  CHECK_FALSE(m.bitdepth.has_value());
}

TEST_CASE("stack files round trip and layouts are detected") {
  TempDir dir;
  Gen g(1);
  PolarizationStack st;
  for (auto& img : st.images) img = as_float(g.image(6, 4, 0.0, 1.0));
  CHECK_FALSE(scene::has_stack(dir.path()));
  scene::write_stack(dir.path(), st);
  CHECK(scene::has_stack(dir.path()));
  CHECK_FALSE(scene::has_maps(dir.path()));
  const PolarizationStack back = scene::read_stack(dir.path());
  for (int k = 0; k < 4; ++k) CHECK(back.images[k] == st.images[k]);
  CHECK(std::filesystem::exists(dir / "I045.pfm"));

  io::write_pfm(dir / "I090.pfm", Image(5, 4));
  CHECK_THROWS_AS(scene::read_stack(dir.path()), StructuralError);
  std::filesystem::remove(dir / "I090.pfm");
  CHECK_THROWS_AS(scene::read_stack(dir.path()), IoError);
}

TEST_CASE("8-bit stacks are read normalized") {
  TempDir dir;
  for (const char* name : {"I000.pgm", "I045.pgm", "I090.pgm", "I135.pgm"})
    io::write_pnm(dir / name, io::QuantizedImage{2, 1, 1, 255, {0, 255}});
  const PolarizationStack st = scene::read_stack(dir.path());
  CHECK(st.i90().at(0, 0) == 0.0);
  CHECK(st.i90().at(1, 0) == 1.0);
}

TEST_CASE("map files round trip with and without a validity file") {
  TempDir dir;
  Gen g(2);
  PolarStateMap s = g.state(5, 3);
  s.s0 = as_float(s.s0);
  s.dolp = as_float(s.dolp);
  s.aolp = as_float(s.aolp);
  s.valid.at(2, 1) = 0;
  scene::write_maps(dir.path(), s);
  const PolarStateMap r = scene::read_maps(dir.path());
  CHECK(r.s0 == s.s0);
  CHECK(r.dolp == s.dolp);
  CHECK(r.aolp == s.aolp);
  CHECK(r.valid == s.valid);

  std::filesystem::remove(dir / "valid.pgm");
  const PolarStateMap fallback = scene::read_maps(dir.path());
  for (std::size_t i = 0; i < s.s0.size(); ++i)
    CHECK(fallback.valid[i] == ((s.s0[i] > kEpsDark && s.dolp[i] >= kEpsPol) ? 1 : 0));
}

TEST_CASE("load_state prefers maps and otherwise decomposes the stack") {
  TempDir dir;
  const PolarStateMap s = PolarStateMap::uniform(4, 4, 1.0, 0.5, 0.0);
  scene::write_stack(dir.path(), synthesize_stack(s));
  const PolarStateMap from_stack = scene::load_state(dir.path());
  CHECK(from_stack.dolp.at(1, 1) == 0.5);
  scene::write_maps(dir.path(), PolarStateMap::uniform(4, 4, 1.0, 0.25, 0.0));
  CHECK(scene::load_state(dir.path()).dolp.at(1, 1) == 0.25);
  CHECK(scene::load_images(dir.path()).i0().at(0, 0) == 0.75);
}

TEST_CASE("colour stacks are reduced to gray with the scene weights") {
  TempDir dir;
  PolarizationStack st;
  for (auto& img : st.images) {
    img = Image(2, 2, 3);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) {
        img.at(x, y, 0) = 0.5;
        img.at(x, y, 1) = 0.25;
        img.at(x, y, 2) = 1.0;
      }
  }
  scene::write_stack(dir.path(), st);
  scene::SceneMeta meta;
  meta.gray_weights = {0.5, 0.25, 0.25};
  scene::write_meta(dir.path(), meta);
  const PolarStateMap s = scene::load_state(dir.path());
  CHECK(s.channels() == 1);
  CHECK(s.s0.at(0, 0) == doctest::Approx(2 * (0.25 + 0.0625 + 0.25)));
}

TEST_CASE("mosaic files keep the scene pattern") {
  TempDir dir;
  MosaicFrame f{Image(4, 2, 1, 0.5), MosaicPattern({0, 45, 90, 135})};
  scene::write_mosaic(dir.path(), f);
  scene::SceneMeta meta;
  meta.pattern = f.pattern;
  scene::write_meta(dir.path(), meta);
  const MosaicFrame r = scene::read_mosaic(dir.path());
  CHECK(r.data == f.data);
  CHECK(r.pattern == f.pattern);
  CHECK(scene::has_mosaic(dir.path()));
}

TEST_CASE("angle file names") {
  CHECK(scene::angle_file_name(0) == "I000.pfm");
  CHECK(scene::angle_file_name(40) == "I040.pfm");
  CHECK(scene::angle_file_name(135) == "I135.pfm");
  CHECK(scene::angle_file_name(22.5) == "I022.500.pfm");
}
