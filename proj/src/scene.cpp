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
#include "polar/scene.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polar/error.hpp"
#include "polar/io.hpp"

namespace polar::scene {

namespace {

constexpr const char* kStackNames[4] = {"I000", "I045", "I090", "I135"};
constexpr const char* kMetaFile = "meta.txt";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(out)) throw IoError("meta.txt: bad value for " + key + ": '" + v + "'");
  return out;
}

std::optional<fs::path> find_image(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".pfm", ".pgm", ".ppm"}) {
    fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

fs::path require_image(const fs::path& dir, const std::string& stem) {
  auto p = find_image(dir, stem);
  if (!p) throw IoError("missing " + (dir / (stem + ".pfm")).string());
  return *p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

SceneMeta SceneMeta::parse(const std::string& text) {
  SceneMeta m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("meta.txt: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "pattern") {
      try {
        m.pattern = MosaicPattern::parse(value);
      } catch (const Error& e) {
        throw IoError(std::string("meta.txt: ") + e.what());
      }
    } else if (key == "peak") {
      m.peak = parse_double(key, value);
      if (!(m.peak > 0.0)) throw IoError("meta.txt: peak must be positive");
    } else if (key == "bitdepth") {
      if (value == "none") {
        m.bitdepth.reset();
      } else {
        const double d = parse_double(key, value);
        if (d != 8 && d != 12 && d != 16) throw IoError("meta.txt: bitdepth must be 8, 12, 16 or none");
        m.bitdepth = static_cast<int>(d);
      }
    } else if (key == "seed") {
      std::size_t used = 0;
      try {
        m.seed = std::stoull(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty() || value[0] == '-') throw IoError("meta.txt: bad seed '" + value + "'");
    } else if (key == "gray_weights") {
      double w[3];
      std::istringstream parts(value);
      std::string part;
      int n = 0;
      while (std::getline(parts, part, ',')) {
        if (n == 3) throw IoError("meta.txt: gray_weights needs three values");
        w[n++] = parse_double(key, trim(part));
      }
      if (n != 3) throw IoError("meta.txt: gray_weights needs three values");
      if (w[0] < 0 || w[1] < 0 || w[2] < 0 || std::abs(w[0] + w[1] + w[2] - 1.0) > 1e-6)
        throw IoError("meta.txt: gray_weights must be non-negative and sum to 1");
      m.gray_weights = {w[0], w[1], w[2]};
    } else {
      throw IoError("meta.txt: unknown key '" + key + "'");
    }
  }
  return m;
}

std::string SceneMeta::to_string() const {
  char weights[96];
  std::snprintf(weights, sizeof weights, "%.17g,%.17g,%.17g", gray_weights.r, gray_weights.g, gray_weights.b);
  char peak_text[32];
  std::snprintf(peak_text, sizeof peak_text, "%.17g", peak);
  std::ostringstream o;
  o << "pattern=" << pattern.to_string() << "\n"
    << "peak=" << peak_text << "\n"
    << "bitdepth=" << (bitdepth ? std::to_string(*bitdepth) : std::string("none")) << "\n"
    << "seed=" << seed << "\n"
    << "gray_weights=" << weights << "\n";
  return o.str();
}

SceneMeta read_meta(const fs::path& dir) {
  const fs::path p = dir / kMetaFile;
  if (!fs::exists(p)) return {};
  std::ifstream f(p);
  if (!f) throw IoError("cannot read " + p.string());
  std::ostringstream text;
  text << f.rdbuf();
  return SceneMeta::parse(text.str());
}

void write_meta(const fs::path& dir, const SceneMeta& meta) {
  ensure_dir(dir);
  std::ofstream f(dir / kMetaFile);
  f << meta.to_string();
  if (!f) throw IoError("cannot write " + (dir / kMetaFile).string());
}

bool has_stack(const fs::path& dir) {
  for (const char* n : kStackNames)
    if (!find_image(dir, n)) return false;
  return true;
}

bool has_maps(const fs::path& dir) {
  return fs::exists(dir / "s0.pfm") && fs::exists(dir / "aolp.pfm") && fs::exists(dir / "dolp.pfm");
}

bool has_mosaic(const fs::path& dir) { return find_image(dir, "mosaic").has_value(); }

PolarizationStack read_stack(const fs::path& dir) {
  PolarizationStack s;
  for (int k = 0; k < 4; ++k) s.images[k] = io::read_image(require_image(dir, kStackNames[k]));
  s.check_shape();
  return s;
}

void write_stack(const fs::path& dir, const PolarizationStack& stack) {
  stack.check_shape();
  ensure_dir(dir);
  for (int k = 0; k < 4; ++k) io::write_pfm(dir / (std::string(kStackNames[k]) + ".pfm"), stack.images[k]);
}

PolarStateMap read_maps(const fs::path& dir) {
  for (const char* n : {"s0.pfm", "aolp.pfm", "dolp.pfm"})
    if (!fs::exists(dir / n)) throw IoError("missing " + (dir / n).string());
  PolarStateMap m;
  m.s0 = io::read_pfm(dir / "s0.pfm");
  m.aolp = io::read_pfm(dir / "aolp.pfm");
  m.dolp = io::read_pfm(dir / "dolp.pfm");
  require_same_shape(m.s0, m.aolp, "property maps (s0/aolp)");
  require_same_shape(m.s0, m.dolp, "property maps (s0/dolp)");
  m.valid = Mask(m.s0.width(), m.s0.height(), m.s0.channels());
  if (fs::exists(dir / "valid.pgm")) {
    const io::QuantizedImage q = io::read_pnm(dir / "valid.pgm");
    if (q.width != m.s0.width() || q.height != m.s0.height() || q.channels != m.s0.channels())
      throw StructuralError("valid.pgm size differs from the property maps");
    for (std::size_t i = 0; i < q.samples.size(); ++i) m.valid[i] = q.samples[i] ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < m.s0.size(); ++i) m.valid[i] = (m.s0[i] > kEpsDark && m.dolp[i] >= kEpsPol) ? 1 : 0;
  }
  for (std::size_t i = 0; i < m.s0.size(); ++i) {
    if (!std::isfinite(m.s0[i]) || !std::isfinite(m.aolp[i]) || !std::isfinite(m.dolp[i]))
      throw IoError("non-finite value in property maps of " + dir.string());
  }
  return m;
}

void write_maps(const fs::path& dir, const PolarStateMap& state) {
  state.check_shape();
  ensure_dir(dir);
  io::write_pfm(dir / "s0.pfm", state.s0);
  io::write_pfm(dir / "aolp.pfm", state.aolp);
  io::write_pfm(dir / "dolp.pfm", state.dolp);
  io::QuantizedImage q{state.width(), state.height(), state.channels(), 255, {}};
  q.samples.resize(state.valid.size());
  for (std::size_t i = 0; i < q.samples.size(); ++i) q.samples[i] = state.valid[i] ? 255 : 0;
  io::write_pnm(dir / "valid.pgm", q);
}

MosaicFrame read_mosaic(const fs::path& dir) {
  MosaicFrame f{io::read_image(require_image(dir, "mosaic")), read_meta(dir).pattern};
  if (f.data.channels() != 1) throw StructuralError("mosaic frame must be single-channel");
  f.validate();
  return f;
}

void write_mosaic(const fs::path& dir, const MosaicFrame& frame) {
  frame.validate();
  ensure_dir(dir);
  io::write_pfm(dir / "mosaic.pfm", frame.data);
}

PolarStateMap load_state(const fs::path& dir) {
  if (has_maps(dir)) return read_maps(dir);
  if (has_stack(dir)) return decompose_stack(to_grayscale(read_stack(dir), read_meta(dir).gray_weights));
  throw IoError("scene " + dir.string() + " has neither property maps nor angle images");
}

PolarizationStack load_images(const fs::path& dir) {
  if (has_stack(dir)) return to_grayscale(read_stack(dir), read_meta(dir).gray_weights);
  if (has_maps(dir)) return synthesize_stack(read_maps(dir));
  throw IoError("scene " + dir.string() + " has neither angle images nor property maps");
}

std::string angle_file_name(double degrees) {
  char buf[48];
  if (degrees == std::floor(degrees))
    std::snprintf(buf, sizeof buf, "I%03d.pfm", static_cast<int>(degrees));
  else
    std::snprintf(buf, sizeof buf, "I%07.3f.pfm", degrees);
  return buf;
}

}  // namespace polar::scene
