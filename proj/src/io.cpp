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

#include "polar/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace polar::io {

namespace {

namespace fs = std::filesystem;

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw IoError("'" + path.string() + "': truncated header");
  return tok;
}

int parse_dim(const std::string& tok, const fs::path& path) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0 || v > (1L << 20)) throw std::out_of_range(tok);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw IoError("'" + path.string() + "': bad dimension '" + tok + "'");
  }
}

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

}  // namespace

Image read_pfm(const fs::path& path) {
  auto in = open_in(path);
  const std::string magic = next_token(in, path);
  int channels;
  if (magic == "Pf") channels = 1;
  else if (magic == "PF") channels = 3;
  else throw IoError("'" + path.string() + "': not a PFM file");
  const int width = parse_dim(next_token(in, path), path);
  const int height = parse_dim(next_token(in, path), path);
  const std::string scale_tok = next_token(in, path);
  double scale;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw IoError("'" + path.string() + "': bad scale '" + scale_tok + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw IoError("'" + path.string() + "': bad scale");
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 4));
  if (static_cast<std::size_t>(in.gcount()) != count * 4)
    throw IoError("'" + path.string() + "': truncated pixel data");

  Image img(width, height, channels);
  std::size_t k = 0;
  for (int row = height - 1; row >= 0; --row)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) {
        const std::uint32_t bits = swap ? byteswap32(raw[k]) : raw[k];
        ++k;
        img.at(x, row, c) = static_cast<double>(std::bit_cast<float>(bits));
      }
  return img;
}

void write_pfm(const fs::path& path, const Image& img) {
  if (img.channels() != 1 && img.channels() != 3)
    throw PreconditionError("write_pfm: only 1 or 3 channels are representable");
  auto out = open_out(path);
  out << (img.channels() == 1 ? "Pf" : "PF") << "\n" << img.width() << " " << img.height() << "\n-1.0\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(img.size() * 4);
  for (int row = img.height() - 1; row >= 0; --row)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(img.at(x, row, c)));
        for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xFF));
      }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

QuantizedImage read_pnm(const fs::path& path) {
  auto in = open_in(path);
  const std::string magic = next_token(in, path);
  QuantizedImage q;
  if (magic == "P5") q.channels = 1;
  else if (magic == "P6") q.channels = 3;
  else throw IoError("'" + path.string() + "': not a binary PGM/PPM file");
  q.width = parse_dim(next_token(in, path), path);
  q.height = parse_dim(next_token(in, path), path);
  q.maxval = parse_dim(next_token(in, path), path);
  if (q.maxval > 65535) throw IoError("'" + path.string() + "': maxval out of range");
  const bool wide = q.maxval > 255;
  const std::size_t count = static_cast<std::size_t>(q.width) * q.height * q.channels;
  std::vector<unsigned char> bytes(count * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size())
    throw IoError("'" + path.string() + "': truncated pixel data");
  q.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    q.samples[i] = wide ? static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]) : bytes[i];
    if (q.samples[i] > q.maxval) throw IoError("'" + path.string() + "': sample exceeds maxval");
  }
  return q;
}

void write_pnm(const fs::path& path, const QuantizedImage& q) {
  if (q.channels != 1 && q.channels != 3) throw PreconditionError("write_pnm: 1 or 3 channels required");
  if (q.maxval < 1 || q.maxval > 65535) throw PreconditionError("write_pnm: maxval must lie in [1, 65535]");
  const std::size_t count = static_cast<std::size_t>(q.width) * q.height * q.channels;
  if (q.samples.size() != count) throw StructuralError("write_pnm: sample count does not match dimensions");
  const bool wide = q.maxval > 255;
  std::vector<unsigned char> bytes;
  bytes.reserve(count * (wide ? 2 : 1));
  for (auto s : q.samples) {
    if (s > q.maxval) throw PreconditionError("write_pnm: sample exceeds maxval");
    if (wide) bytes.push_back(static_cast<unsigned char>(s >> 8));
    bytes.push_back(static_cast<unsigned char>(s & 0xFF));
  }
  auto out = open_out(path);
  out << (q.channels == 1 ? "P5" : "P6") << "\n" << q.width << " " << q.height << "\n" << q.maxval << "\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Image dequantize(const QuantizedImage& q) {
  Image img(q.width, q.height, q.channels);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(q.samples[i]) / q.maxval;
  return img;
}

QuantizedImage quantize_image(const Image& img, int maxval) {
  require(maxval >= 1 && maxval <= 65535, "quantize_image: maxval must lie in [1, 65535]");
  require(img.channels() == 1 || img.channels() == 3, "quantize_image: 1 or 3 channels required");
  QuantizedImage q{img.width(), img.height(), img.channels(), maxval, {}};
  q.samples.resize(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = img[i];
    require(v >= 0.0 && v <= 1.0, "quantize_image: values must lie in [0, 1]");
    q.samples[i] = static_cast<std::uint16_t>(std::floor(v * maxval + 0.5));
  }
  return q;
}

Image read_image(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pfm") return read_pfm(path);
  if (ext == ".pgm" || ext == ".ppm") return dequantize(read_pnm(path));
  throw IoError("'" + path.string() + "': unsupported image extension");
}

}  // namespace polar::io
