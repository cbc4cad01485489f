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
#include "polar/diffusion/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "polar/error.hpp"

namespace polar::diffusion {

namespace {

constexpr char kMagic[4] = {'P', 'D', 'I', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::vector<unsigned char>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  out.insert(out.end(), std::begin(bytes), std::end(bytes));
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& data, const std::string& name) : data_(data), name_(name) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw IoError("checkpoint " + name_ + ": truncated");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  const std::vector<unsigned char>& data_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::uint32_t rep_code(TargetRepresentation rep) {
  switch (rep) {
    case TargetRepresentation::kPolarImages4: return 0;
    case TargetRepresentation::kRawAolpDolp: return 1;
    case TargetRepresentation::kEncodedAolpDolp: return 2;
  }
  return 255;
}

}  // namespace

Model Checkpoint::model() const {
  Model m(arch, 0);
  if (static_cast<std::size_t>(parameters.size()) != m.params().size())
    throw StructuralError("checkpoint: parameter count does not match architecture");
  m.params().values() = parameters;
  return m;
}

Checkpoint make_checkpoint(const Model& model, TargetRepresentation rep, const NoiseSchedule& schedule) {
  Checkpoint c;
  c.arch = model.architecture();
  c.representation = rep;
  c.schedule_steps = schedule.steps();
  c.beta_start = schedule.beta_start();
  c.beta_end = schedule.beta_end();
  c.parameters = model.params().values();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, rep_code(ckpt.representation));
  for (int v : {ckpt.arch.target_channels, ckpt.arch.base_width, ckpt.arch.mid_width, ckpt.arch.cond_width,
                ckpt.arch.time_dim, ckpt.arch.time_hidden, ckpt.schedule_steps})
    put<std::int32_t>(out, v);
  put<double>(out, ckpt.beta_start);
  put<double>(out, ckpt.beta_end);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(ckpt.parameters.size()));
  for (Eigen::Index i = 0; i < ckpt.parameters.size(); ++i) put<double>(out, ckpt.parameters[i]);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path.string());
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) throw IoError("checkpoint " + name + ": bad magic");
  Reader r(data, name);
  for (int i = 0; i < 4; ++i) r.get<char>();
  if (r.get<std::uint32_t>() != kVersion) throw IoError("checkpoint " + name + ": unsupported version");
  Checkpoint c;
  switch (r.get<std::uint32_t>()) {
    case 0: c.representation = TargetRepresentation::kPolarImages4; break;
    case 1: c.representation = TargetRepresentation::kRawAolpDolp; break;
    case 2: c.representation = TargetRepresentation::kEncodedAolpDolp; break;
    default: throw IoError("checkpoint " + name + ": unknown representation");
  }
  c.arch.target_channels = r.get<std::int32_t>();
  c.arch.base_width = r.get<std::int32_t>();
  c.arch.mid_width = r.get<std::int32_t>();
  c.arch.cond_width = r.get<std::int32_t>();
  c.arch.time_dim = r.get<std::int32_t>();
  c.arch.time_hidden = r.get<std::int32_t>();
  c.schedule_steps = r.get<std::int32_t>();
  c.beta_start = r.get<double>();
  c.beta_end = r.get<double>();
  const auto count = r.get<std::uint64_t>();
  if (count > (data.size() / sizeof(double))) throw IoError("checkpoint " + name + ": truncated");
  c.parameters.resize(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < c.parameters.size(); ++i) c.parameters[i] = r.get<double>();
  if (!r.done()) throw IoError("checkpoint " + name + ": trailing bytes");
  try {
    c.arch.validate();
    if (c.arch.target_channels != channel_count(c.representation))
      throw IoError("checkpoint " + name + ": channel count does not match representation");
    (void)c.schedule();
  } catch (const PreconditionError& e) {
    throw IoError("checkpoint " + name + ": invalid header (" + e.what() + ")");
  }
  return c;
}

}  // namespace polar::diffusion
