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

#include "polar/diffusion/model.hpp"

#include <cmath>

#include "polar/error.hpp"
#include "polar/rng.hpp"

namespace polar::diffusion {

void Architecture::validate() const {
  require(target_channels >= 1, "architecture: target_channels must be positive");
  require(base_width >= 1 && mid_width >= 1 && cond_width >= 1 && time_hidden >= 1,
          "architecture: widths must be positive");
  require(time_dim >= 2 && time_dim % 2 == 0, "architecture: time_dim must be even");
}

Model::Model(const Architecture& arch, std::uint64_t seed) : arch_(arch) {
  arch.validate();
  const int ct = arch.target_channels, w0 = arch.base_width, w1 = arch.mid_width, wc = arch.cond_width;
  conv_c1_ = Conv3x3(params_, "cond.extract1", 1, wc);
  conv_c2_ = Conv3x3(params_, "cond.extract2", wc, wc);
  conv_c3_ = Conv3x3(params_, "cond.level0", wc, wc);
  conv_c4_ = Conv3x3(params_, "cond.level1", wc, wc);
  time1_ = Linear(params_, "time.fc1", arch.time_dim, arch.time_hidden);
  time2_ = Linear(params_, "time.fc2", arch.time_hidden, w0 + w1);
  conv_in_ = Conv3x3(params_, "unet.in", ct + wc, w0);
  conv_a_ = Conv3x3(params_, "unet.level0", w0, w0);
  conv_b_ = Conv3x3(params_, "unet.down", w0 + wc, w1);
  conv_c_ = Conv3x3(params_, "unet.level1", w1, w1);
  conv_d_ = Conv3x3(params_, "unet.up", w1 + w0 + wc, w0);
  conv_out_ = Conv3x3(params_, "unet.out", w0, ct);
  params_.allocate();

  // He-normal weights, zero biases, zero output head.
  SplitMix64 rng(stream_seed(seed, 0x1417));
  for (const auto& block : params_.blocks()) {
    const bool is_bias = block.name.ends_with(".bias");
    const bool is_head = block.name.starts_with("unet.out");
    if (is_bias || is_head) continue;
    const double stddev = std::sqrt(2.0 / static_cast<double>(block.cols));
    for (std::size_t i = 0; i < static_cast<std::size_t>(block.rows * block.cols); ++i)
      params_.values()[static_cast<Eigen::Index>(block.offset + i)] = stddev * rng.normal();
  }
}

Matrix timestep_embedding(const std::vector<int>& t, int dim) {
  const int half = dim / 2;
  Matrix emb(dim, static_cast<Eigen::Index>(t.size()));
  for (std::size_t b = 0; b < t.size(); ++b)
    for (int k = 0; k < half; ++k) {
      const double freq = std::exp(-std::log(10000.0) * k / half);
      emb(k, static_cast<Eigen::Index>(b)) = std::sin(t[b] * freq);
      emb(k + half, static_cast<Eigen::Index>(b)) = std::cos(t[b] * freq);
    }
  return emb;
}

namespace {

Tensor apply_silu(const Tensor& x) {
  Tensor y;
  y.batch = x.batch;
  y.height = x.height;
  y.width = x.width;
  y.data = silu(x.data);
  return y;
}

Tensor silu_grad(const Tensor& pre, const Tensor& dy) {
  Tensor dx;
  dx.batch = pre.batch;
  dx.height = pre.height;
  dx.width = pre.width;
  dx.data = silu_backward(pre.data, dy.data);
  return dx;
}

}  // namespace

Tensor Model::forward(const Tensor& cond, const Tensor& z, const std::vector<int>& t, ForwardCache& c) const {
  if (cond.channels() != 1) throw StructuralError("model: condition must have one channel");
  if (z.channels() != arch_.target_channels) throw StructuralError("model: target channel mismatch");
  if (!cond.same_layout(z)) throw StructuralError("model: condition and target layouts differ");
  if (static_cast<int>(t.size()) != z.batch) throw StructuralError("model: one timestep per sample required");
  if (z.height % 2 || z.width % 2) throw StructuralError("model: spatial size must be even");
  const int w0 = arch_.base_width, w1 = arch_.mid_width;

  c.cond = cond;
  c.z = z;
  c.c1 = conv_c1_.forward(params_, cond, c.cols_c1);
  c.g1 = apply_silu(c.c1);
  c.c2 = conv_c2_.forward(params_, c.g1, c.cols_c2);
  c.g2 = apply_silu(c.c2);
  c.c3 = conv_c3_.forward(params_, c.g2, c.cols_c3);
  c.e0 = apply_silu(c.c3);
  c.pe0 = avg_pool2(c.e0);
  c.c4 = conv_c4_.forward(params_, c.pe0, c.cols_c4);
  c.e1 = apply_silu(c.c4);

  c.emb = timestep_embedding(t, arch_.time_dim);
  c.l1 = time1_.forward(params_, c.emb);
  c.ht = silu(c.l1);
  c.tb = time2_.forward(params_, c.ht);

  c.x0 = concat({&z, &c.e0});
  c.a0 = conv_in_.forward(params_, c.x0, c.cols_in);
  add_per_sample(c.a0, c.tb.topRows(w0));
  c.h0 = apply_silu(c.a0);
  c.a0b = conv_a_.forward(params_, c.h0, c.cols_a);
  c.h0b = apply_silu(c.a0b);
  c.p = avg_pool2(c.h0b);
  c.x1 = concat({&c.p, &c.e1});
  c.a1 = conv_b_.forward(params_, c.x1, c.cols_b);
  add_per_sample(c.a1, c.tb.bottomRows(w1));
  c.h1 = apply_silu(c.a1);
  c.a1b = conv_c_.forward(params_, c.h1, c.cols_c);
  c.h1b = apply_silu(c.a1b);
  c.u = upsample2(c.h1b);
  c.x2 = concat({&c.u, &c.h0b, &c.e0});
  c.a2 = conv_d_.forward(params_, c.x2, c.cols_d);
  c.h2 = apply_silu(c.a2);
  return conv_out_.forward(params_, c.h2, c.cols_out);
}

Tensor Model::forward(const Tensor& cond, const Tensor& z, const std::vector<int>& t) const {
  ForwardCache cache;
  return forward(cond, z, t, cache);
}

void Model::backward(ForwardCache& c, const Tensor& dpred) {
  const int ct = arch_.target_channels, w0 = arch_.base_width, w1 = arch_.mid_width, wc = arch_.cond_width;

  const Tensor dh2 = conv_out_.backward(params_, c.h2, c.cols_out, dpred);
  const Tensor da2 = silu_grad(c.a2, dh2);
  const Tensor dx2 = conv_d_.backward(params_, c.x2, c.cols_d, da2);
  const Tensor dh1b = upsample2_backward(slice_channels(dx2, 0, w1));
  Tensor dh0b = slice_channels(dx2, w1, w0);
  Tensor de0 = slice_channels(dx2, w1 + w0, wc);

  const Tensor da1b = silu_grad(c.a1b, dh1b);
  const Tensor dh1 = conv_c_.backward(params_, c.h1, c.cols_c, da1b);
  const Tensor da1 = silu_grad(c.a1, dh1);
  const Matrix dtb1 = sum_per_sample(da1);
  const Tensor dx1 = conv_b_.backward(params_, c.x1, c.cols_b, da1);
  dh0b.data += avg_pool2_backward(slice_channels(dx1, 0, w0), c.h0b).data;
  const Tensor de1 = slice_channels(dx1, w0, wc);

  const Tensor da0b = silu_grad(c.a0b, dh0b);
  const Tensor dh0 = conv_a_.backward(params_, c.h0, c.cols_a, da0b);
  const Tensor da0 = silu_grad(c.a0, dh0);
  const Matrix dtb0 = sum_per_sample(da0);
  const Tensor dx0 = conv_in_.backward(params_, c.x0, c.cols_in, da0);
  de0.data += dx0.data.bottomRows(wc);
  (void)ct;

  Matrix dtb(w0 + w1, dtb0.cols());
  dtb << dtb0, dtb1;
  const Matrix dht = time2_.backward(params_, c.ht, dtb);
  time1_.backward(params_, c.emb, silu_backward(c.l1, dht));

  const Tensor dc4 = silu_grad(c.c4, de1);
  const Tensor dpe0 = conv_c4_.backward(params_, c.pe0, c.cols_c4, dc4);
  de0.data += avg_pool2_backward(dpe0, c.e0).data;
  const Tensor dc3 = silu_grad(c.c3, de0);
  const Tensor dg2 = conv_c3_.backward(params_, c.g2, c.cols_c3, dc3);
  const Tensor dc2 = silu_grad(c.c2, dg2);
  const Tensor dg1 = conv_c2_.backward(params_, c.g1, c.cols_c2, dc2);
  const Tensor dc1 = silu_grad(c.c1, dg1);
  conv_c1_.backward(params_, c.cond, c.cols_c1, dc1, false);
}

}  // namespace polar::diffusion
