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

#include "polar/diffusion/layers.hpp"

#include <algorithm>
#include <cmath>

#include "polar/error.hpp"

namespace polar::diffusion {

int ParameterSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (values_.size() != 0) throw PreconditionError("ParameterSet: cannot add blocks after allocate");
  blocks_.push_back({std::move(name), total_, rows, cols});
  total_ += static_cast<std::size_t>(rows * cols);
  return static_cast<int>(blocks_.size()) - 1;
}

void ParameterSet::allocate() {
  values_ = Vector::Zero(static_cast<Eigen::Index>(total_));
  grads_ = Vector::Zero(static_cast<Eigen::Index>(total_));
}

Eigen::Map<Matrix> ParameterSet::value(int block) {
  const auto& b = blocks_[block];
  return {values_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<const Matrix> ParameterSet::value(int block) const {
  const auto& b = blocks_[block];
  return {values_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<Matrix> ParameterSet::grad(int block) {
  const auto& b = blocks_[block];
  return {grads_.data() + b.offset, b.rows, b.cols};
}

Conv3x3::Conv3x3(ParameterSet& params, const std::string& name, int in, int out)
    : in_(in), out_(out), weight_(params.add(name + ".weight", out, 9 * in)), bias_(params.add(name + ".bias", out, 1)) {}

Tensor Conv3x3::forward(const ParameterSet& params, const Tensor& x, Matrix& cols) const {
  if (x.channels() != in_) throw StructuralError("Conv3x3: input channel mismatch");
  const int h = x.height, w = x.width;
  cols.resize(9 * in_, x.data.cols());
  const double* src = x.data.data();
  double* dst = cols.data();
  for (int b = 0; b < x.batch; ++b)
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) {
        double* out = dst + x.column(b, y, xx) * 9 * in_;
        for (int ky = 0; ky < 3; ++ky) {
          const int sy = y + ky - 1;
          for (int kx = 0; kx < 3; ++kx, out += in_) {
            const int sx = xx + kx - 1;
            if (sy < 0 || sy >= h || sx < 0 || sx >= w)
              std::fill_n(out, in_, 0.0);
            else
              std::copy_n(src + x.column(b, sy, sx) * in_, in_, out);
          }
        }
      }
  Tensor y;
  y.batch = x.batch;
  y.height = h;
  y.width = w;
  y.data.noalias() = params.value(weight_) * cols;
  y.data.colwise() += params.value(bias_).col(0);
  return y;
}

Tensor Conv3x3::backward(ParameterSet& params, const Tensor& x_layout, const Matrix& cols, const Tensor& dy,
                         bool need_input_grad) const {
  params.grad(weight_).noalias() += dy.data * cols.transpose();
  params.grad(bias_).col(0) += dy.data.rowwise().sum();
  if (!need_input_grad) return {};
  // dx = sum over taps of the shifted W_tap^T dy, one tap at a time.
  Tensor dx(in_, x_layout.batch, x_layout.height, x_layout.width);
  const int h = dx.height, w = dx.width;
  const auto weight = params.value(weight_);
  Matrix part;
  for (int ky = 0; ky < 3; ++ky)
    for (int kx = 0; kx < 3; ++kx) {
      const int tap = ky * 3 + kx;
      part.noalias() = weight.middleCols(tap * in_, in_).transpose() * dy.data;
      const double* src = part.data();
      double* dst = dx.data.data();
      for (int b = 0; b < dx.batch; ++b)
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int xx = 0; xx < w; ++xx) {
            const int sx = xx + kx - 1;
            if (sx < 0 || sx >= w) continue;
            const double* s = src + dx.column(b, y, xx) * in_;
            double* d = dst + dx.column(b, sy, sx) * in_;
            for (int c = 0; c < in_; ++c) d[c] += s[c];
          }
        }
    }
  return dx;
}

Linear::Linear(ParameterSet& params, const std::string& name, int in, int out)
    : in_(in), out_(out), weight_(params.add(name + ".weight", out, in)), bias_(params.add(name + ".bias", out, 1)) {}

Matrix Linear::forward(const ParameterSet& params, const Matrix& x) const {
  if (x.rows() != in_) throw StructuralError("Linear: input size mismatch");
  Matrix y = params.value(weight_) * x;
  y.colwise() += params.value(bias_).col(0);
  return y;
}

Matrix Linear::backward(ParameterSet& params, const Matrix& x, const Matrix& dy) const {
  params.grad(weight_).noalias() += dy * x.transpose();
  params.grad(bias_).col(0) += dy.rowwise().sum();
  return params.value(weight_).transpose() * dy;
}

Matrix silu(const Matrix& x) { return (x.array() / (1.0 + (-x.array()).exp())).matrix(); }

Matrix silu_backward(const Matrix& x, const Matrix& dy) {
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-x.array()).exp());
  return (dy.array() * s * (1.0 + x.array() * (1.0 - s))).matrix();
}

Tensor avg_pool2(const Tensor& x) {
  if (x.height % 2 || x.width % 2) throw StructuralError("avg_pool2: spatial size must be even");
  Tensor y(x.channels(), x.batch, x.height / 2, x.width / 2);
  for (int b = 0; b < x.batch; ++b)
    for (int yy = 0; yy < y.height; ++yy)
      for (int xx = 0; xx < y.width; ++xx)
        y.data.col(y.column(b, yy, xx)) =
            0.25 * (x.data.col(x.column(b, 2 * yy, 2 * xx)) + x.data.col(x.column(b, 2 * yy, 2 * xx + 1)) +
                    x.data.col(x.column(b, 2 * yy + 1, 2 * xx)) + x.data.col(x.column(b, 2 * yy + 1, 2 * xx + 1)));
  return y;
}

Tensor avg_pool2_backward(const Tensor& dy, const Tensor& x_layout) {
  Tensor dx(dy.channels(), x_layout.batch, x_layout.height, x_layout.width);
  for (int b = 0; b < dx.batch; ++b)
    for (int y = 0; y < dx.height; ++y)
      for (int x = 0; x < dx.width; ++x)
        dx.data.col(dx.column(b, y, x)) = 0.25 * dy.data.col(dy.column(b, y / 2, x / 2));
  return dx;
}

Tensor upsample2(const Tensor& x) {
  Tensor y(x.channels(), x.batch, x.height * 2, x.width * 2);
  for (int b = 0; b < y.batch; ++b)
    for (int yy = 0; yy < y.height; ++yy)
      for (int xx = 0; xx < y.width; ++xx) y.data.col(y.column(b, yy, xx)) = x.data.col(x.column(b, yy / 2, xx / 2));
  return y;
}

Tensor upsample2_backward(const Tensor& dy) {
  Tensor dx(dy.channels(), dy.batch, dy.height / 2, dy.width / 2);
  for (int b = 0; b < dy.batch; ++b)
    for (int y = 0; y < dy.height; ++y)
      for (int x = 0; x < dy.width; ++x) dx.data.col(dx.column(b, y / 2, x / 2)) += dy.data.col(dy.column(b, y, x));
  return dx;
}

Tensor concat(std::initializer_list<const Tensor*> parts) {
  const Tensor& first = **parts.begin();
  int channels = 0;
  for (const Tensor* p : parts) {
    if (!p->same_layout(first)) throw StructuralError("concat: layout mismatch");
    channels += p->channels();
  }
  Tensor out(channels, first.batch, first.height, first.width);
  int row = 0;
  for (const Tensor* p : parts) {
    out.data.middleRows(row, p->channels()) = p->data;
    row += p->channels();
  }
  return out;
}

Tensor slice_channels(const Tensor& x, int begin, int count) {
  Tensor out;
  out.batch = x.batch;
  out.height = x.height;
  out.width = x.width;
  out.data = x.data.middleRows(begin, count);
  return out;
}

void add_per_sample(Tensor& x, const Matrix& bias) {
  const int plane = x.plane();
  for (int b = 0; b < x.batch; ++b)
    x.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane).colwise() += bias.col(b);
}

Matrix sum_per_sample(const Tensor& dy) {
  const int plane = dy.plane();
  Matrix out(dy.channels(), dy.batch);
  for (int b = 0; b < dy.batch; ++b)
    out.col(b) = dy.data.middleCols(static_cast<Eigen::Index>(b) * plane, plane).rowwise().sum();
  return out;
}

}  // namespace polar::diffusion
