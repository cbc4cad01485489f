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

// Minimal dense building blocks with hand-written backward passes.
//
// Feature maps are stored as a (channels x batch*height*width) matrix; column
// (b * height + y) * width + x holds the channel vector of one pixel.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace polar::diffusion {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Tensor {
  int batch = 0;
  int height = 0;
  int width = 0;
  Matrix data;

  Tensor() = default;
  Tensor(int channels, int batch, int height, int width)
      : batch(batch), height(height), width(width), data(Matrix::Zero(channels, static_cast<Eigen::Index>(batch) * height * width)) {}

  int channels() const { return static_cast<int>(data.rows()); }
  int plane() const { return height * width; }
  Eigen::Index column(int b, int y, int x) const { return (static_cast<Eigen::Index>(b) * height + y) * width + x; }
  bool same_layout(const Tensor& o) const { return batch == o.batch && height == o.height && width == o.width; }
};

/// Flat storage for every trainable parameter plus its gradient. Blocks are
/// registered first, then `allocate` sizes the buffers.
class ParameterSet {
 public:
  struct Block {
    std::string name;
    std::size_t offset;
    Eigen::Index rows;
    Eigen::Index cols;
  };

  int add(std::string name, Eigen::Index rows, Eigen::Index cols);
  void allocate();

  Eigen::Map<Matrix> value(int block);
  Eigen::Map<const Matrix> value(int block) const;
  Eigen::Map<Matrix> grad(int block);

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }
  Vector& grads() { return grads_; }
  const Vector& grads() const { return grads_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return total_; }
  void zero_grad() { grads_.setZero(); }

 private:
  std::vector<Block> blocks_;
  std::size_t total_ = 0;
  Vector values_;
  Vector grads_;
};

/// 3x3 convolution, stride 1, zero padding. Weights are (out x 9*in) with
/// column tap*in + c, tap = ky*3 + kx.
class Conv3x3 {
 public:
  Conv3x3() = default;
  Conv3x3(ParameterSet& params, const std::string& name, int in, int out);

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }

  /// `cols` receives the im2col matrix needed by backward.
  Tensor forward(const ParameterSet& params, const Tensor& x, Matrix& cols) const;
  /// Accumulates weight/bias gradients; returns dL/dx unless `need_input_grad`
  /// is false (then an empty tensor).
  Tensor backward(ParameterSet& params, const Tensor& x_layout, const Matrix& cols, const Tensor& dy,
                  bool need_input_grad = true) const;

  int weight_block() const { return weight_; }
  int bias_block() const { return bias_; }

 private:
  int in_ = 0;
  int out_ = 0;
  int weight_ = -1;
  int bias_ = -1;
};

/// y = W x + b over column vectors.
class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet& params, const std::string& name, int in, int out);

  Matrix forward(const ParameterSet& params, const Matrix& x) const;
  Matrix backward(ParameterSet& params, const Matrix& x, const Matrix& dy) const;

  int weight_block() const { return weight_; }
  int bias_block() const { return bias_; }
  int in_features() const { return in_; }
  int out_features() const { return out_; }

 private:
  int in_ = 0;
  int out_ = 0;
  int weight_ = -1;
  int bias_ = -1;
};

Matrix silu(const Matrix& x);
/// dL/dx given pre-activation x and dL/dy.
Matrix silu_backward(const Matrix& x, const Matrix& dy);

Tensor avg_pool2(const Tensor& x);
Tensor avg_pool2_backward(const Tensor& dy, const Tensor& x_layout);
Tensor upsample2(const Tensor& x);
Tensor upsample2_backward(const Tensor& dy);

/// Stacks channels of same-layout tensors.
Tensor concat(std::initializer_list<const Tensor*> parts);
/// Rows [begin, begin + count) of a tensor.
Tensor slice_channels(const Tensor& x, int begin, int count);

/// Adds bias.col(b) to every pixel of sample b.
void add_per_sample(Tensor& x, const Matrix& bias);
/// Sum over pixels of each sample: (channels x batch).
Matrix sum_per_sample(const Tensor& dy);

}  // namespace polar::diffusion
