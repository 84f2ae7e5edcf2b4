// Copyright 2026 The VEGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "vegan/nn/autograd.hpp"

namespace vegan::nn {

// Elementwise
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
/// a ⊙ m with m held constant.
Var mul_const(const Var& a, Tensor m);
Var square(const Var& a);
Var sqrt(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope);
/// Clamp with zero subgradient on and outside the bounds.
Var clamp(const Var& a, double lo, double hi);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }

// Reductions
Var sum(const Var& a);
Var mean(const Var& a);
Var expand_scalar(const Var& s, const std::vector<int>& shape);

// Convolution family. x:[C,H,W], w:[OC,C,K,K].
Var conv2d(const Var& x, const Var& w, int stride, int pad);
/// Adjoint of conv2d w.r.t. its input; also serves as transposed convolution.
Var conv2d_input_grad(const Var& dy, const Var& w, int in_height, int in_width, int stride, int pad);
Var conv2d_weight_grad(const Var& x, const Var& dy, int kernel, int stride, int pad);
/// Transposed convolution with w:[C_in,C_out,K,K] and PyTorch-style output padding.
Var conv_transpose2d(const Var& x, const Var& w, int stride, int pad, int output_pad);

Var add_bias(const Var& x, const Var& b);
Var channel_sum(const Var& x);
Var channel_expand(const Var& b, int height, int width);

// Spatial
Var reflect_pad(const Var& x, int pad);
Var reflect_fold(const Var& x, int pad);
Var upsample2x(const Var& x);
Var upsample2x_adjoint(const Var& x);

// Channel bookkeeping
Var concat_channels(const std::vector<Var>& parts);
Var slice_channels(const Var& x, int begin, int end);
/// [1,H,W] -> [C,H,W] and its adjoint [C,H,W] -> [1,H,W].
Var broadcast_channels(const Var& x, int channels);
Var reduce_channels(const Var& x);

/// Per-channel normalization over H×W (no affine). First-order only.
Var instance_norm(const Var& x, double eps = 1e-5);

}  // namespace vegan::nn
