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

#include <cstddef>
#include <span>

namespace vegan::kernels {

/// Shape bookkeeping for a single-image 2-D convolution with zero padding.
/// The transposed convolution reuses the same geometry with the roles of
/// input and output swapped.
struct ConvGeometry {
  int in_channels = 0;
  int in_height = 0;
  int in_width = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
  int pad = 0;
  int out_height = 0;
  int out_width = 0;

  static ConvGeometry make(int in_channels, int in_height, int in_width, int out_channels, int kernel, int stride,
                           int pad);

  std::size_t input_size() const { return static_cast<std::size_t>(in_channels) * in_height * in_width; }
  std::size_t output_size() const { return static_cast<std::size_t>(out_channels) * out_height * out_width; }
  std::size_t weight_size() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  }
  int patch_size() const { return in_channels * kernel * kernel; }
};

// Parallel kernels (im2col + GEMM, OpenMP over channels/rows). Output buffers
// are overwritten, never accumulated into.
void conv2d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y);
void conv2d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx);
void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw);

/// Mean filter over a (2r+1)×(2r+1) window with reflect-101 borders.
void box_filter_reflect(std::span<const float> src, int height, int width, int radius, std::span<float> dst);

/// Half-pixel-centred bilinear resampling of one plane.
void resize_bilinear(std::span<const float> src, int height, int width, std::span<float> dst, int out_height,
                     int out_width);

/// ×2 bilinear upsampling of `channels` planes (half-pixel centres, edge
/// clamped) and its exact adjoint.
void upsample2x(std::span<const double> src, int channels, int height, int width, std::span<double> dst);
void upsample2x_adjoint(std::span<const double> dy, int channels, int height, int width, std::span<double> dx);

/// Reflect-101 padding of `channels` planes and its adjoint (fold).
void reflect_pad(std::span<const double> src, int channels, int height, int width, int pad, std::span<double> dst);
void reflect_fold(std::span<const double> src, int channels, int height, int width, int pad, std::span<double> dst);

/// Index into [0, n) by reflect-101 folding; valid for any offset.
int reflect_index(int i, int n);

namespace reference {

// Direct serial loops used as oracles for the parallel kernels.
void conv2d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y);
void conv2d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx);
void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw);
void box_filter_reflect(std::span<const float> src, int height, int width, int radius, std::span<float> dst);
void upsample2x(std::span<const double> src, int channels, int height, int width, std::span<double> dst);

}  // namespace reference

}  // namespace vegan::kernels
