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

#include <algorithm>
#include <vector>

#include <Eigen/Core>

#include "vegan/error.hpp"
#include "vegan/kernels.hpp"

namespace vegan::kernels {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;
using MutMap = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;

// Upper bound on im2col buffer entries; output rows are processed in blocks
// so large images never materialize the full patch matrix.
constexpr std::size_t kColumnBudget = std::size_t{1} << 21;

int rows_per_block(const ConvGeometry& g) {
  const std::size_t per_row = static_cast<std::size_t>(g.patch_size()) * g.out_width;
  return static_cast<int>(std::clamp<std::size_t>(kColumnBudget / std::max<std::size_t>(per_row, 1), 1,
                                                  static_cast<std::size_t>(g.out_height)));
}

void im2col(const ConvGeometry& g, const double* x, int row0, int rows, double* cols) {
  const int k = g.kernel;
  const int ncols = rows * g.out_width;
  const int patch = g.patch_size();
#pragma omp parallel for schedule(static)
  for (int p = 0; p < patch; ++p) {
    const int c = p / (k * k);
    const int ki = (p / k) % k;
    const int kj = p % k;
    const double* plane = x + static_cast<std::size_t>(c) * g.in_height * g.in_width;
    double* out = cols + static_cast<std::size_t>(p) * ncols;
    for (int r = 0; r < rows; ++r) {
      const int iy = (row0 + r) * g.stride - g.pad + ki;
      double* o = out + static_cast<std::size_t>(r) * g.out_width;
      if (iy < 0 || iy >= g.in_height) {
        std::fill(o, o + g.out_width, 0.0);
        continue;
      }
      const double* src = plane + static_cast<std::size_t>(iy) * g.in_width;
      for (int ox = 0; ox < g.out_width; ++ox) {
        const int ix = ox * g.stride - g.pad + kj;
        o[ox] = (ix >= 0 && ix < g.in_width) ? src[ix] : 0.0;
      }
    }
  }
}

void col2im_add(const ConvGeometry& g, const double* cols, int row0, int rows, double* dx) {
  const int k = g.kernel;
  const int ncols = rows * g.out_width;
  // Parallel over input channels: each channel's patch rows touch only that plane.
#pragma omp parallel for schedule(static)
  for (int c = 0; c < g.in_channels; ++c) {
    double* plane = dx + static_cast<std::size_t>(c) * g.in_height * g.in_width;
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const int p = (c * k + ki) * k + kj;
        const double* in = cols + static_cast<std::size_t>(p) * ncols;
        for (int r = 0; r < rows; ++r) {
          const int iy = (row0 + r) * g.stride - g.pad + ki;
          if (iy < 0 || iy >= g.in_height) continue;
          double* dst = plane + static_cast<std::size_t>(iy) * g.in_width;
          const double* s = in + static_cast<std::size_t>(r) * g.out_width;
          for (int ox = 0; ox < g.out_width; ++ox) {
            const int ix = ox * g.stride - g.pad + kj;
            if (ix >= 0 && ix < g.in_width) dst[ix] += s[ox];
          }
        }
      }
    }
  }
}

void check_sizes(const ConvGeometry& g, std::size_t x, std::size_t w, std::size_t y) {
  if (x != g.input_size() || w != g.weight_size() || y != g.output_size()) {
    fail(ErrorCode::ShapeError, "convolution buffer sizes do not match geometry");
  }
}

}  // namespace

ConvGeometry ConvGeometry::make(int in_channels, int in_height, int in_width, int out_channels, int kernel,
                                int stride, int pad) {
  ConvGeometry g{in_channels, in_height, in_width, out_channels, kernel, stride, pad, 0, 0};
  if (kernel < 1 || stride < 1 || pad < 0) fail(ErrorCode::ShapeError, "invalid convolution parameters");
  const int eh = in_height + 2 * pad - kernel;
  const int ew = in_width + 2 * pad - kernel;
  if (eh < 0 || ew < 0) fail(ErrorCode::ShapeError, "input smaller than convolution kernel");
  g.out_height = eh / stride + 1;
  g.out_width = ew / stride + 1;
  return g;
}

void conv2d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y) {
  check_sizes(g, x.size(), w.size(), y.size());
  const int block = rows_per_block(g);
  const int plane = g.out_height * g.out_width;
  std::vector<double> cols(static_cast<std::size_t>(g.patch_size()) * block * g.out_width);
  const ConstMap wm(w.data(), g.out_channels, g.patch_size(), Eigen::OuterStride<>(g.patch_size()));
  for (int r0 = 0; r0 < g.out_height; r0 += block) {
    const int rows = std::min(block, g.out_height - r0);
    const int n = rows * g.out_width;
    im2col(g, x.data(), r0, rows, cols.data());
    const ConstMap cm(cols.data(), g.patch_size(), n, Eigen::OuterStride<>(n));
    MutMap ym(y.data() + static_cast<std::size_t>(r0) * g.out_width, g.out_channels, n, Eigen::OuterStride<>(plane));
    ym.noalias() = wm * cm;
  }
  if (!bias.empty()) {
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < g.out_channels; ++oc) {
      double* yp = y.data() + static_cast<std::size_t>(oc) * plane;
      for (int i = 0; i < plane; ++i) yp[i] += bias[oc];
    }
  }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx) {
  check_sizes(g, dx.size(), w.size(), dy.size());
  std::fill(dx.begin(), dx.end(), 0.0);
  const int block = rows_per_block(g);
  const int plane = g.out_height * g.out_width;
  std::vector<double> cols(static_cast<std::size_t>(g.patch_size()) * block * g.out_width);
  const ConstMap wm(w.data(), g.out_channels, g.patch_size(), Eigen::OuterStride<>(g.patch_size()));
  for (int r0 = 0; r0 < g.out_height; r0 += block) {
    const int rows = std::min(block, g.out_height - r0);
    const int n = rows * g.out_width;
    const ConstMap gm(dy.data() + static_cast<std::size_t>(r0) * g.out_width, g.out_channels, n,
                      Eigen::OuterStride<>(plane));
    MutMap cm(cols.data(), g.patch_size(), n, Eigen::OuterStride<>(n));
    cm.noalias() = wm.transpose() * gm;
    col2im_add(g, cols.data(), r0, rows, dx.data());
  }
}

void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw) {
  check_sizes(g, x.size(), dw.size(), dy.size());
  const int block = rows_per_block(g);
  const int plane = g.out_height * g.out_width;
  std::vector<double> cols(static_cast<std::size_t>(g.patch_size()) * block * g.out_width);
  MutMap wm(dw.data(), g.out_channels, g.patch_size(), Eigen::OuterStride<>(g.patch_size()));
  wm.setZero();
  for (int r0 = 0; r0 < g.out_height; r0 += block) {
    const int rows = std::min(block, g.out_height - r0);
    const int n = rows * g.out_width;
    im2col(g, x.data(), r0, rows, cols.data());
    const ConstMap cm(cols.data(), g.patch_size(), n, Eigen::OuterStride<>(n));
    const ConstMap gm(dy.data() + static_cast<std::size_t>(r0) * g.out_width, g.out_channels, n,
                      Eigen::OuterStride<>(plane));
    wm.noalias() += gm * cm.transpose();
  }
}

namespace reference {

void conv2d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y) {
  check_sizes(g, x.size(), w.size(), y.size());
  const int k = g.kernel;
  for (int oc = 0; oc < g.out_channels; ++oc)
    for (int oy = 0; oy < g.out_height; ++oy)
      for (int ox = 0; ox < g.out_width; ++ox) {
        double acc = bias.empty() ? 0.0 : bias[oc];
        for (int c = 0; c < g.in_channels; ++c)
          for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj) {
              const int iy = oy * g.stride - g.pad + ki;
              const int ix = ox * g.stride - g.pad + kj;
              if (iy < 0 || iy >= g.in_height || ix < 0 || ix >= g.in_width) continue;
              acc += w[((static_cast<std::size_t>(oc) * g.in_channels + c) * k + ki) * k + kj] *
                     x[(static_cast<std::size_t>(c) * g.in_height + iy) * g.in_width + ix];
            }
        y[(static_cast<std::size_t>(oc) * g.out_height + oy) * g.out_width + ox] = acc;
      }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx) {
  check_sizes(g, dx.size(), w.size(), dy.size());
  std::fill(dx.begin(), dx.end(), 0.0);
  const int k = g.kernel;
  for (int oc = 0; oc < g.out_channels; ++oc)
    for (int oy = 0; oy < g.out_height; ++oy)
      for (int ox = 0; ox < g.out_width; ++ox) {
        const double gv = dy[(static_cast<std::size_t>(oc) * g.out_height + oy) * g.out_width + ox];
        for (int c = 0; c < g.in_channels; ++c)
          for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj) {
              const int iy = oy * g.stride - g.pad + ki;
              const int ix = ox * g.stride - g.pad + kj;
              if (iy < 0 || iy >= g.in_height || ix < 0 || ix >= g.in_width) continue;
              dx[(static_cast<std::size_t>(c) * g.in_height + iy) * g.in_width + ix] +=
                  gv * w[((static_cast<std::size_t>(oc) * g.in_channels + c) * k + ki) * k + kj];
            }
      }
}

void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw) {
  check_sizes(g, x.size(), dw.size(), dy.size());
  std::fill(dw.begin(), dw.end(), 0.0);
  const int k = g.kernel;
  for (int oc = 0; oc < g.out_channels; ++oc)
    for (int oy = 0; oy < g.out_height; ++oy)
      for (int ox = 0; ox < g.out_width; ++ox) {
        const double gv = dy[(static_cast<std::size_t>(oc) * g.out_height + oy) * g.out_width + ox];
        for (int c = 0; c < g.in_channels; ++c)
          for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj) {
              const int iy = oy * g.stride - g.pad + ki;
              const int ix = ox * g.stride - g.pad + kj;
              if (iy < 0 || iy >= g.in_height || ix < 0 || ix >= g.in_width) continue;
              dw[((static_cast<std::size_t>(oc) * g.in_channels + c) * k + ki) * k + kj] +=
                  gv * x[(static_cast<std::size_t>(c) * g.in_height + iy) * g.in_width + ix];
            }
      }
}

}  // namespace reference

}  // namespace vegan::kernels
