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
#include <cmath>
#include <cstdlib>
#include <tuple>
#include <vector>

#include "vegan/error.hpp"
#include "vegan/kernels.hpp"

namespace vegan::kernels {

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

void box_filter_reflect(std::span<const float> src, int height, int width, int radius, std::span<float> dst) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (src.size() != n || dst.size() != n) fail(ErrorCode::ShapeError, "box filter buffer size");
  std::vector<double> tmp(n);
  const double norm = 1.0 / ((2 * radius + 1) * (2 * radius + 1));
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const float* row = src.data() + static_cast<std::size_t>(y) * width;
    double* out = tmp.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += row[reflect_index(x + d, width)];
      out[x] = acc;
    }
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    float* out = dst.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += tmp[static_cast<std::size_t>(reflect_index(y + d, height)) * width + x];
      out[x] = static_cast<float>(acc * norm);
    }
  }
}

namespace {

struct Tap {
  int i0;
  int i1;
  double frac;
};

Tap source_tap(int out_index, int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  double s = (out_index + 0.5) * scale - 0.5;
  s = std::max(s, 0.0);
  int i0 = std::min(static_cast<int>(std::floor(s)), in_size - 1);
  const int i1 = std::min(i0 + 1, in_size - 1);
  return {i0, i1, s - i0};
}

}  // namespace

void resize_bilinear(std::span<const float> src, int height, int width, std::span<float> dst, int out_height,
                     int out_width) {
  if (src.size() != static_cast<std::size_t>(height) * width ||
      dst.size() != static_cast<std::size_t>(out_height) * out_width) {
    fail(ErrorCode::ShapeError, "resize buffer size");
  }
  std::vector<Tap> xt(out_width);
  for (int x = 0; x < out_width; ++x) xt[x] = source_tap(x, width, out_width);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_height; ++y) {
    const Tap ty = source_tap(y, height, out_height);
    const float* r0 = src.data() + static_cast<std::size_t>(ty.i0) * width;
    const float* r1 = src.data() + static_cast<std::size_t>(ty.i1) * width;
    float* out = dst.data() + static_cast<std::size_t>(y) * out_width;
    for (int x = 0; x < out_width; ++x) {
      const Tap& tx = xt[x];
      const double top = (1.0 - tx.frac) * r0[tx.i0] + tx.frac * r0[tx.i1];
      const double bot = (1.0 - tx.frac) * r1[tx.i0] + tx.frac * r1[tx.i1];
      out[x] = static_cast<float>((1.0 - ty.frac) * top + ty.frac * bot);
    }
  }
}

void upsample2x(std::span<const double> src, int channels, int height, int width, std::span<double> dst) {
  const int oh = 2 * height, ow = 2 * width;
  if (src.size() != static_cast<std::size_t>(channels) * height * width ||
      dst.size() != static_cast<std::size_t>(channels) * oh * ow) {
    fail(ErrorCode::ShapeError, "upsample buffer size");
  }
  std::vector<Tap> xt(ow), yt(oh);
  for (int x = 0; x < ow; ++x) xt[x] = source_tap(x, width, ow);
  for (int y = 0; y < oh; ++y) yt[y] = source_tap(y, height, oh);
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < oh; ++y) {
      const double* plane = src.data() + static_cast<std::size_t>(c) * height * width;
      const Tap& ty = yt[y];
      const double* r0 = plane + static_cast<std::size_t>(ty.i0) * width;
      const double* r1 = plane + static_cast<std::size_t>(ty.i1) * width;
      double* out = dst.data() + (static_cast<std::size_t>(c) * oh + y) * ow;
      for (int x = 0; x < ow; ++x) {
        const Tap& tx = xt[x];
        const double top = (1.0 - tx.frac) * r0[tx.i0] + tx.frac * r0[tx.i1];
        const double bot = (1.0 - tx.frac) * r1[tx.i0] + tx.frac * r1[tx.i1];
        out[x] = (1.0 - ty.frac) * top + ty.frac * bot;
      }
    }
  }
}

void upsample2x_adjoint(std::span<const double> dy, int channels, int height, int width, std::span<double> dx) {
  const int oh = 2 * height, ow = 2 * width;
  if (dx.size() != static_cast<std::size_t>(channels) * height * width ||
      dy.size() != static_cast<std::size_t>(channels) * oh * ow) {
    fail(ErrorCode::ShapeError, "upsample adjoint buffer size");
  }
  std::fill(dx.begin(), dx.end(), 0.0);
  std::vector<Tap> xt(ow), yt(oh);
  for (int x = 0; x < ow; ++x) xt[x] = source_tap(x, width, ow);
  for (int y = 0; y < oh; ++y) yt[y] = source_tap(y, height, oh);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    double* plane = dx.data() + static_cast<std::size_t>(c) * height * width;
    for (int y = 0; y < oh; ++y) {
      const Tap& ty = yt[y];
      double* r0 = plane + static_cast<std::size_t>(ty.i0) * width;
      double* r1 = plane + static_cast<std::size_t>(ty.i1) * width;
      const double* g = dy.data() + (static_cast<std::size_t>(c) * oh + y) * ow;
      for (int x = 0; x < ow; ++x) {
        const Tap& tx = xt[x];
        const double a = (1.0 - ty.frac) * g[x];
        const double b = ty.frac * g[x];
        r0[tx.i0] += (1.0 - tx.frac) * a;
        r0[tx.i1] += tx.frac * a;
        r1[tx.i0] += (1.0 - tx.frac) * b;
        r1[tx.i1] += tx.frac * b;
      }
    }
  }
}

void reflect_pad(std::span<const double> src, int channels, int height, int width, int pad, std::span<double> dst) {
  const int ph = height + 2 * pad, pw = width + 2 * pad;
  if (src.size() != static_cast<std::size_t>(channels) * height * width ||
      dst.size() != static_cast<std::size_t>(channels) * ph * pw) {
    fail(ErrorCode::ShapeError, "reflect pad buffer size");
  }
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < ph; ++y) {
      const double* row = src.data() + (static_cast<std::size_t>(c) * height + reflect_index(y - pad, height)) * width;
      double* out = dst.data() + (static_cast<std::size_t>(c) * ph + y) * pw;
      for (int x = 0; x < pw; ++x) out[x] = row[reflect_index(x - pad, width)];
    }
  }
}

void reflect_fold(std::span<const double> src, int channels, int height, int width, int pad, std::span<double> dst) {
  const int ph = height + 2 * pad, pw = width + 2 * pad;
  if (dst.size() != static_cast<std::size_t>(channels) * height * width ||
      src.size() != static_cast<std::size_t>(channels) * ph * pw) {
    fail(ErrorCode::ShapeError, "reflect fold buffer size");
  }
  std::fill(dst.begin(), dst.end(), 0.0);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < ph; ++y) {
      double* row = dst.data() + (static_cast<std::size_t>(c) * height + reflect_index(y - pad, height)) * width;
      const double* in = src.data() + (static_cast<std::size_t>(c) * ph + y) * pw;
      for (int x = 0; x < pw; ++x) row[reflect_index(x - pad, width)] += in[x];
    }
  }
}

namespace reference {

void box_filter_reflect(std::span<const float> src, int height, int width, int radius, std::span<float> dst) {
  const double norm = 1.0 / ((2 * radius + 1) * (2 * radius + 1));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
          acc += src[static_cast<std::size_t>(reflect_index(y + dy, height)) * width + reflect_index(x + dx, width)];
      dst[static_cast<std::size_t>(y) * width + x] = static_cast<float>(acc * norm);
    }
}

void upsample2x(std::span<const double> src, int channels, int height, int width, std::span<double> dst) {
  const int oh = 2 * height, ow = 2 * width;
  auto coord = [](int o, int n) {
    const double s = std::max((o + 0.5) / 2.0 - 0.5, 0.0);
    const int i0 = std::min(static_cast<int>(s), n - 1);
    return std::tuple{i0, std::min(i0 + 1, n - 1), s - i0};
  };
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        const auto [y0, y1, fy] = coord(y, height);
        const auto [x0, x1, fx] = coord(x, width);
        auto at = [&](int yy, int xx) { return src[(static_cast<std::size_t>(c) * height + yy) * width + xx]; };
        dst[(static_cast<std::size_t>(c) * oh + y) * ow + x] =
            (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x1)) + fy * ((1 - fx) * at(y1, x0) + fx * at(y1, x1));
      }
}

}  // namespace reference

}  // namespace vegan::kernels
