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

#include "vegan/effects.hpp"

#include <algorithm>
#include <string>

#include "vegan/kernels.hpp"
#include "vegan/nn/ops.hpp"

namespace vegan {

std::string_view to_string(EffectKind kind) {
  switch (kind) {
    case EffectKind::BlackBackground: return "black_background";
    case EffectKind::ColorSelectivo: return "color_selectivo";
    case EffectKind::Defocus: return "defocus";
  }
  return "unknown";
}

EffectKind parse_effect(std::string_view name) {
  if (name == "black_background") return EffectKind::BlackBackground;
  if (name == "color_selectivo") return EffectKind::ColorSelectivo;
  if (name == "defocus" || name == "bokeh") return EffectKind::Defocus;
  fail(ErrorCode::InvalidArgument, "unknown effect '" + std::string(name) + "'");
}

AlphaMap::AlphaMap(int height, int width, float fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) fail(ErrorCode::ShapeError, "alpha map dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

ImageTensor apply_effect(const ImageTensor& img, EffectKind kind) {
  ImageTensor out(img.height(), img.width());
  const std::size_t n = img.plane_size();
  switch (kind) {
    case EffectKind::BlackBackground:
      break;
    case EffectKind::ColorSelectivo: {
      const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
      auto o0 = out.plane(0), o1 = out.plane(1), o2 = out.plane(2);
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < n; ++i) {
        const double y = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
        o0[i] = o1[i] = o2[i] = static_cast<float>(std::clamp(y, 0.0, 1.0));
      }
      break;
    }
    case EffectKind::Defocus:
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        kernels::box_filter_reflect(img.plane(c), img.height(), img.width(), kDefocusWindow / 2, out.plane(c));
      }
      break;
  }
  return out;
}

ImageTensor compose(const ImageTensor& img, const ImageTensor& effect_img, const VerMap& ver) {
  require_same_dims(img, effect_img, "compose(image, effect)");
  require_same_dims(img, ver, "compose(image, ver)");
  ImageTensor out(img.height(), img.width());
  const std::size_t n = img.plane_size();
  const auto nu = ver.values();
  for (int c = 0; c < ImageTensor::kChannels; ++c) {
    const auto src = img.plane(c), eff = effect_img.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(nu[i]) * (static_cast<double>(src[i]) - eff[i]) + eff[i];
      dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

ImageTensor compose_alpha(const ImageTensor& img, const ImageTensor& effect_img, const AlphaMap& alpha) {
  require_same_dims(img, effect_img, "compose_alpha(image, effect)");
  require_same_dims(img, alpha, "compose_alpha(image, alpha)");
  ImageTensor out(img.height(), img.width());
  for (int c = 0; c < ImageTensor::kChannels; ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        const double a = alpha.at(y, x);
        out.at(c, y, x) = static_cast<float>(a * img.at(c, y, x) + (1.0 - a) * effect_img.at(c, y, x));
      }
  return out;
}

ImageTensor synthesize_sample(const ImageTensor& img, const BinaryMask& gt, EffectKind kind) {
  require_same_dims(img, gt, "synthesize_sample(image, mask)");
  VerMap hard(img.height(), img.width());
  const auto figure = static_cast<float>(1.0 - kHardVerEpsilon);
  for (std::size_t i = 0; i < gt.size(); ++i) hard.values()[i] = gt[i] ? figure : 0.0f;
  return compose(img, apply_effect(img, kind), hard);
}

namespace editor {

nn::Tensor to_tensor(const ImageTensor& img) {
  nn::Tensor t({ImageTensor::kChannels, img.height(), img.width()});
  std::copy(img.values().begin(), img.values().end(), t.values().begin());
  return t;
}

nn::Tensor to_tensor(const VerMap& ver) {
  nn::Tensor t({1, ver.height(), ver.width()});
  std::copy(ver.values().begin(), ver.values().end(), t.values().begin());
  return t;
}

ImageTensor to_image(const nn::Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != ImageTensor::kChannels) fail(ErrorCode::ShapeError, "expected [3,H,W] tensor");
  ImageTensor img(t.dim(1), t.dim(2));
  auto dst = img.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(std::clamp(t[i], 0.0, 1.0));
  return img;
}

VerMap to_ver(const nn::Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != 1) fail(ErrorCode::ShapeError, "expected [1,H,W] tensor");
  VerMap ver(t.dim(1), t.dim(2));
  auto dst = ver.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = VerMap::to_open_interval(t[i]);
  return ver;
}

nn::Var compose(const nn::Tensor& img, const nn::Tensor& effect, const nn::Var& ver) {
  if (img.shape() != effect.shape() || img.rank() != 3 || ver.value().rank() != 3 || ver.dim(0) != 1 ||
      ver.dim(1) != img.dim(1) || ver.dim(2) != img.dim(2)) {
    fail(ErrorCode::DimensionMismatch, "editor compose: misaligned inputs");
  }
  nn::Tensor residual(img.shape());
  for (std::size_t i = 0; i < residual.numel(); ++i) residual[i] = img[i] - effect[i];
  const nn::Var spread = nn::broadcast_channels(ver, img.dim(0));
  const nn::Var blended = nn::mul_const(spread, std::move(residual)) + nn::Var::constant(effect);
  return nn::clamp(blended, 0.0, 1.0);
}

}  // namespace editor

}  // namespace vegan
