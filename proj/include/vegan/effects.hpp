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

#include <string_view>

#include "vegan/image.hpp"
#include "vegan/nn/autograd.hpp"

namespace vegan {

enum class EffectKind { BlackBackground, ColorSelectivo, Defocus };

std::string_view to_string(EffectKind kind);
/// Accepts black_background, color_selectivo, defocus (alias bokeh).
EffectKind parse_effect(std::string_view name);

/// Matting weights strictly inside (0,1).
class AlphaMap {
 public:
  AlphaMap(int height, int width, float fill = 0.5f);
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  float& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  float at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

 private:
  int height_;
  int width_;
  std::vector<float> data_;
};

inline constexpr int kDefocusWindow = 11;
/// Interior margin for hard VER values used when synthesizing samples.
inline constexpr double kHardVerEpsilon = 1e-3;

/// The editor's local operation: clamp-to-zero, BT.601 luma, or 11×11 mean
/// filter with reflect borders.
ImageTensor apply_effect(const ImageTensor& img, EffectKind kind);

/// I_edit = clamp(ν ⊗ (I − I_effect) + I_effect, 0, 1).
ImageTensor compose(const ImageTensor& img, const ImageTensor& effect_img, const VerMap& ver);

/// I_edit = α ⊗ I + (1 − α) ⊗ I_effect.
ImageTensor compose_alpha(const ImageTensor& img, const ImageTensor& effect_img, const AlphaMap& alpha);

/// Effect sample from a ground-truth mask: ν = 1 − ε on figure pixels and 0
/// on ground pixels, where the composite equals I_effect exactly.
ImageTensor synthesize_sample(const ImageTensor& img, const BinaryMask& gt, EffectKind kind);

namespace editor {

nn::Tensor to_tensor(const ImageTensor& img);
nn::Tensor to_tensor(const VerMap& ver);
/// Values are clamped into [0,1].
ImageTensor to_image(const nn::Tensor& t);
/// Values are pulled strictly inside (-1,1).
VerMap to_ver(const nn::Tensor& t);

/// Differentiable compose: img and effect are [3,H,W] constants, ver is [1,H,W].
nn::Var compose(const nn::Tensor& img, const nn::Tensor& effect, const nn::Var& ver);

}  // namespace editor

}  // namespace vegan
