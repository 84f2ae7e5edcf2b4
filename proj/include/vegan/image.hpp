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
#include <cstdint>
#include <span>
#include <vector>

#include "vegan/error.hpp"

namespace vegan {

/// H×W×3 raster with values in [0,1], stored planar (channel-major) so a
/// channel plane is contiguous. Planar layout matches the network tensors.
class ImageTensor {
 public:
  static constexpr int kChannels = 3;

  ImageTensor() = default;
  ImageTensor(int height, int width, float fill = 0.0f);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int c, int y, int x) { return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }
  float at(int c, int y, int x) const { return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }

  std::span<float> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const float> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  /// Finite, inside [0,1], at least 1×1.
  bool valid() const;

  bool operator==(const ImageTensor&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Per-pixel visual-effect strength, strictly inside (-1,1).
class VerMap {
 public:
  VerMap() = default;
  VerMap(int height, int width, float fill = 0.0f);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  float& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  float at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  bool valid() const;

  /// Largest float strictly below 1; values are pulled inside this bound when
  /// converted from wider types so float rounding never lands on ±1.
  static float open_bound();
  static float to_open_interval(double v);

  bool operator==(const VerMap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Figure-ground mask; true marks figure.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool fill = false);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int y, int x, bool v) { data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
  bool operator[](std::size_t i) const { return data_[i] != 0; }
  void set(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }
  std::size_t count() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

template <typename A, typename B>
void require_same_dims(const A& a, const B& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width()) {
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": " + std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
             std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
}

}  // namespace vegan
