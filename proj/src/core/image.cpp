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

#include "vegan/image.hpp"

#include <algorithm>
#include <cmath>

namespace vegan {

ImageTensor::ImageTensor(int height, int width, float fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) fail(ErrorCode::ShapeError, "image dimensions must be positive");
  data_.assign(static_cast<std::size_t>(kChannels) * height * width, fill);
}

bool ImageTensor::valid() const {
  if (height_ < 1 || width_ < 1) return false;
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v) && v >= 0.0f && v <= 1.0f; });
}

VerMap::VerMap(int height, int width, float fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) fail(ErrorCode::ShapeError, "VER dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

bool VerMap::valid() const {
  if (height_ < 1 || width_ < 1) return false;
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v) && std::fabs(v) < 1.0f; });
}

float VerMap::open_bound() { return std::nextafter(1.0f, 0.0f); }

float VerMap::to_open_interval(double v) {
  const float b = open_bound();
  return std::clamp(static_cast<float>(v), -b, b);
}

BinaryMask::BinaryMask(int height, int width, bool fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) fail(ErrorCode::ShapeError, "mask dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

}  // namespace vegan
