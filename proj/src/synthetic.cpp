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

#include "vegan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vegan/binarize.hpp"
#include "vegan/image_io.hpp"

namespace vegan {

SyntheticImage synthetic_disk(Rng& rng, int size) {
  if (size < 8) fail(ErrorCode::InvalidArgument, "synthetic images need size >= 8");
  SyntheticImage out{ImageTensor(size, size), BinaryMask(size, size)};
  std::array<double, 3> base, fg;
  for (auto& c : base) c = rng.uniform(0.02, 0.22);
  for (auto& c : fg) c = rng.uniform(0.1, 0.6);
  fg[rng.index(3)] = rng.uniform(0.85, 1.0);
  const double radius = rng.uniform(size / 8.0, size / 3.2);
  const double cy = rng.uniform(radius, size - radius), cx = rng.uniform(radius, size - radius);
  // Texture: two random stripe waves plus per-pixel noise.
  const double f1 = rng.uniform(0.1, 0.5), f2 = rng.uniform(0.1, 0.5), p1 = rng.uniform(0.0, 6.3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool inside = std::hypot(y + 0.5 - cy, x + 0.5 - cx) <= radius;
      out.mask.set(y, x, inside);
      const double tex = 0.05 * std::sin(f1 * x + f2 * y + p1);
      for (int c = 0; c < 3; ++c) {
        const double noise = rng.uniform(-0.04, 0.04);
        const double v = inside ? fg[c] + 0.5 * noise : base[c] + tex + noise;
        out.image.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

SyntheticImage synthetic_two_region(Rng& rng, int size) {
  if (size < 8) fail(ErrorCode::InvalidArgument, "synthetic images need size >= 8");
  std::array<double, 3> base{}, fg{};
  for (;;) {
    for (auto& c : base) c = rng.uniform(0.05, 0.95);
    for (auto& c : fg) c = rng.uniform(0.05, 0.95);
    const auto a = srgb_to_lab(base[0], base[1], base[2]);
    const auto b = srgb_to_lab(fg[0], fg[1], fg[2]);
    if (std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]) >= 80.0) break;
  }
  const double radius = rng.uniform(size / 6.0, size / 3.0);
  const double cy = rng.uniform(radius, size - radius), cx = rng.uniform(radius, size - radius);
  SyntheticImage out{ImageTensor(size, size), BinaryMask(size, size)};
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool inside = std::hypot(y + 0.5 - cy, x + 0.5 - cx) <= radius;
      out.mask.set(y, x, inside);
      for (int c = 0; c < 3; ++c) {
        const double v = (inside ? fg[c] : base[c]) + rng.uniform(-0.01, 0.01);
        out.image.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

void write_synthetic_corpus(const std::filesystem::path& dir, int count, int size, Seed seed) {
  if (count < 1) fail(ErrorCode::InvalidArgument, "count must be positive");
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "masks");
  Rng rng = Rng::derive(seed, "synthetic-corpus");
  for (int i = 0; i < count; ++i) {
    const SyntheticImage s = synthetic_disk(rng, size);
    char name[32];
    std::snprintf(name, sizeof name, "%05d.png", i);
    save_image(s.image, dir / "images" / name);
    save_mask(s.mask, dir / "masks" / name);
  }
}

}  // namespace vegan
