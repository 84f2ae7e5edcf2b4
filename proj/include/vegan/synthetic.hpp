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

#include <filesystem>
#include <utility>
#include <vector>

#include "vegan/image.hpp"
#include "vegan/rng.hpp"

namespace vegan {

struct SyntheticImage {
  ImageTensor image;
  BinaryMask mask;
};

/// One bright coloured disk of random radius and position on a dark,
/// textured background. The mask marks the disk.
SyntheticImage synthetic_disk(Rng& rng, int size);

/// Flat figure disk on a flat background with faint noise; the two colours
/// are at least 80 Lab units apart.
SyntheticImage synthetic_two_region(Rng& rng, int size);

/// `count` synthetic pairs under dir/images and dir/masks (PNG, ids
/// 00000..), the layout find_pairs reads.
void write_synthetic_corpus(const std::filesystem::path& dir, int count, int size, Seed seed);

}  // namespace vegan
