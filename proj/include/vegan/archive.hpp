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
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vegan/nn/tensor.hpp"

namespace vegan {

/// Named-tensor archive: "VGCK", u64 manifest length, JSON manifest, then the
/// tensors as little-endian float64 in manifest order.
struct Archive {
  nlohmann::json manifest = nlohmann::json::object();
  std::vector<std::pair<std::string, nn::Tensor>> tensors;

  void add(std::string name, nn::Tensor t) { tensors.emplace_back(std::move(name), std::move(t)); }
  const nn::Tensor* find(const std::string& name) const;
  /// Throws CheckpointMismatch when absent or of the wrong shape.
  const nn::Tensor& require(const std::string& name, const std::vector<int>& shape) const;
};

void save_archive(const Archive& archive, const std::filesystem::path& path);
Archive load_archive(const std::filesystem::path& path);

}  // namespace vegan
