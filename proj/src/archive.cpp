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

#include "vegan/archive.hpp"

#include <cstring>

#include "vegan/error.hpp"
#include "vegan/image_io.hpp"

namespace vegan {

const nn::Tensor* Archive::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

const nn::Tensor& Archive::require(const std::string& name, const std::vector<int>& shape) const {
  const nn::Tensor* t = find(name);
  if (!t) fail(ErrorCode::CheckpointMismatch, "missing tensor '" + name + "'");
  if (t->shape() != shape) {
    fail(ErrorCode::CheckpointMismatch, "tensor '" + name + "' has shape " + t->shape_string());
  }
  return *t;
}

void save_archive(const Archive& archive, const std::filesystem::path& path) {
  nlohmann::json manifest = archive.manifest;
  nlohmann::json index = nlohmann::json::array();
  std::size_t total = 0;
  for (const auto& [name, t] : archive.tensors) {
    index.push_back({{"name", name}, {"shape", t.shape()}});
    total += t.numel();
  }
  manifest["tensors"] = index;
  const std::string header = manifest.dump();
  std::vector<std::uint8_t> out(12 + header.size() + 8 * total);
  std::memcpy(out.data(), "VGCK", 4);
  const std::uint64_t len = header.size();
  std::memcpy(out.data() + 4, &len, 8);
  std::memcpy(out.data() + 12, header.data(), header.size());
  std::size_t offset = 12 + header.size();
  for (const auto& [name, t] : archive.tensors) {
    std::memcpy(out.data() + offset, t.values().data(), 8 * t.numel());
    offset += 8 * t.numel();
  }
  write_file_atomic(path, out);
}

Archive load_archive(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 12) fail(ErrorCode::TruncatedFile, path.string());
  if (std::memcmp(bytes.data(), "VGCK", 4) != 0) fail(ErrorCode::BadMagic, path.string());
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 4, 8);
  if (12 + len > bytes.size()) fail(ErrorCode::TruncatedFile, path.string() + ": manifest");
  Archive archive;
  try {
    archive.manifest = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::CheckpointMismatch, path.string() + ": unreadable manifest: " + e.what());
  }
  std::size_t offset = 12 + len;
  for (const auto& entry : archive.manifest.at("tensors")) {
    auto shape = entry.at("shape").get<std::vector<int>>();
    nn::Tensor t(shape);
    if (offset + 8 * t.numel() > bytes.size()) fail(ErrorCode::TruncatedFile, path.string() + ": tensor data");
    std::memcpy(t.values().data(), bytes.data() + offset, 8 * t.numel());
    offset += 8 * t.numel();
    archive.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
  }
  if (offset != bytes.size()) fail(ErrorCode::TruncatedFile, path.string() + ": trailing bytes");
  archive.manifest.erase("tensors");
  return archive;
}

}  // namespace vegan
