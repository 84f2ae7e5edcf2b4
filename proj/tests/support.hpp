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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>

#include <doctest.h>

#include "vegan/error.hpp"
#include "vegan/image_io.hpp"
#include "vegan/image.hpp"
#include "vegan/rng.hpp"

namespace vegan::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vegan_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ImageTensor random_image(Rng& rng, int h, int w, double lo = 0.0, double hi = 1.0) {
  ImageTensor img(h, w);
  for (auto& v : img.values()) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

inline VerMap random_ver(Rng& rng, int h, int w, double lo = -0.99, double hi = 0.99) {
  VerMap ver(h, w);
  for (auto& v : ver.values()) v = static_cast<float>(rng.uniform(lo, hi));
  return ver;
}

/// An image quantized to 8-bit levels, so PNG round trips are exact.
inline ImageTensor random_8bit_image(Rng& rng, int h, int w) {
  ImageTensor img(h, w);
  for (auto& v : img.values()) v = static_cast<float>(static_cast<double>(rng.index(256)) / 255.0);
  return img;
}

/// Code of the vegan::Error thrown by `f`; fails the test if none is thrown.
inline ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a vegan::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace vegan::testing
