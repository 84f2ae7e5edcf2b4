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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace vegan {

struct Seed {
  std::uint64_t value = 0;
  bool operator==(const Seed&) const = default;
};

/// Sets the process-wide root seed. Call once before any worker starts.
void set_global_seed(Seed seed);
Seed global_seed();

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic generator with portable draws: the conversions below do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream named `stream` under `seed`.
  static Rng derive(Seed seed, std::string_view stream);
  /// Same, rooted at the global seed.
  static Rng stream(std::string_view name) { return derive(global_seed(), name); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0,1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal(double mean = 0.0, double stddev = 1.0);
  bool coin() { return (engine_() >> 63) != 0; }

  std::string serialize() const;
  void deserialize(const std::string& state);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vegan
