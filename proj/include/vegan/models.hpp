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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vegan/archive.hpp"
#include "vegan/image.hpp"
#include "vegan/nn/autograd.hpp"
#include "vegan/rng.hpp"

namespace vegan {

enum class Variant { V1, V2, V3, V4 };
enum class Upsampling { Transposed, Bilinear };
enum class DiscriminatorKind { Patch70, FullImage };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct GeneratorSpec {
  Variant variant = Variant::V1;
  int input_size = 224;
  int base_width = 64;
  int n_res_blocks = 9;
  bool skip_layers = false;
  Upsampling upsampling = Upsampling::Transposed;
  /// V2 only: archive holding the pretrained encoder ("backbone.*" tensors).
  std::string backbone_path;

  /// Canonical configuration of a variant (skip/upsampling fixed by it).
  static GeneratorSpec for_variant(Variant v, int input_size = 224, int base_width = 64, int n_res_blocks = 9);
  /// Spatial reduction between input and bottleneck.
  int downsampling_factor() const { return variant == Variant::V2 ? 16 : 4; }
  void validate() const;

  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& j);
  bool operator==(const GeneratorSpec&) const = default;
};

struct DiscriminatorSpec {
  DiscriminatorKind kind = DiscriminatorKind::Patch70;
  int base_width = 64;
  /// FullImage only: the dense head is sized for this resolution.
  int input_size = 224;

  static DiscriminatorSpec for_variant(Variant v, int input_size = 224, int base_width = 64);
  nlohmann::json to_json() const;
  static DiscriminatorSpec from_json(const nlohmann::json& j);
  bool operator==(const DiscriminatorSpec&) const = default;
};

/// Ordered collection of named parameters, e.g. "generator.down1.weight".
class ModelParams {
 public:
  void add(std::string name, nn::Tensor init);
  const nn::Var& get(std::string_view name) const;
  nn::Var& get(std::string_view name);

  std::size_t size() const noexcept { return vars_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<nn::Var>& vars() const noexcept { return vars_; }
  std::vector<nn::Var>& vars() noexcept { return vars_; }
  std::size_t scalar_count() const;
  bool all_finite() const;

  void write_to(Archive& archive) const;
  /// Overwrites values in place; names and shapes must match.
  void read_from(const Archive& archive);

  /// Value snapshot, for comparisons in tests and determinism checks.
  std::vector<nn::Tensor> snapshot() const;

 private:
  std::vector<std::string> names_;
  std::vector<nn::Var> vars_;
};

class Generator {
 public:
  Generator(GeneratorSpec spec, Seed seed);

  const GeneratorSpec& spec() const noexcept { return spec_; }
  ModelParams& params() noexcept { return params_; }
  const ModelParams& params() const noexcept { return params_; }

  /// [3,H,W] image -> [1,H,W] VER through a final tanh.
  nn::Var forward(const nn::Var& image) const;
  /// Inference without graph recording.
  VerMap predict(const ImageTensor& image) const;

 private:
  GeneratorSpec spec_;
  ModelParams params_;
};

class Discriminator {
 public:
  Discriminator(DiscriminatorSpec spec, Seed seed);

  const DiscriminatorSpec& spec() const noexcept { return spec_; }
  ModelParams& params() noexcept { return params_; }
  const ModelParams& params() const noexcept { return params_; }

  /// Raw critic map [1,h,w] (1×1 for FullImage); no output activation.
  nn::Var forward(const nn::Var& image) const;
  /// D(x): arithmetic mean of the critic map.
  nn::Var score(const nn::Var& image) const;
  /// Name of the last layer's weight and bias.
  std::pair<std::string, std::string> head_names() const;

 private:
  DiscriminatorSpec spec_;
  ModelParams params_;
  int n_layers_ = 0;
};

Generator build_generator(const GeneratorSpec& spec, Seed seed);
Discriminator build_discriminator(const DiscriminatorSpec& spec, Seed seed);

/// Encoder parameters ("backbone.*") expected by the V2 generator, randomly
/// initialized. Converted pretrained weights use the same names and shapes.
ModelParams make_backbone(int base_width, Seed seed);
void save_backbone(const ModelParams& backbone, int base_width, const std::filesystem::path& path);

/// Output size of the Patch70 critic for a square input.
int patch_score_size(int input_size);
/// Receptive field of one Patch70 output cell, from the layer stack.
int patch_receptive_field();

}  // namespace vegan
