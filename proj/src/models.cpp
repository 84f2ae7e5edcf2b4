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

#include "vegan/models.hpp"

#include <algorithm>

#include "vegan/effects.hpp"
#include "vegan/nn/ops.hpp"

namespace vegan {

namespace {

constexpr double kInitStd = 0.02;
constexpr double kLeakySlope = 0.2;

nn::Tensor normal_tensor(std::vector<int> shape, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.normal(0.0, kInitStd);
  return t;
}

nn::Var norm_relu(const nn::Var& x) { return nn::relu(nn::instance_norm(x)); }

nn::Var residual_block(const ModelParams& p, const std::string& prefix, const nn::Var& x) {
  nn::Var h = nn::conv2d(nn::reflect_pad(x, 1), p.get(prefix + ".conv1.weight"), 1, 0);
  h = norm_relu(h);
  h = nn::conv2d(nn::reflect_pad(h, 1), p.get(prefix + ".conv2.weight"), 1, 0);
  return x + nn::instance_norm(h);
}

void add_residual(ModelParams& p, const std::string& prefix, int width, Rng& rng) {
  p.add(prefix + ".conv1.weight", normal_tensor({width, width, 3, 3}, rng));
  p.add(prefix + ".conv2.weight", normal_tensor({width, width, 3, 3}, rng));
}

// Encoder of the V2 generator: stride-16 residual network.
void add_backbone(ModelParams& p, int w, Rng& rng) {
  p.add("backbone.stem.weight", normal_tensor({w, 3, 7, 7}, rng));
  int in = w;
  for (int s = 1; s <= 3; ++s) {
    const int out = w << s;
    const std::string stage = "backbone.stage" + std::to_string(s);
    p.add(stage + ".weight", normal_tensor({out, in, 3, 3}, rng));
    add_residual(p, stage + ".res", out, rng);
    in = out;
  }
}

nn::Var backbone_forward(const ModelParams& p, const nn::Var& x) {
  nn::Var h = norm_relu(nn::conv2d(x, p.get("backbone.stem.weight"), 2, 3));
  for (int s = 1; s <= 3; ++s) {
    const std::string stage = "backbone.stage" + std::to_string(s);
    h = norm_relu(nn::conv2d(h, p.get(stage + ".weight"), 2, 1));
    h = residual_block(p, stage + ".res", h);
  }
  return h;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::V1: return "V1";
    case Variant::V2: return "V2";
    case Variant::V3: return "V3";
    case Variant::V4: return "V4";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "V1" || s == "v1" || s == "1") return Variant::V1;
  if (s == "V2" || s == "v2" || s == "2") return Variant::V2;
  if (s == "V3" || s == "v3" || s == "3") return Variant::V3;
  if (s == "V4" || s == "v4" || s == "4") return Variant::V4;
  fail(ErrorCode::InvalidArgument, "unknown variant '" + std::string(s) + "' (expected V1..V4)");
}

GeneratorSpec GeneratorSpec::for_variant(Variant v, int input_size, int base_width, int n_res_blocks) {
  GeneratorSpec s;
  s.variant = v;
  s.input_size = input_size;
  s.base_width = base_width;
  s.n_res_blocks = n_res_blocks;
  s.skip_layers = v == Variant::V3 || v == Variant::V4;
  s.upsampling = s.skip_layers ? Upsampling::Bilinear : Upsampling::Transposed;
  return s;
}

void GeneratorSpec::validate() const {
  if (base_width < 1 || n_res_blocks < 0 || input_size < 1) fail(ErrorCode::InvalidArgument, "generator sizes");
  if (input_size % downsampling_factor() != 0) {
    fail(ErrorCode::ShapeError, "input size must be a multiple of " + std::to_string(downsampling_factor()));
  }
  const bool v34 = variant == Variant::V3 || variant == Variant::V4;
  if (v34 != skip_layers || v34 != (upsampling == Upsampling::Bilinear)) {
    fail(ErrorCode::InvalidArgument, "skip/upsampling settings inconsistent with variant " +
                                         std::string(to_string(variant)));
  }
}

nlohmann::json GeneratorSpec::to_json() const {
  return {{"variant", to_string(variant)},
          {"input_size", input_size},
          {"base_width", base_width},
          {"n_res_blocks", n_res_blocks},
          {"skip_layers", skip_layers},
          {"upsampling", upsampling == Upsampling::Bilinear ? "bilinear" : "transposed"},
          {"backbone_path", backbone_path}};
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  GeneratorSpec s = for_variant(parse_variant(j.at("variant").get<std::string>()), j.at("input_size").get<int>(),
                                j.at("base_width").get<int>(), j.at("n_res_blocks").get<int>());
  s.skip_layers = j.at("skip_layers").get<bool>();
  s.upsampling = j.at("upsampling").get<std::string>() == "bilinear" ? Upsampling::Bilinear : Upsampling::Transposed;
  s.backbone_path = j.value("backbone_path", "");
  return s;
}

DiscriminatorSpec DiscriminatorSpec::for_variant(Variant v, int input_size, int base_width) {
  return {v == Variant::V4 ? DiscriminatorKind::FullImage : DiscriminatorKind::Patch70, base_width, input_size};
}

nlohmann::json DiscriminatorSpec::to_json() const {
  return {{"kind", kind == DiscriminatorKind::FullImage ? "full_image" : "patch70"},
          {"base_width", base_width},
          {"input_size", input_size}};
}

DiscriminatorSpec DiscriminatorSpec::from_json(const nlohmann::json& j) {
  return {j.at("kind").get<std::string>() == "full_image" ? DiscriminatorKind::FullImage : DiscriminatorKind::Patch70,
          j.at("base_width").get<int>(), j.at("input_size").get<int>()};
}

void ModelParams::add(std::string name, nn::Tensor init) {
  if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
    fail(ErrorCode::InvalidArgument, "duplicate parameter " + name);
  }
  names_.push_back(std::move(name));
  vars_.push_back(nn::Var::leaf(std::move(init)));
}

const nn::Var& ModelParams::get(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) fail(ErrorCode::InvalidArgument, "no parameter named " + std::string(name));
  return vars_[static_cast<std::size_t>(it - names_.begin())];
}

nn::Var& ModelParams::get(std::string_view name) {
  return const_cast<nn::Var&>(static_cast<const ModelParams&>(*this).get(name));
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : vars_) n += v.numel();
  return n;
}

bool ModelParams::all_finite() const {
  return std::all_of(vars_.begin(), vars_.end(), [](const nn::Var& v) { return v.value().all_finite(); });
}

void ModelParams::write_to(Archive& archive) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) archive.add(names_[i], vars_[i].value());
}

void ModelParams::read_from(const Archive& archive) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    vars_[i].mutable_value() = archive.require(names_[i], vars_[i].shape());
  }
}

std::vector<nn::Tensor> ModelParams::snapshot() const {
  std::vector<nn::Tensor> out;
  out.reserve(vars_.size());
  for (const auto& v : vars_) out.push_back(v.value());
  return out;
}

Generator::Generator(GeneratorSpec spec, Seed seed) : spec_(std::move(spec)) {
  spec_.validate();
  Rng rng = Rng::derive(seed, "generator");
  const int w = spec_.base_width;
  if (spec_.variant == Variant::V2) {
    if (spec_.backbone_path.empty()) {
      fail(ErrorCode::UnsupportedVariant, "V2 needs a pretrained backbone archive (backbone_path)");
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(spec_.backbone_path, ec)) {
      fail(ErrorCode::UnsupportedVariant, "V2 backbone unavailable: " + spec_.backbone_path);
    }
    add_backbone(params_, w, rng);
    const Archive backbone = load_archive(spec_.backbone_path);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      params_.vars()[i].mutable_value() = backbone.require(params_.names()[i], params_.vars()[i].shape());
    }
    // Decoder: four transposed-convolution stages back to full resolution.
    int in = 8 * w;
    for (int u = 1; u <= 4; ++u) {
      const int out = std::max(w, in / 2);
      params_.add("generator.up" + std::to_string(u) + ".weight", normal_tensor({in, out, 3, 3}, rng));
      in = out;
    }
  } else {
    params_.add("generator.stem.weight", normal_tensor({w, 3, 7, 7}, rng));
    params_.add("generator.down1.weight", normal_tensor({2 * w, w, 3, 3}, rng));
    params_.add("generator.down2.weight", normal_tensor({4 * w, 2 * w, 3, 3}, rng));
    for (int i = 0; i < spec_.n_res_blocks; ++i) add_residual(params_, "generator.res" + std::to_string(i), 4 * w, rng);
    if (spec_.skip_layers) {
      params_.add("generator.up1.weight", normal_tensor({2 * w, 4 * w + 2 * w, 3, 3}, rng));
      params_.add("generator.up2.weight", normal_tensor({w, 2 * w + w, 3, 3}, rng));
    } else {
      params_.add("generator.up1.weight", normal_tensor({4 * w, 2 * w, 3, 3}, rng));
      params_.add("generator.up2.weight", normal_tensor({2 * w, w, 3, 3}, rng));
    }
  }
  params_.add("generator.head.weight", normal_tensor({1, w, 7, 7}, rng));
  params_.add("generator.head.bias", nn::Tensor({1}));
}

nn::Var Generator::forward(const nn::Var& image) const {
  if (image.value().rank() != 3 || image.dim(0) != 3) fail(ErrorCode::ShapeError, "generator expects a [3,H,W] image");
  const int f = spec_.downsampling_factor();
  if (image.dim(1) % f || image.dim(2) % f) {
    fail(ErrorCode::ShapeError, "image dimensions must be multiples of " + std::to_string(f));
  }
  const ModelParams& p = params_;
  nn::Var h;
  if (spec_.variant == Variant::V2) {
    h = backbone_forward(p, image);
    for (int u = 1; u <= 4; ++u) {
      h = norm_relu(nn::conv_transpose2d(h, p.get("generator.up" + std::to_string(u) + ".weight"), 2, 1, 1));
    }
  } else {
    const nn::Var e0 = norm_relu(nn::conv2d(nn::reflect_pad(image, 3), p.get("generator.stem.weight"), 1, 0));
    const nn::Var e1 = norm_relu(nn::conv2d(e0, p.get("generator.down1.weight"), 2, 1));
    h = norm_relu(nn::conv2d(e1, p.get("generator.down2.weight"), 2, 1));
    for (int i = 0; i < spec_.n_res_blocks; ++i) h = residual_block(p, "generator.res" + std::to_string(i), h);
    if (spec_.skip_layers) {
      h = nn::concat_channels({nn::upsample2x(h), e1});
      h = norm_relu(nn::conv2d(h, p.get("generator.up1.weight"), 1, 1));
      h = nn::concat_channels({nn::upsample2x(h), e0});
      h = norm_relu(nn::conv2d(h, p.get("generator.up2.weight"), 1, 1));
    } else {
      h = norm_relu(nn::conv_transpose2d(h, p.get("generator.up1.weight"), 2, 1, 1));
      h = norm_relu(nn::conv_transpose2d(h, p.get("generator.up2.weight"), 2, 1, 1));
    }
  }
  h = nn::conv2d(nn::reflect_pad(h, 3), p.get("generator.head.weight"), 1, 0);
  return nn::tanh(nn::add_bias(h, p.get("generator.head.bias")));
}

VerMap Generator::predict(const ImageTensor& image) const {
  nn::NoGradGuard no_grad;
  const nn::Var out = forward(nn::Var::constant(editor::to_tensor(image)));
  return editor::to_ver(out.value());
}

Discriminator::Discriminator(DiscriminatorSpec spec, Seed seed) : spec_(spec) {
  if (spec_.base_width < 1) fail(ErrorCode::InvalidArgument, "discriminator width");
  Rng rng = Rng::derive(seed, "discriminator");
  const int w = spec_.base_width;
  const int widths[] = {w, 2 * w, 4 * w, 8 * w};
  int in = 3;
  for (int i = 0; i < 4; ++i) {
    const std::string name = "discriminator.layer" + std::to_string(i);
    params_.add(name + ".weight", normal_tensor({widths[i], in, 4, 4}, rng));
    params_.add(name + ".bias", nn::Tensor({widths[i]}));
    in = widths[i];
  }
  int head_kernel = 4;
  if (spec_.kind == DiscriminatorKind::FullImage) {
    if (spec_.input_size % 16 != 0 || spec_.input_size < 16) {
      fail(ErrorCode::ShapeError, "full-image discriminator input must be a multiple of 16");
    }
    head_kernel = spec_.input_size / 16;
  }
  params_.add("discriminator.head.weight", normal_tensor({1, in, head_kernel, head_kernel}, rng));
  params_.add("discriminator.head.bias", nn::Tensor({1}));
  n_layers_ = 4;
}

nn::Var Discriminator::forward(const nn::Var& image) const {
  if (image.value().rank() != 3 || image.dim(0) != 3) fail(ErrorCode::ShapeError, "critic expects a [3,H,W] image");
  const bool full = spec_.kind == DiscriminatorKind::FullImage;
  if (full && (image.dim(1) != spec_.input_size || image.dim(2) != spec_.input_size)) {
    fail(ErrorCode::ShapeError, "full-image critic built for " + std::to_string(spec_.input_size) + " px input");
  }
  nn::Var h = image;
  for (int i = 0; i < n_layers_; ++i) {
    const std::string name = "discriminator.layer" + std::to_string(i);
    // Patch70 keeps the last body layer at stride 1 (C64-C128-C256-C512).
    const int stride = (!full && i == 3) ? 1 : 2;
    h = nn::add_bias(nn::conv2d(h, params_.get(name + ".weight"), stride, 1), params_.get(name + ".bias"));
    h = nn::leaky_relu(h, kLeakySlope);
  }
  h = nn::conv2d(h, params_.get("discriminator.head.weight"), 1, full ? 0 : 1);
  return nn::add_bias(h, params_.get("discriminator.head.bias"));
}

nn::Var Discriminator::score(const nn::Var& image) const { return nn::mean(forward(image)); }

std::pair<std::string, std::string> Discriminator::head_names() const {
  return {"discriminator.head.weight", "discriminator.head.bias"};
}

Generator build_generator(const GeneratorSpec& spec, Seed seed) { return Generator(spec, seed); }
Discriminator build_discriminator(const DiscriminatorSpec& spec, Seed seed) { return Discriminator(spec, seed); }

ModelParams make_backbone(int base_width, Seed seed) {
  ModelParams p;
  Rng rng = Rng::derive(seed, "backbone");
  add_backbone(p, base_width, rng);
  return p;
}

void save_backbone(const ModelParams& backbone, int base_width, const std::filesystem::path& path) {
  Archive a;
  a.manifest["kind"] = "backbone";
  a.manifest["base_width"] = base_width;
  backbone.write_to(a);
  save_archive(a, path);
}

int patch_score_size(int input_size) {
  int s = input_size;
  for (int i = 0; i < 3; ++i) s = (s + 2 - 4) / 2 + 1;
  s = s + 2 - 4 + 1;
  return s + 2 - 4 + 1;
}

int patch_receptive_field() {
  // Walk back from one output cell: rf_in = (rf_out - 1) * stride + kernel.
  const int strides[] = {2, 2, 2, 1, 1};
  int rf = 1;
  for (int i = 4; i >= 0; --i) rf = (rf - 1) * strides[i] + 4;
  return rf;
}

}  // namespace vegan
