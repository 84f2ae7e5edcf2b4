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

#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vegan/archive.hpp"
#include "vegan/effects.hpp"
#include "vegan/models.hpp"
#include "vegan/nn/ops.hpp"

using namespace vegan;
using vegan::testing::code_of;
using vegan::testing::random_image;
using vegan::testing::TempDir;

namespace {

GeneratorSpec small_spec(Variant v, int size = 64) { return GeneratorSpec::for_variant(v, size, 4, 1); }

bool same_params(const ModelParams& a, const ModelParams& b) { return a.snapshot() == b.snapshot(); }

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("variant names and canonical specs") {
    CHECK(parse_variant("V3") == Variant::V3);
    CHECK(parse_variant("v4") == Variant::V4);
    CHECK(code_of([] { parse_variant("V9"); }) == ErrorCode::InvalidArgument);
    const auto v1 = GeneratorSpec::for_variant(Variant::V1);
    CHECK_FALSE(v1.skip_layers);
    CHECK(v1.upsampling == Upsampling::Transposed);
    CHECK(v1.n_res_blocks == 9);
    CHECK(v1.input_size == 224);
    const auto v4 = GeneratorSpec::for_variant(Variant::V4);
    CHECK(v4.skip_layers);
    CHECK(v4.upsampling == Upsampling::Bilinear);
    CHECK(DiscriminatorSpec::for_variant(Variant::V3).kind == DiscriminatorKind::Patch70);
    CHECK(DiscriminatorSpec::for_variant(Variant::V4).kind == DiscriminatorKind::FullImage);
    CHECK(GeneratorSpec::from_json(v4.to_json()) == v4);
    const auto d = DiscriminatorSpec::for_variant(Variant::V4, 64, 8);
    CHECK(DiscriminatorSpec::from_json(d.to_json()) == d);
  }

  TEST_CASE("inconsistent specs are rejected") {
    auto bad = GeneratorSpec::for_variant(Variant::V1);
    bad.skip_layers = true;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { GeneratorSpec::for_variant(Variant::V1, 66).validate(); }) == ErrorCode::ShapeError);
  }

  TEST_CASE("generator output matches input size and stays inside (-1,1)") {
    Rng rng(1);
    for (Variant v : {Variant::V1, Variant::V3, Variant::V4}) {
      CAPTURE(to_string(v));
      const Generator g(small_spec(v), Seed{3});
      const VerMap out = g.predict(random_image(rng, 64, 64));
      CHECK(out.height() == 64);
      CHECK(out.width() == 64);
      CHECK(out.valid());
      // Fully convolutional: other multiples of four work too.
      const VerMap other = g.predict(random_image(rng, 32, 48));
      CHECK(other.height() == 32);
      CHECK(other.width() == 48);
    }
    const Generator big(GeneratorSpec::for_variant(Variant::V1, 224, 4, 1), Seed{3});
    const VerMap out = big.predict(random_image(rng, 224, 224));
    CHECK(out.height() == 224);
    CHECK(out.valid());
  }

  TEST_CASE("generator rejects sizes it cannot reconstruct") {
    const Generator g(small_spec(Variant::V4), Seed{3});
    CHECK(code_of([&] { g.predict(ImageTensor(62, 64)); }) == ErrorCode::ShapeError);
  }

  TEST_CASE("initialization is seed-deterministic") {
    const Generator a(small_spec(Variant::V3), Seed{9}), b(small_spec(Variant::V3), Seed{9}), c(small_spec(Variant::V3), Seed{10});
    CHECK(same_params(a.params(), b.params()));
    CHECK_FALSE(same_params(a.params(), c.params()));
    const Discriminator d1(DiscriminatorSpec::for_variant(Variant::V1, 64, 4), Seed{9});
    const Discriminator d2(DiscriminatorSpec::for_variant(Variant::V1, 64, 4), Seed{9});
    CHECK(same_params(d1.params(), d2.params()));
  }

  TEST_CASE("initial weights follow N(0, 0.02) and biases start at zero") {
    const Discriminator d(DiscriminatorSpec::for_variant(Variant::V1, 64, 16), Seed{1});
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < d.params().size(); ++i) {
      const auto& name = d.params().names()[i];
      const auto values = d.params().vars()[i].value().values();
      if (name.ends_with(".bias")) {
        for (double v : values) CHECK(v == 0.0);
        continue;
      }
      for (double v : values) {
        sum += v;
        sq += v * v;
        ++n;
      }
    }
    CHECK(std::abs(sum / n) < 1e-3);
    CHECK(std::sqrt(sq / n) == doctest::Approx(0.02).epsilon(0.02));
  }

  TEST_CASE("V2 needs a backbone archive") {
    auto spec = GeneratorSpec::for_variant(Variant::V2, 64, 4, 0);
    CHECK(code_of([&] { Generator g(spec, Seed{1}); }) == ErrorCode::UnsupportedVariant);
    spec.backbone_path = "/nonexistent/backbone.vgck";
    CHECK(code_of([&] { Generator g(spec, Seed{1}); }) == ErrorCode::UnsupportedVariant);

    TempDir dir;
    const ModelParams backbone = make_backbone(4, Seed{5});
    save_backbone(backbone, 4, dir / "bb.vgck");
    spec.backbone_path = (dir / "bb.vgck").string();
    const Generator g(spec, Seed{1});
    CHECK(g.spec().downsampling_factor() == 16);
    for (std::size_t i = 0; i < backbone.size(); ++i) {
      CHECK(g.params().get(backbone.names()[i]).value() == backbone.vars()[i].value());
    }
    Rng rng(2);
    const VerMap out = g.predict(random_image(rng, 64, 64));
    CHECK(out.height() == 64);
    CHECK(out.valid());
    CHECK(code_of([&] { g.predict(ImageTensor(48, 56)); }) == ErrorCode::ShapeError);
  }

  TEST_CASE("Patch70 critic output size and receptive field") {
    CHECK(patch_score_size(224) == 26);
    CHECK(patch_receptive_field() == 70);
    const Discriminator d(DiscriminatorSpec::for_variant(Variant::V1, 224, 2), Seed{4});
    const nn::Var x = nn::Var::constant(nn::Tensor({3, 224, 224}, 0.5));
    CHECK(d.forward(x).shape() == std::vector<int>{1, 26, 26});

    // Gradient-support oracle: the input pixels that influence one interior
    // output cell span a 70x70 window.
    const Discriminator small(DiscriminatorSpec::for_variant(Variant::V1, 128, 2), Seed{4});
    Rng rng(3);
    nn::Tensor img({3, 128, 128});
    for (auto& v : img.values()) v = rng.uniform();
    const nn::Var leaf = nn::Var::leaf(img);
    const nn::Var map = small.forward(leaf);
    const int cells = map.dim(1);
    nn::Tensor pick({1, cells, cells});
    pick[static_cast<std::size_t>(cells / 2) * cells + cells / 2] = 1.0;
    const auto g = nn::grad(nn::sum(nn::mul_const(map, pick)), {leaf})[0];
    int y0 = 128, y1 = -1, x0 = 128, x1 = -1;
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 128; ++x) {
          if (g.value()[(static_cast<std::size_t>(c) * 128 + y) * 128 + x] != 0.0) {
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
          }
        }
      }
    }
    CHECK(y1 - y0 + 1 == 70);
    CHECK(x1 - x0 + 1 == 70);
  }

  TEST_CASE("full-image critic yields a scalar at its build size only") {
    const Discriminator d(DiscriminatorSpec::for_variant(Variant::V4, 64, 4), Seed{4});
    CHECK(d.forward(nn::Var::constant(nn::Tensor({3, 64, 64}, 0.0))).numel() == 1);
    CHECK(code_of([&] { d.forward(nn::Var::constant(nn::Tensor({3, 32, 32}))); }) == ErrorCode::ShapeError);
  }

  TEST_CASE("critic scores are finite and linear in the head") {
    for (Variant v : {Variant::V1, Variant::V4}) {
      Discriminator d(DiscriminatorSpec::for_variant(v, 64, 4), Seed{6});
      const nn::Var zeros = nn::Var::constant(nn::Tensor({3, 64, 64}, 0.0));
      const nn::Var ones = nn::Var::constant(nn::Tensor({3, 64, 64}, 1.0));
      CHECK(std::isfinite(d.score(zeros).item()));
      CHECK(std::isfinite(d.score(ones).item()));
      // score is the mean of the map
      double m = 0.0;
      const auto map = d.forward(ones);
      for (double x : map.value().values()) m += x;
      CHECK(d.score(ones).item() == doctest::Approx(m / map.numel()));

      Rng rng(1);
      const nn::Var x = nn::Var::constant(editor::to_tensor(random_image(rng, 64, 64)));
      const double before = d.score(x).item();
      const auto [w, b] = d.head_names();
      for (auto& p : d.params().get(w).mutable_value().values()) p *= 2;
      for (auto& p : d.params().get(b).mutable_value().values()) p *= 2;
      CHECK(d.score(x).item() == doctest::Approx(2 * before).epsilon(1e-12));
    }
  }

  TEST_CASE("critic has no normalization parameters") {
    const Discriminator d(DiscriminatorSpec::for_variant(Variant::V1, 64, 4), Seed{1});
    for (const auto& name : d.params().names()) {
      CHECK((name.ends_with(".weight") || name.ends_with(".bias")));
      CHECK(name.find("norm") == std::string::npos);
    }
  }

  TEST_CASE("generator gradient matches finite differences") {
    Generator g(small_spec(Variant::V4, 16), Seed{2});
    Rng rng(5);
    const nn::Var x = nn::Var::constant(editor::to_tensor(random_image(rng, 16, 16)));
    nn::Var& w = g.params().get("generator.stem.weight");
    const auto grads = nn::grad(nn::mean(g.forward(x)), {w});
    const double h = 1e-5;
    for (std::size_t i : {0u, 7u, 31u, 100u}) {
      const double orig = w.mutable_value()[i];
      w.mutable_value()[i] = orig + h;
      const double up = nn::mean(g.forward(x)).item();
      w.mutable_value()[i] = orig - h;
      const double down = nn::mean(g.forward(x)).item();
      w.mutable_value()[i] = orig;
      CHECK(grads[0].value()[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-3));
    }
  }

  TEST_CASE("parameter archives round trip and reproduce outputs exactly") {
    TempDir dir;
    Generator g(small_spec(Variant::V3), Seed{8});
    Archive a;
    a.manifest["note"] = "test";
    g.params().write_to(a);
    save_archive(a, dir / "g.vgck");
    Generator h(small_spec(Variant::V3), Seed{99});
    h.params().read_from(load_archive(dir / "g.vgck"));
    CHECK(same_params(g.params(), h.params()));
    Rng rng(1);
    const ImageTensor img = random_image(rng, 32, 32);
    CHECK(g.predict(img) == h.predict(img));
  }

  TEST_CASE("archive errors") {
    TempDir dir;
    write_text_atomic(dir / "bad.vgck", "NOPE and more bytes here");
    CHECK(code_of([&] { load_archive(dir / "bad.vgck"); }) == ErrorCode::BadMagic);
    Archive a;
    a.add("t", nn::Tensor({2, 2}, 1.0));
    save_archive(a, dir / "ok.vgck");
    auto bytes = read_file_bytes(dir / "ok.vgck");
    bytes.resize(bytes.size() - 3);
    write_file_atomic(dir / "short.vgck", bytes);
    CHECK(code_of([&] { load_archive(dir / "short.vgck"); }) == ErrorCode::TruncatedFile);
    const Archive back = load_archive(dir / "ok.vgck");
    CHECK(back.require("t", {2, 2})[3] == 1.0);
    CHECK(code_of([&] { back.require("t", {4}); }) == ErrorCode::CheckpointMismatch);
    CHECK(code_of([&] { back.require("u", {2, 2}); }) == ErrorCode::CheckpointMismatch);
    Generator g(small_spec(Variant::V1), Seed{1});
    CHECK(code_of([&] { g.params().read_from(back); }) == ErrorCode::CheckpointMismatch);
  }
}
