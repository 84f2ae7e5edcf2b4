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
#include <fstream>
#include <string>

#include "support.hpp"
#include "vegan/data.hpp"
#include "vegan/nn/ops.hpp"
#include "vegan/synthetic.hpp"
#include "vegan/training.hpp"

using namespace vegan;
using vegan::testing::code_of;
using vegan::testing::random_image;
using vegan::testing::TempDir;

namespace {

TrainConfig toy_config(const std::filesystem::path& out) {
  TrainConfig c;
  c.variant = Variant::V4;
  c.seed = Seed{11};
  c.hp.image_size = 16;
  c.hp.n_critic = 2;
  c.hp.buffer_capacity = 3;
  c.hp.total_iters = 4;
  c.generator_width = 4;
  c.n_res_blocks = 1;
  c.discriminator_width = 4;
  c.checkpoint_every = 2;
  c.out_dir = out;
  return c;
}

MemoryPairSource toy_source(int size = 16) {
  Rng rng(21);
  std::vector<ImageTensor> a, b;
  for (int i = 0; i < 6; ++i) a.push_back(random_image(rng, size, size));
  for (int i = 0; i < 6; ++i) {
    const auto s = synthetic_disk(rng, size);
    b.push_back(synthesize_sample(s.image, s.mask, EffectKind::BlackBackground));
  }
  return MemoryPairSource(std::move(a), std::move(b), Seed{4});
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("loss arithmetic") {
    CHECK(discriminator_loss(1.0, 3.0, 0.25, 10.0) == doctest::Approx(0.5));
    CHECK(generator_loss(2.5) == -2.5);
    // A constant critic has zero gradient, so the penalty is exactly one.
    CHECK(discriminator_loss(0.7, 0.7, 1.0, 10.0) == doctest::Approx(10.0));
  }

  TEST_CASE("gradient penalty oracles") {
    nn::Tensor fake({3, 4, 4}), real({3, 4, 4});
    Rng rng(3);
    for (auto& v : fake.values()) v = rng.uniform();
    for (auto& v : real.values()) v = rng.uniform();

    const Critic twice_sum = [](const nn::Var& x) { return nn::scale(nn::sum(x), 2.0); };
    const double want = std::pow(2.0 * std::sqrt(48.0) - 1.0, 2);
    CHECK(gradient_penalty(twice_sum, fake, real, 0.3).item() == doctest::Approx(want).epsilon(1e-4));

    nn::Tensor unit({3, 4, 4});
    for (auto& v : unit.values()) v = rng.normal();
    double norm = 0.0;
    for (double v : unit.values()) norm += v * v;
    for (auto& v : unit.values()) v /= std::sqrt(norm);
    const Critic linear = [unit](const nn::Var& x) { return nn::sum(nn::mul_const(x, unit)); };
    CHECK(gradient_penalty(linear, fake, real, 0.6).item() == doctest::Approx(0.0).epsilon(1e-12));

    const Critic constant = [](const nn::Var& x) { return nn::scale(nn::sum(x), 0.0); };
    CHECK(gradient_penalty(constant, fake, real, 0.5).item() == doctest::Approx(1.0));

    const Critic blowup = [](const nn::Var& x) { return nn::scale(nn::sum(x), INFINITY); };
    CHECK(code_of([&] { gradient_penalty(blowup, fake, real, 0.5); }) == ErrorCode::NonFiniteGradient);
  }

  TEST_CASE("gradient penalty is non-negative on real critics") {
    Rng rng(5);
    const Discriminator d(DiscriminatorSpec::for_variant(Variant::V1, 32, 4), Seed{2});
    for (int i = 0; i < 5; ++i) {
      const auto gp = gradient_penalty(d, random_image(rng, 32, 32), random_image(rng, 32, 32), rng.uniform());
      CHECK(gp.item() >= 0.0);
    }
  }

  TEST_CASE("history buffer fills, caps and swaps half the time") {
    HistoryBuffer buf(50, Rng(7));
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
      const ImageTensor img = random_image(rng, 2, 2);
      CHECK(buf.exchange(img) == img);
      CHECK_FALSE(buf.last_swapped());
      CHECK(buf.size() == static_cast<std::size_t>(i + 1));
    }
    int swaps = 0;
    for (int i = 0; i < 10000; ++i) {
      const ImageTensor img(1, 1, static_cast<float>(i) / 10000.0f);
      const ImageTensor out = buf.exchange(img);
      CHECK(buf.size() == 50u);
      if (buf.last_swapped()) {
        ++swaps;
        CHECK_FALSE(out == img);
      } else {
        CHECK(out == img);
      }
    }
    CHECK(swaps / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

    HistoryBuffer none(0, Rng(1));
    const ImageTensor img = random_image(rng, 2, 2);
    CHECK(none.exchange(img) == img);
    CHECK(none.size() == 0u);
  }

  TEST_CASE("history buffer persists through an archive") {
    HistoryBuffer buf(4, Rng(7));
    Rng rng(1);
    for (int i = 0; i < 6; ++i) buf.exchange(random_image(rng, 3, 3));
    Archive a;
    buf.write_to(a);
    HistoryBuffer back(4, Rng(99));
    back.read_from(a);
    CHECK(back.slots() == buf.slots());
    const ImageTensor probe = random_image(rng, 3, 3);
    CHECK(back.exchange(probe) == buf.exchange(probe));
  }

  TEST_CASE("hyperparameters validate and round trip") {
    Hyperparams hp;
    CHECK(hp.lambda_gp == 10.0);
    CHECK(hp.n_critic == 5);
    CHECK(Hyperparams::from_json(hp.to_json()).to_json() == hp.to_json());
    hp.batch_size = 2;
    CHECK(code_of([&] { hp.validate(); }) == ErrorCode::InvalidArgument);
    hp = Hyperparams{};
    hp.learning_rate = -1;
    CHECK(code_of([&] { hp.validate(); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("adam first step moves each parameter by the learning rate") {
    ModelParams p;
    p.add("w", nn::Tensor({3}, 1.0));
    Adam opt(p, 0.1, 0.0, 0.9);
    nn::Tensor g({3});
    g[0] = 5.0;
    g[1] = -0.01;
    g[2] = 0.0;
    opt.step(p, {nn::Var::constant(g)});
    CHECK(p.get("w").value()[0] == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(p.get("w").value()[1] == doctest::Approx(1.1).epsilon(1e-5));
    CHECK(p.get("w").value()[2] == 1.0);
    CHECK(opt.steps() == 1);
  }

  TEST_CASE("critic update leaves the generator untouched") {
    TempDir dir;
    TrainState state(toy_config(dir.path()));
    const auto g_before = state.generator.params().snapshot();
    const auto d_before = state.discriminator.params().snapshot();
    Rng rng(2);
    const auto stats = critic_update(state, random_image(rng, 16, 16), random_image(rng, 16, 16));
    CHECK(std::isfinite(stats.l_d));
    CHECK(stats.gp >= 0.0);
    CHECK(state.generator.params().snapshot() == g_before);
    CHECK_FALSE(state.discriminator.params().snapshot() == d_before);

    const auto d_after = state.discriminator.params().snapshot();
    generator_update(state, random_image(rng, 16, 16));
    CHECK(state.discriminator.params().snapshot() == d_after);
    CHECK_FALSE(state.generator.params().snapshot() == g_before);
  }

  TEST_CASE("edits that cannot change the image give no generator gradient") {
    // A gray image is its own luma, so the editor output ignores the map.
    const Generator g(GeneratorSpec::for_variant(Variant::V4, 16, 4, 1), Seed{1});
    const Discriminator d(DiscriminatorSpec::for_variant(Variant::V4, 16, 4), Seed{1});
    const ImageTensor gray(16, 16, 0.4f);
    const nn::Tensor img = editor::to_tensor(gray);
    const nn::Tensor eff = editor::to_tensor(apply_effect(gray, EffectKind::ColorSelectivo));
    const nn::Var edited = editor::compose(img, eff, g.forward(nn::Var::constant(img)));
    const nn::Var loss = generator_loss(d.score(edited));
    const auto grads = nn::grad(loss, g.params().vars());
    for (const auto& gr : grads) {
      for (double v : gr.value().values()) CHECK(std::abs(v) < 1e-12);
    }
  }

  TEST_CASE("non-finite losses abort before parameters change") {
    TempDir dir;
    TrainState state(toy_config(dir.path()));
    const auto [w, b] = state.discriminator.head_names();
    state.discriminator.params().get(b).mutable_value()[0] = NAN;
    const auto d_before = state.discriminator.params().snapshot();
    const auto g_before = state.generator.params().snapshot();
    Rng rng(2);
    CHECK(code_of([&] { critic_update(state, random_image(rng, 16, 16), random_image(rng, 16, 16)); }) ==
          ErrorCode::NonFiniteLoss);
    CHECK(code_of([&] { generator_update(state, random_image(rng, 16, 16)); }) == ErrorCode::NonFiniteLoss);
    const auto d_after = state.discriminator.params().snapshot();
    CHECK(d_after.size() == d_before.size());
    CHECK(state.generator.params().snapshot() == g_before);
  }

  TEST_CASE("checkpoint resume reproduces the next step exactly") {
    TempDir dir;
    const TrainConfig config = toy_config(dir.path());
    auto source = toy_source();
    TrainState state(config);
    train_step(state, draw_batch(source, state.hp));
    save_checkpoint(state, &source, dir / "mid.vgck");
    const StepStats first = train_step(state, draw_batch(source, state.hp));

    auto source2 = toy_source();
    TrainState resumed = load_checkpoint(dir / "mid.vgck", &source2);
    CHECK(resumed.iteration == 1);
    const StepStats second = train_step(resumed, draw_batch(source2, resumed.hp));
    CHECK(second.iteration == first.iteration);
    CHECK(second.l_g == first.l_g);
    CHECK(second.l_d == first.l_d);
    CHECK(second.gp == first.gp);
    CHECK(resumed.generator.params().snapshot() == state.generator.params().snapshot());
  }

  TEST_CASE("train writes one log row per iteration and resumes the numbering") {
    TempDir dir;
    TrainConfig config = toy_config(dir / "run");
    auto source = toy_source();
    const TrainResult r = train(config, source);
    CHECK(r.final_iteration == 4);
    const auto lines = read_lines(r.log_path);
    REQUIRE(lines.size() == 5u);
    CHECK(lines[0] == "iter,l_g,l_d,gp");
    CHECK(lines[1].starts_with("1,"));
    CHECK(lines[4].starts_with("4,"));
    CHECK(r.checkpoints.size() == 2u);
    CHECK(std::filesystem::exists(dir / "run" / "ckpt_00000002.vgck"));

    // Resume from the midpoint into a fresh directory copy and extend.
    TrainConfig longer = toy_config(dir / "run");
    longer.hp.total_iters = 6;
    auto source2 = toy_source();
    const TrainResult r2 = train(longer, source2, dir / "run" / "ckpt_00000002.vgck");
    const auto lines2 = read_lines(r2.log_path);
    REQUIRE(lines2.size() == 7u);
    for (int i = 1; i <= 6; ++i) CHECK(lines2[i].starts_with(std::to_string(i) + ","));
    // Rows 3 and 4 are recomputed identically after resuming.
    CHECK(lines2[3] == lines[3]);
    CHECK(lines2[4] == lines[4]);
  }

  TEST_CASE("training is deterministic under a fixed seed") {
    TempDir dir;
    auto s1 = toy_source();
    auto s2 = toy_source();
    const auto r1 = train(toy_config(dir / "a"), s1);
    const auto r2 = train(toy_config(dir / "b"), s2);
    CHECK(read_lines(r1.log_path) == read_lines(r2.log_path));
  }

  TEST_CASE("generators reload from checkpoints") {
    TempDir dir;
    auto source = toy_source();
    const auto r = train(toy_config(dir.path()), source);
    const Generator g = load_generator(r.checkpoints.back());
    const TrainState state = load_checkpoint(r.checkpoints.back());
    Rng rng(1);
    const ImageTensor img = random_image(rng, 16, 16);
    CHECK(predict_ver(g, img) == state.generator.predict(img));
    CHECK(predict_ver(r.checkpoints.back(), img).valid());
    CHECK(code_of([&] { load_generator(dir / "missing.vgck"); }) == ErrorCode::MissingFile);
  }
}
