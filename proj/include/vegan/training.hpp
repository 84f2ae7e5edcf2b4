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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vegan/effects.hpp"
#include "vegan/models.hpp"
#include "vegan/rng.hpp"

namespace vegan {

struct Hyperparams {
  double lambda_gp = 10.0;
  double learning_rate = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  int n_critic = 5;
  int batch_size = 1;
  int image_size = 224;
  std::int64_t total_iters = 0;
  int buffer_capacity = 50;

  void validate() const;
  nlohmann::json to_json() const;
  static Hyperparams from_json(const nlohmann::json& j);
};

/// Pool of previously edited images shown to the critic in place of fresh
/// ones half of the time once full. Stored images are detached copies.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(int capacity = 50, Rng rng = Rng(0));

  ImageTensor exchange(const ImageTensor& img);

  int capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return slots_.size(); }
  const std::vector<ImageTensor>& slots() const noexcept { return slots_; }
  /// True when the previous exchange returned a stored image.
  bool last_swapped() const noexcept { return last_swapped_; }

  void write_to(Archive& archive) const;
  void read_from(const Archive& archive);

 private:
  int capacity_;
  Rng rng_;
  std::vector<ImageTensor> slots_;
  bool last_swapped_ = false;
};

ImageTensor buffer_exchange(HistoryBuffer& buffer, const ImageTensor& img);

/// L_G = −D(x) for a batch of one.
double generator_loss(double d_score);
nn::Var generator_loss(const nn::Var& d_score);

/// L_D = D(x) − D(y) + λ·gp.
double discriminator_loss(double d_fake, double d_real, double gp, double lambda_gp);
nn::Var discriminator_loss(const nn::Var& d_fake, const nn::Var& d_real, const nn::Var& gp, double lambda_gp);

/// Scalar critic used by the penalty; Discriminator::score fits.
using Critic = std::function<nn::Var(const nn::Var&)>;

/// (‖∇D(x̂)‖₂ − 1)² at x̂ = eps·y_real + (1 − eps)·x_fake, differentiable
/// w.r.t. the critic parameters. Throws NonFiniteGradient.
nn::Var gradient_penalty(const Critic& critic, const nn::Tensor& x_fake, const nn::Tensor& y_real, double eps);
nn::Var gradient_penalty(const Discriminator& d, const ImageTensor& x_fake, const ImageTensor& y_real, double eps);

class Adam {
 public:
  Adam() = default;
  Adam(const ModelParams& params, double lr, double beta1, double beta2, double eps = 1e-8);

  void step(ModelParams& params, const std::vector<nn::Var>& grads);
  std::int64_t steps() const noexcept { return t_; }

  void write_to(Archive& archive, const std::string& prefix) const;
  void read_from(const Archive& archive, const std::string& prefix);

 private:
  double lr_ = 1e-4, beta1_ = 0.0, beta2_ = 0.9, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<nn::Tensor> m_, v_;
};

/// Source of unpaired training images; domain A inputs and domain B samples
/// are drawn independently.
class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual ImageTensor next_input() = 0;
  virtual ImageTensor next_sample() = 0;
  /// Opaque resumable state of the draw order.
  virtual nlohmann::json state() const = 0;
  virtual void restore(const nlohmann::json& state) = 0;
};

struct TrainConfig {
  EffectKind effect = EffectKind::BlackBackground;
  Variant variant = Variant::V4;
  Seed seed{0};
  Hyperparams hp;
  int generator_width = 64;
  int n_res_blocks = 9;
  int discriminator_width = 64;
  std::string backbone_path;
  std::int64_t checkpoint_every = 500;
  std::filesystem::path out_dir = "run";

  GeneratorSpec generator_spec() const;
  DiscriminatorSpec discriminator_spec() const;
};

struct TrainState {
  TrainState(const TrainConfig& config);

  std::int64_t iteration = 0;
  Seed seed;
  EffectKind effect;
  Hyperparams hp;
  Generator generator;
  Discriminator discriminator;
  Adam generator_opt;
  Adam discriminator_opt;
  HistoryBuffer buffer;
  Rng eps_rng;
};

/// Inputs for one iteration: n_critic unpaired (I, I_sample) draws for the
/// critic updates and one fresh I for the generator update.
struct StepBatch {
  std::vector<std::pair<ImageTensor, ImageTensor>> critic;
  ImageTensor generator_input;
};

StepBatch draw_batch(PairSource& source, const Hyperparams& hp);

struct StepStats {
  std::int64_t iteration = 0;
  double l_g = 0.0;
  /// Means over the critic updates of the step.
  double l_d = 0.0;
  double gp = 0.0;
};

/// n_critic critic updates followed by one generator update. Throws
/// NonFiniteLoss before touching any parameter when a loss is not finite.
StepStats train_step(TrainState& state, const StepBatch& batch);
/// Only the critic half of a step (used to check parameter isolation).
StepStats critic_update(TrainState& state, const ImageTensor& input, const ImageTensor& sample);
double generator_update(TrainState& state, const ImageTensor& input);

void save_checkpoint(const TrainState& state, const PairSource* source, const std::filesystem::path& path);
/// Restores a state written by save_checkpoint; the source's draw order too
/// when given.
TrainState load_checkpoint(const std::filesystem::path& path, PairSource* source = nullptr);

struct TrainResult {
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path log_path;
  std::int64_t final_iteration = 0;
};

/// Runs to hp.total_iters, writing out_dir/train_log.csv (iter,l_g,l_d,gp)
/// and out_dir/ckpt_<iter>.vgck every checkpoint_every iterations and at the
/// end. With `resume`, continues from that checkpoint and its log.
TrainResult train(const TrainConfig& config, PairSource& source,
                  const std::optional<std::filesystem::path>& resume = std::nullopt,
                  const std::function<void(const StepStats&)>& on_step = {});

/// Generator restored from a checkpoint (train state or exported weights).
Generator load_generator(const std::filesystem::path& checkpoint);
/// Pure inference; the image must already be at a size the generator accepts.
VerMap predict_ver(const Generator& generator, const ImageTensor& image);
VerMap predict_ver(const std::filesystem::path& checkpoint, const ImageTensor& image);

}  // namespace vegan
