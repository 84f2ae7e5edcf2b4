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

#include "vegan/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vegan/image_io.hpp"
#include "vegan/log.hpp"
#include "vegan/nn/ops.hpp"

namespace vegan {

namespace fs = std::filesystem;

void Hyperparams::validate() const {
  if (!(lambda_gp > 0.0)) fail(ErrorCode::InvalidArgument, "lambda_gp must be positive");
  if (!(learning_rate > 0.0)) fail(ErrorCode::InvalidArgument, "learning_rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) fail(ErrorCode::InvalidArgument, "adam betas");
  if (n_critic < 1) fail(ErrorCode::InvalidArgument, "n_critic must be at least 1");
  if (batch_size != 1) fail(ErrorCode::InvalidArgument, "only batch size 1 is supported");
  if (image_size < 16) fail(ErrorCode::InvalidArgument, "image_size too small");
  if (total_iters < 0) fail(ErrorCode::InvalidArgument, "total_iters must be non-negative");
  if (buffer_capacity < 0) fail(ErrorCode::InvalidArgument, "buffer_capacity must be non-negative");
}

nlohmann::json Hyperparams::to_json() const {
  return {{"lambda_gp", lambda_gp}, {"learning_rate", learning_rate}, {"beta1", beta1},
          {"beta2", beta2},         {"n_critic", n_critic},           {"batch_size", batch_size},
          {"image_size", image_size}, {"total_iters", total_iters},   {"buffer_capacity", buffer_capacity}};
}

Hyperparams Hyperparams::from_json(const nlohmann::json& j) {
  Hyperparams hp;
  hp.lambda_gp = j.at("lambda_gp").get<double>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.beta1 = j.at("beta1").get<double>();
  hp.beta2 = j.at("beta2").get<double>();
  hp.n_critic = j.at("n_critic").get<int>();
  hp.batch_size = j.at("batch_size").get<int>();
  hp.image_size = j.at("image_size").get<int>();
  hp.total_iters = j.at("total_iters").get<std::int64_t>();
  hp.buffer_capacity = j.at("buffer_capacity").get<int>();
  return hp;
}

// --- history buffer ---------------------------------------------------------

HistoryBuffer::HistoryBuffer(int capacity, Rng rng) : capacity_(capacity), rng_(std::move(rng)) {}

ImageTensor HistoryBuffer::exchange(const ImageTensor& img) {
  last_swapped_ = false;
  if (capacity_ == 0) return img;
  if (slots_.size() < static_cast<std::size_t>(capacity_)) {
    slots_.push_back(img);
    return img;
  }
  if (rng_.coin()) {
    const auto k = static_cast<std::size_t>(rng_.index(slots_.size()));
    ImageTensor stored = std::move(slots_[k]);
    slots_[k] = img;
    last_swapped_ = true;
    return stored;
  }
  return img;
}

void HistoryBuffer::write_to(Archive& archive) const {
  archive.manifest["buffer"] = {{"capacity", capacity_}, {"count", slots_.size()}, {"rng", rng_.serialize()}};
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    archive.add("buffer.slot" + std::to_string(i), editor::to_tensor(slots_[i]));
  }
}

void HistoryBuffer::read_from(const Archive& archive) {
  const auto& b = archive.manifest.at("buffer");
  capacity_ = b.at("capacity").get<int>();
  rng_.deserialize(b.at("rng").get<std::string>());
  slots_.clear();
  const auto count = b.at("count").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i) {
    const nn::Tensor* t = archive.find("buffer.slot" + std::to_string(i));
    if (!t) fail(ErrorCode::CheckpointMismatch, "missing buffer slot " + std::to_string(i));
    ImageTensor img(t->dim(1), t->dim(2));
    std::copy(t->values().begin(), t->values().end(), img.values().begin());
    slots_.push_back(std::move(img));
  }
  last_swapped_ = false;
}

ImageTensor buffer_exchange(HistoryBuffer& buffer, const ImageTensor& img) { return buffer.exchange(img); }

// --- losses -----------------------------------------------------------------

double generator_loss(double d_score) { return -d_score; }
nn::Var generator_loss(const nn::Var& d_score) { return nn::scale(d_score, -1.0); }

double discriminator_loss(double d_fake, double d_real, double gp, double lambda_gp) {
  return d_fake - d_real + lambda_gp * gp;
}

nn::Var discriminator_loss(const nn::Var& d_fake, const nn::Var& d_real, const nn::Var& gp, double lambda_gp) {
  return d_fake - d_real + nn::scale(gp, lambda_gp);
}

nn::Var gradient_penalty(const Critic& critic, const nn::Tensor& x_fake, const nn::Tensor& y_real, double eps) {
  if (x_fake.shape() != y_real.shape()) fail(ErrorCode::DimensionMismatch, "gradient penalty endpoints");
  if (!(eps >= 0.0 && eps <= 1.0)) fail(ErrorCode::InvalidArgument, "interpolation eps outside [0,1]");
  nn::Tensor mix(x_fake.shape());
  for (std::size_t i = 0; i < mix.numel(); ++i) mix[i] = eps * y_real[i] + (1.0 - eps) * x_fake[i];
  const nn::Var x_hat = nn::Var::leaf(std::move(mix));
  const nn::Var score = critic(x_hat);
  const nn::Var g = nn::grad(score, {x_hat}, /*create_graph=*/true)[0];
  const nn::Var norm = nn::sqrt(nn::sum(nn::square(g)));
  if (!std::isfinite(norm.item())) fail(ErrorCode::NonFiniteGradient, "critic gradient norm is not finite");
  return nn::square(nn::add_scalar(norm, -1.0));
}

nn::Var gradient_penalty(const Discriminator& d, const ImageTensor& x_fake, const ImageTensor& y_real, double eps) {
  return gradient_penalty([&d](const nn::Var& x) { return d.score(x); }, editor::to_tensor(x_fake),
                          editor::to_tensor(y_real), eps);
}

// --- optimizer --------------------------------------------------------------

Adam::Adam(const ModelParams& params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& v : params.vars()) {
    m_.emplace_back(v.shape());
    v_.emplace_back(v.shape());
  }
}

void Adam::step(ModelParams& params, const std::vector<nn::Var>& grads) {
  if (grads.size() != params.size() || m_.size() != params.size()) {
    fail(ErrorCode::InvalidArgument, "optimizer/parameter count mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params.vars()[k].mutable_value().values();
    auto g = grads[k].value().values();
    auto m = m_[k].values();
    auto v = v_[k].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

void Adam::write_to(Archive& archive, const std::string& prefix) const {
  archive.manifest["optimizers"][prefix] = {
      {"lr", lr_}, {"beta1", beta1_}, {"beta2", beta2_}, {"eps", eps_}, {"t", t_}};
  for (std::size_t k = 0; k < m_.size(); ++k) {
    archive.add("adam." + prefix + ".m" + std::to_string(k), m_[k]);
    archive.add("adam." + prefix + ".v" + std::to_string(k), v_[k]);
  }
}

void Adam::read_from(const Archive& archive, const std::string& prefix) {
  const auto& o = archive.manifest.at("optimizers").at(prefix);
  lr_ = o.at("lr").get<double>();
  beta1_ = o.at("beta1").get<double>();
  beta2_ = o.at("beta2").get<double>();
  eps_ = o.at("eps").get<double>();
  t_ = o.at("t").get<std::int64_t>();
  for (std::size_t k = 0; k < m_.size(); ++k) {
    m_[k] = archive.require("adam." + prefix + ".m" + std::to_string(k), m_[k].shape());
    v_[k] = archive.require("adam." + prefix + ".v" + std::to_string(k), v_[k].shape());
  }
}

// --- state ------------------------------------------------------------------

GeneratorSpec TrainConfig::generator_spec() const {
  GeneratorSpec s = GeneratorSpec::for_variant(variant, hp.image_size, generator_width, n_res_blocks);
  s.backbone_path = backbone_path;
  return s;
}

DiscriminatorSpec TrainConfig::discriminator_spec() const {
  return DiscriminatorSpec::for_variant(variant, hp.image_size, discriminator_width);
}

TrainState::TrainState(const TrainConfig& config)
    : seed(config.seed),
      effect(config.effect),
      hp(config.hp),
      generator(config.generator_spec(), config.seed),
      discriminator(config.discriminator_spec(), config.seed),
      generator_opt(generator.params(), config.hp.learning_rate, config.hp.beta1, config.hp.beta2),
      discriminator_opt(discriminator.params(), config.hp.learning_rate, config.hp.beta1, config.hp.beta2),
      buffer(config.hp.buffer_capacity, Rng::derive(config.seed, "history-buffer")),
      eps_rng(Rng::derive(config.seed, "gp-eps")) {
  hp.validate();
}

StepBatch draw_batch(PairSource& source, const Hyperparams& hp) {
  StepBatch batch;
  for (int k = 0; k < hp.n_critic; ++k) {
    ImageTensor input = source.next_input();
    ImageTensor sample = source.next_sample();
    batch.critic.emplace_back(std::move(input), std::move(sample));
  }
  batch.generator_input = source.next_input();
  return batch;
}

namespace {

ImageTensor edit_detached(const TrainState& state, const ImageTensor& input) {
  const ImageTensor effect = apply_effect(input, state.effect);
  const VerMap ver = state.generator.predict(input);
  nn::NoGradGuard no_grad;
  const nn::Var edited =
      editor::compose(editor::to_tensor(input), editor::to_tensor(effect), nn::Var::constant(editor::to_tensor(ver)));
  return editor::to_image(edited.value());
}

void require_finite(double v, const char* what, std::int64_t iteration) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::NonFiniteLoss, std::string(what) + " is not finite at iteration " + std::to_string(iteration));
  }
}

}  // namespace

StepStats critic_update(TrainState& state, const ImageTensor& input, const ImageTensor& sample) {
  require_same_dims(input, sample, "critic update");
  const ImageTensor fake = state.buffer.exchange(edit_detached(state, input));
  const double eps = state.eps_rng.uniform();
  const Discriminator& d = state.discriminator;
  const nn::Var d_fake = d.score(nn::Var::constant(editor::to_tensor(fake)));
  const nn::Var d_real = d.score(nn::Var::constant(editor::to_tensor(sample)));
  const nn::Var gp = gradient_penalty(d, fake, sample, eps);
  const nn::Var loss = discriminator_loss(d_fake, d_real, gp, state.hp.lambda_gp);
  require_finite(loss.item(), "critic loss", state.iteration);
  const auto grads = nn::grad(loss, state.discriminator.params().vars());
  for (const auto& g : grads) {
    if (!g.value().all_finite()) fail(ErrorCode::NonFiniteGradient, "critic parameter gradient");
  }
  state.discriminator_opt.step(state.discriminator.params(), grads);
  return {state.iteration, 0.0, loss.item(), gp.item()};
}

double generator_update(TrainState& state, const ImageTensor& input) {
  const nn::Tensor image = editor::to_tensor(input);
  const nn::Tensor effect = editor::to_tensor(apply_effect(input, state.effect));
  const nn::Var ver = state.generator.forward(nn::Var::constant(image));
  const nn::Var edited = editor::compose(image, effect, ver);
  const nn::Var loss = generator_loss(state.discriminator.score(edited));
  require_finite(loss.item(), "generator loss", state.iteration);
  const auto grads = nn::grad(loss, state.generator.params().vars());
  for (const auto& g : grads) {
    if (!g.value().all_finite()) fail(ErrorCode::NonFiniteGradient, "generator parameter gradient");
  }
  state.generator_opt.step(state.generator.params(), grads);
  return loss.item();
}

StepStats train_step(TrainState& state, const StepBatch& batch) {
  if (batch.critic.size() != static_cast<std::size_t>(state.hp.n_critic)) {
    fail(ErrorCode::InvalidArgument, "batch must hold n_critic critic draws");
  }
  StepStats stats;
  for (const auto& [input, sample] : batch.critic) {
    const StepStats c = critic_update(state, input, sample);
    stats.l_d += c.l_d;
    stats.gp += c.gp;
  }
  stats.l_d /= static_cast<double>(batch.critic.size());
  stats.gp /= static_cast<double>(batch.critic.size());
  stats.l_g = generator_update(state, batch.generator_input);
  ++state.iteration;
  stats.iteration = state.iteration;
  return stats;
}

// --- checkpoints ------------------------------------------------------------

void save_checkpoint(const TrainState& state, const PairSource* source, const fs::path& path) {
  Archive a;
  a.manifest["kind"] = "train_state";
  a.manifest["iteration"] = state.iteration;
  a.manifest["seed"] = std::to_string(state.seed.value);
  a.manifest["effect"] = std::string(to_string(state.effect));
  a.manifest["hyperparams"] = state.hp.to_json();
  a.manifest["generator"] = state.generator.spec().to_json();
  a.manifest["discriminator"] = state.discriminator.spec().to_json();
  // Departures from the reference 9-residual-block transformer network.
  a.manifest["architecture_notes"] = {
      "generator normalization is instance norm, reflect padding in residual blocks",
      "generator output is tanh, read as nu in (-1, 1)",
      "V2 encoder is a stride-16 residual backbone loaded from backbone_path",
      "critic has no normalization layers (gradient penalty)",
  };
  a.manifest["gp_eps_rng"] = state.eps_rng.serialize();
  if (source) a.manifest["data"] = source->state();
  state.generator.params().write_to(a);
  state.discriminator.params().write_to(a);
  state.generator_opt.write_to(a, "generator");
  state.discriminator_opt.write_to(a, "discriminator");
  state.buffer.write_to(a);
  save_archive(a, path);
}

namespace {

TrainConfig config_from_manifest(const nlohmann::json& m) {
  TrainConfig c;
  try {
    c.seed = Seed{std::stoull(m.at("seed").get<std::string>())};
    c.effect = parse_effect(m.at("effect").get<std::string>());
    c.hp = Hyperparams::from_json(m.at("hyperparams"));
    const GeneratorSpec g = GeneratorSpec::from_json(m.at("generator"));
    const DiscriminatorSpec d = DiscriminatorSpec::from_json(m.at("discriminator"));
    c.variant = g.variant;
    c.generator_width = g.base_width;
    c.n_res_blocks = g.n_res_blocks;
    c.backbone_path = g.backbone_path;
    c.discriminator_width = d.base_width;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::CheckpointMismatch, std::string("incomplete checkpoint manifest: ") + e.what());
  }
  return c;
}

}  // namespace

TrainState load_checkpoint(const fs::path& path, PairSource* source) {
  const Archive a = load_archive(path);
  if (a.manifest.value("kind", "") != "train_state") fail(ErrorCode::CheckpointMismatch, path.string() + ": not a train state");
  TrainConfig config = config_from_manifest(a.manifest);
  // A V2 checkpoint carries its own backbone tensors.
  std::error_code ec;
  if (config.variant == Variant::V2 && !fs::is_regular_file(config.backbone_path, ec)) config.backbone_path = path.string();
  TrainState state(config);
  state.iteration = a.manifest.at("iteration").get<std::int64_t>();
  state.eps_rng.deserialize(a.manifest.at("gp_eps_rng").get<std::string>());
  state.generator.params().read_from(a);
  state.discriminator.params().read_from(a);
  state.generator_opt.read_from(a, "generator");
  state.discriminator_opt.read_from(a, "discriminator");
  state.buffer.read_from(a);
  if (source && a.manifest.contains("data")) source->restore(a.manifest.at("data"));
  return state;
}

Generator load_generator(const fs::path& checkpoint) {
  const Archive a = load_archive(checkpoint);
  if (!a.manifest.contains("generator") || !a.manifest.contains("seed")) {
    fail(ErrorCode::CheckpointMismatch, checkpoint.string() + ": no generator in checkpoint");
  }
  GeneratorSpec spec = GeneratorSpec::from_json(a.manifest.at("generator"));
  if (spec.variant == Variant::V2) {
    // Weights come from the checkpoint itself; the backbone file is only
    // needed to satisfy construction when it still exists.
    std::error_code ec;
    if (!fs::is_regular_file(spec.backbone_path, ec)) spec.backbone_path = checkpoint.string();
  }
  Generator g(spec, Seed{std::stoull(a.manifest.at("seed").get<std::string>())});
  g.params().read_from(a);
  return g;
}

VerMap predict_ver(const Generator& generator, const ImageTensor& image) { return generator.predict(image); }

VerMap predict_ver(const fs::path& checkpoint, const ImageTensor& image) {
  return predict_ver(load_generator(checkpoint), image);
}

// --- loop -------------------------------------------------------------------

namespace {

std::string format_row(const StepStats& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(s.iteration), s.l_g, s.l_d, s.gp);
  return buf;
}

// Keeps the header and the first `rows` data rows of an existing log.
void truncate_log(const fs::path& path, std::int64_t rows) {
  std::ifstream in(path);
  std::string line, kept;
  std::int64_t n = -1;
  while (n < rows && std::getline(in, line)) {
    kept += line + "\n";
    ++n;
  }
  in.close();
  if (n < rows) fail(ErrorCode::CheckpointMismatch, path.string() + " has fewer rows than the checkpoint iteration");
  write_text_atomic(path, kept);
}

fs::path checkpoint_path(const fs::path& dir, std::int64_t iteration) {
  char name[64];
  std::snprintf(name, sizeof name, "ckpt_%08lld.vgck", static_cast<long long>(iteration));
  return dir / name;
}

}  // namespace

TrainResult train(const TrainConfig& config, PairSource& source, const std::optional<fs::path>& resume,
                  const std::function<void(const StepStats&)>& on_step) {
  config.hp.validate();
  if (config.checkpoint_every < 1) fail(ErrorCode::InvalidArgument, "checkpoint_every must be positive");
  fs::create_directories(config.out_dir);
  TrainResult result;
  result.log_path = config.out_dir / "train_log.csv";

  std::optional<TrainState> state;
  if (resume) {
    state.emplace(load_checkpoint(*resume, &source));
    // The run length may be extended on resume; everything else comes from the checkpoint.
    state->hp.total_iters = config.hp.total_iters;
    if (fs::exists(result.log_path)) {
      truncate_log(result.log_path, state->iteration);
    } else if (state->iteration > 0) {
      fail(ErrorCode::CheckpointMismatch, "resuming without the run's train_log.csv");
    }
  } else {
    state.emplace(config);
    write_text_atomic(result.log_path, "iter,l_g,l_d,gp\n");
  }

  std::ofstream log(result.log_path, std::ios::app);
  if (!log) fail(ErrorCode::IoFailure, result.log_path.string());
  while (state->iteration < state->hp.total_iters) {
    const StepBatch batch = draw_batch(source, state->hp);
    StepStats stats;
    try {
      stats = train_step(*state, batch);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFiniteLoss || e.code() == ErrorCode::NonFiniteGradient) {
        const fs::path snap = config.out_dir / ("diagnostic_" + std::to_string(state->iteration) + ".vgck");
        log_error("training aborted: " + std::string(e.what()) + "; snapshot at " + snap.string());
        save_checkpoint(*state, &source, snap);
      }
      throw;
    }
    log << format_row(stats);
    log.flush();
    if (on_step) on_step(stats);
    if (state->iteration % config.checkpoint_every == 0 || state->iteration == state->hp.total_iters) {
      const fs::path p = checkpoint_path(config.out_dir, state->iteration);
      save_checkpoint(*state, &source, p);
      result.checkpoints.push_back(p);
    }
  }
  result.final_iteration = state->iteration;
  return result;
}

}  // namespace vegan
