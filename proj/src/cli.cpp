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

#include "vegan/cli.hpp"

#include <openssl/opensslv.h>

#include <algorithm>
#include <charconv>
#include <functional>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "vegan/data.hpp"
#include "vegan/evaluate.hpp"
#include "vegan/image_io.hpp"
#include "vegan/log.hpp"
#include "vegan/synthetic.hpp"

namespace vegan {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::InvalidArgument, "bad value '" + value + "' for " + key);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = parse_number<T>("", v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field string_field(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

template <typename S, typename T>
Field nested_field(S RunConfig::*outer, T S::*inner) {
  if constexpr (std::is_floating_point_v<T>) {
    return {[=](RunConfig& c, const std::string& v) { (c.*outer).*inner = parse_number<T>("", v); },
            [=](const RunConfig& c) { return format_double((c.*outer).*inner); }};
  } else {
    return {[=](RunConfig& c, const std::string& v) { (c.*outer).*inner = parse_number<T>("", v); },
            [=](const RunConfig& c) { return std::to_string((c.*outer).*inner); }};
  }
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"effect", {[](RunConfig& c, const std::string& v) { c.effect = parse_effect(v); },
                  [](const RunConfig& c) { return std::string(to_string(c.effect)); }}},
      {"variant", {[](RunConfig& c, const std::string& v) { c.variant = parse_variant(v); },
                   [](const RunConfig& c) { return std::string(to_string(c.variant)); }}},
      {"seed", {[](RunConfig& c, const std::string& v) { c.seed = Seed{parse_number<std::uint64_t>("seed", v)}; },
                [](const RunConfig& c) { return std::to_string(c.seed.value); }}},
      {"hp.lambda_gp", nested_field(&RunConfig::hp, &Hyperparams::lambda_gp)},
      {"hp.learning_rate", nested_field(&RunConfig::hp, &Hyperparams::learning_rate)},
      {"hp.beta1", nested_field(&RunConfig::hp, &Hyperparams::beta1)},
      {"hp.beta2", nested_field(&RunConfig::hp, &Hyperparams::beta2)},
      {"hp.n_critic", nested_field(&RunConfig::hp, &Hyperparams::n_critic)},
      {"hp.batch_size", nested_field(&RunConfig::hp, &Hyperparams::batch_size)},
      {"hp.image_size", nested_field(&RunConfig::hp, &Hyperparams::image_size)},
      {"hp.total_iters", nested_field(&RunConfig::hp, &Hyperparams::total_iters)},
      {"hp.buffer_capacity", nested_field(&RunConfig::hp, &Hyperparams::buffer_capacity)},
      {"model.generator_width", number_field(&RunConfig::generator_width)},
      {"model.n_res_blocks", number_field(&RunConfig::n_res_blocks)},
      {"model.discriminator_width", number_field(&RunConfig::discriminator_width)},
      {"model.backbone", string_field(&RunConfig::backbone)},
      {"train.checkpoint_every", number_field(&RunConfig::checkpoint_every)},
      {"binarize.n_target", nested_field(&RunConfig::binarize, &BinarizeParams::n_target)},
      {"binarize.theta1", nested_field(&RunConfig::binarize, &BinarizeParams::theta1)},
      {"binarize.theta2", nested_field(&RunConfig::binarize, &BinarizeParams::theta2)},
      {"binarize.compactness", nested_field(&RunConfig::binarize, &BinarizeParams::compactness)},
      {"binarize.lab_scale", nested_field(&RunConfig::binarize, &BinarizeParams::lab_scale)},
      {"paths.root", string_field(&RunConfig::root_path)},
      {"paths.dataset", string_field(&RunConfig::dataset_path)},
      {"paths.run", string_field(&RunConfig::run_path)},
  };
  return f;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  try {
    it->second.set(*this, value);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidArgument, "bad value '" + value + "' for " + key + " (" + e.what() + ")");
  }
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + "=" + field.get(*this) + "\n";
  return out;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [key, field] : fields()) out.push_back(key);
  return out;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse(std::string(bytes.begin(), bytes.end()));
}

TrainConfig RunConfig::train_config(const fs::path& out_dir) const {
  TrainConfig t;
  t.effect = effect;
  t.variant = variant;
  t.seed = seed;
  t.hp = hp;
  t.generator_width = generator_width;
  t.n_res_blocks = n_res_blocks;
  t.discriminator_width = discriminator_width;
  t.backbone_path = backbone;
  t.checkpoint_every = checkpoint_every;
  t.out_dir = out_dir;
  return t;
}

void write_provenance(const fs::path& dir, const std::string& command, const RunConfig& config,
                      const std::map<std::string, std::string>& arguments) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = std::to_string(config.seed.value);
  j["config"] = config.canonical();
  j["arguments"] = arguments;
  j["versions"] = {{"vegan", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"openssl", OPENSSL_VERSION_TEXT},
                   {"cli11", CLI11_VERSION}};
  fs::create_directories(dir);
  write_text_atomic(dir / (command + ".provenance.json"), j.dump(2) + "\n");
}

// --- commands ---------------------------------------------------------------

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// A single image, every image in a directory, or the entries of a manifest.
std::vector<fs::path> list_inputs(const fs::path& input) {
  if (fs::is_directory(input)) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(input)) {
      if (e.is_regular_file() && is_image_file(e.path())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) fail(ErrorCode::MissingFile, "no images in " + input.string());
    return out;
  }
  if (input.extension() == ".json") {
    std::vector<fs::path> out;
    for (const auto& e : load_manifest(input).entries) out.push_back(e.path);
    return out;
  }
  if (!fs::is_regular_file(input)) fail(ErrorCode::MissingFile, input.string());
  return {input};
}

/// The VER for `image`: `ver` itself when it is a file, else <ver>/<stem>.ver.
fs::path ver_for(const fs::path& image, const fs::path& ver) {
  if (!fs::is_directory(ver)) return ver;
  return ver / (image.stem().string() + ".ver");
}

ImageTensor fit_to(const ImageTensor& img, int height, int width, const fs::path& origin) {
  if (img.height() == height && img.width() == width) return img;
  if (height != width) {
    fail(ErrorCode::DimensionMismatch, origin.string() + " does not match a " + std::to_string(height) + "x" +
                                           std::to_string(width) + " VER");
  }
  return preprocess_image(img, height);
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string effect, variant;
  std::optional<std::uint64_t> seed;

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (!effect.empty()) c.set("effect", effect);
    if (!variant.empty()) c.set("variant", variant);
    if (seed) c.seed = Seed{*seed};
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "--set expects key=value, got '" + kv + "'");
      c.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    return c;
  }
};

fs::path pick_path(const fs::path& flag, const std::string& configured, const fs::path& fallback,
                   const std::string& what) {
  if (!flag.empty()) return flag;
  if (!configured.empty()) return configured;
  if (!fallback.empty()) return fallback;
  fail(ErrorCode::InvalidArgument, what + " is required (flag or config)");
}

void add_common(CLI::App* cmd, Common& common, bool model_flags) {
  cmd->add_option("--config", common.config_path, "key = value configuration file");
  cmd->add_option("--set", common.overrides, "override one config key (key=value), repeatable");
  cmd->add_option("--effect", common.effect, "black_background | color_selectivo | defocus");
  cmd->add_option("--seed", common.seed, "random seed");
  if (model_flags) cmd->add_option("--variant", common.variant, "generator variant V1..V4");
}

int make_dataset(const Common& common, const fs::path& root_flag, const fs::path& out_flag, bool proportional,
                 const std::string& name) {
  const RunConfig config = common.resolve();
  const fs::path root = pick_path(root_flag, config.root_path, {}, "--root");
  const fs::path out = pick_path(out_flag, config.dataset_path, "dataset", "--out");
  SplitOptions opt;
  opt.proportional = proportional;
  opt.name = name;
  const MsraSplit split = split_msra(root, config.seed, opt);
  fs::create_directories(out);
  save_manifest(split.domain_a, out / "A.json");
  save_manifest(split.domain_b_source, out / "Bsource.json");
  save_manifest(split.test, out / "test.json");
  const DatasetManifest b =
      build_effect_samples(split.domain_b_source, config.effect, out / ("samples_" + std::string(to_string(config.effect))));
  save_manifest(b, out / "B.json");
  write_provenance(out, "make-dataset", config,
                   {{"root", root.string()}, {"out", out.string()}, {"proportional", proportional ? "true" : "false"}});
  std::cout << "A: " << split.domain_a.entries.size() << "  Bsource: " << split.domain_b_source.entries.size()
            << "  B: " << b.entries.size() << "  test: " << split.test.entries.size() << "\n";
  return 0;
}

int fetch(const Common& common, WebQuery query, const fs::path& out, bool resume, int retries, int backoff_ms,
          const std::string& role) {
  const RunConfig config = common.resolve();
  if (!role.empty()) query.role = parse_role(role);
  FetchOptions opt;
  opt.resume = resume;
  opt.max_retries = retries;
  opt.initial_backoff = std::chrono::milliseconds(backoff_ms);
  write_provenance(out, "fetch", config,
                   {{"tag", query.tag}, {"count", std::to_string(query.count)}, {"endpoint", query.endpoint},
                    {"credential_env", query.credential_env}});
  const FetchResult r = web_fetch(query, out, opt);
  std::cout << r.achieved << " images (" << r.downloaded << " downloaded, " << r.reused << " already present) -> "
            << r.manifest_path.string() << "\n";
  return 0;
}

int train_cmd(const Common& common, const fs::path& a_flag, const fs::path& b_flag, const fs::path& out_flag,
              std::optional<std::int64_t> iters, std::optional<int> image_size, const std::string& resume,
              int log_every) {
  RunConfig config = common.resolve();
  const fs::path data = config.dataset_path;
  const fs::path a = pick_path(a_flag, data.empty() ? "" : (data / "A.json").string(), {}, "--a");
  const fs::path b = pick_path(b_flag, data.empty() ? "" : (data / "B.json").string(), {}, "--b");
  const fs::path out = pick_path(out_flag, config.run_path, {}, "--out");
  if (iters) config.hp.total_iters = *iters;
  if (image_size) config.hp.image_size = *image_size;
  const DatasetManifest ma = load_manifest(a), mb = load_manifest(b);
  if (ma.role != ManifestRole::DomainA) log_warn(a.string() + " is not a domainA_inputs manifest");
  if (mb.role != ManifestRole::DomainB) log_warn(b.string() + " is not a domainB_samples manifest");
  UnpairedDataset source(ma, mb, config.hp.image_size, config.seed);
  write_provenance(out, "train", config,
                   {{"a", a.string()}, {"b", b.string()}, {"out", out.string()}, {"resume", resume}});
  const auto result =
      train(config.train_config(out), source, resume.empty() ? std::nullopt : std::optional<fs::path>(resume),
            [log_every](const StepStats& s) {
              if (log_every > 0 && s.iteration % log_every == 0) {
                log_info("iter " + std::to_string(s.iteration) + "  l_g " + std::to_string(s.l_g) + "  l_d " +
                         std::to_string(s.l_d) + "  gp " + std::to_string(s.gp));
              }
            });
  std::cout << "trained to iteration " << result.final_iteration << "; log " << result.log_path.string() << "\n";
  return 0;
}

int predict_cmd(const fs::path& checkpoint, const fs::path& input, const fs::path& out) {
  const Generator g = load_generator(checkpoint);
  const int size = g.spec().input_size;
  const auto inputs = list_inputs(input);
  fs::create_directories(out);
  for (const auto& path : inputs) {
    const ImageTensor img = preprocess_image(load_image(path), size);
    save_ver(predict_ver(g, img), out / (path.stem().string() + ".ver"));
  }
  RunConfig config;
  config.variant = g.spec().variant;
  write_provenance(out, "predict", config, {{"checkpoint", checkpoint.string()}, {"input", input.string()}});
  std::cout << inputs.size() << " VERs -> " << out.string() << "\n";
  return 0;
}

int edit_cmd(const Common& common, const fs::path& input, const fs::path& ver_path, const fs::path& out) {
  const RunConfig config = common.resolve();
  const auto inputs = list_inputs(input);
  fs::create_directories(out);
  for (const auto& path : inputs) {
    const VerMap ver = load_ver(ver_for(path, ver_path));
    const ImageTensor img = fit_to(load_image(path), ver.height(), ver.width(), path);
    const std::string stem = path.stem().string();
    std::vector<float> vis(ver.size());
    std::transform(ver.values().begin(), ver.values().end(), vis.begin(), [](float v) { return (v + 1.0f) / 2.0f; });
    save_image(img, out / (stem + "_input.png"));
    save_gray(vis, ver.height(), ver.width(), out / (stem + "_ver.png"));
    save_image(compose(img, apply_effect(img, config.effect), ver), out / (stem + "_edited.png"));
  }
  write_provenance(out, "edit", config, {{"input", input.string()}, {"ver", ver_path.string()}});
  std::cout << inputs.size() << " triplets -> " << out.string() << "\n";
  return 0;
}

int binarize_cmd(const Common& common, const fs::path& input, const fs::path& ver_path, const fs::path& out) {
  const RunConfig config = common.resolve();
  const auto inputs = list_inputs(input);
  fs::create_directories(out);
  for (const auto& path : inputs) {
    const VerMap ver = load_ver(ver_for(path, ver_path));
    const ImageTensor img = fit_to(load_image(path), ver.height(), ver.width(), path);
    const BinarizeResult r = binarize_detailed(img, ver, config.binarize);
    save_mask(r.mask, out / (path.stem().string() + ".png"));
    write_sidecar(r, out / (path.stem().string() + ".json"));
  }
  write_provenance(out, "binarize", config, {{"input", input.string()}, {"ver", ver_path.string()}});
  std::cout << inputs.size() << " masks -> " << out.string() << "\n";
  return 0;
}

fs::path parent_or_dot(const fs::path& p) { return p.has_parent_path() ? p.parent_path() : fs::path("."); }

int evaluate_cmd(const fs::path& pred, const fs::path& gt, const fs::path& out, const std::string& dataset,
                 bool align) {
  const EvalReport r = evaluate_dataset(pred, gt, dataset, align);
  write_report(r, out);
  write_provenance(parent_or_dot(out), "evaluate", RunConfig{},
                   {{"pred", pred.string()}, {"gt", gt.string()}, {"align_gt", align ? "true" : "false"}});
  std::cout << r.dataset << ": mean IoU " << r.mean_iou << " over " << r.records.size() << " images";
  if (!r.missing_predictions.empty() || !r.missing_ground_truth.empty()) {
    std::cout << " (" << r.missing_predictions.size() << " without prediction, " << r.missing_ground_truth.size()
              << " without ground truth)";
  }
  std::cout << "\n";
  return 0;
}

int curves_cmd(const fs::path& report, const fs::path& out, const std::string& plot) {
  const EvalReport r = read_report(report);
  emit_curve(r, out, plot.empty() ? std::nullopt : std::optional<fs::path>(plot));
  write_provenance(parent_or_dot(out), "curves", RunConfig{}, {{"report", report.string()}, {"plot", plot}});
  std::cout << r.records.size() << " points -> " << out.string() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"VEGAN: visual-effect GAN training, inference, binarization and evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log-level", log_level, "debug | info | warn | error | off");

  Common common;
  std::function<int()> action;

  // make-dataset
  auto* mk = app.add_subcommand("make-dataset", "split an image/mask corpus and synthesize effect samples");
  fs::path mk_root, mk_out;
  bool mk_prop = false;
  std::string mk_name = "msra";
  mk->add_option("--root", mk_root, "corpus root (flat <id>.jpg + <id>.png, or images/ + masks/); config paths.root");
  mk->add_option("--out", mk_out, "output directory for manifests and samples; config paths.dataset");
  mk->add_flag("--proportional", mk_prop, "scale the split to the corpus size");
  mk->add_option("--name", mk_name, "dataset name prefix");
  add_common(mk, common, false);
  mk->callback([&] { action = [&] { return make_dataset(common, mk_root, mk_out, mk_prop, mk_name); }; });

  // fetch
  auto* fe = app.add_subcommand("fetch", "download tagged images from a Flickr-compatible API");
  WebQuery query;
  fs::path fe_out;
  bool fe_resume = false;
  int fe_retries = 5, fe_backoff = 1000;
  std::string fe_role;
  fe->add_option("--tag", query.tag, "search tag")->required();
  fe->add_option("--count", query.count, "number of images")->required();
  fe->add_option("--out", fe_out, "output directory")->required();
  fe->add_option("--endpoint", query.endpoint, "API base URL");
  fe->add_option("--credential-env", query.credential_env, "environment variable holding the API key");
  fe->add_option("--role", fe_role, "manifest role (domainA_inputs | domainB_samples)");
  fe->add_flag("--resume", fe_resume, "keep files whose checksum matches the existing manifest");
  fe->add_option("--retries", fe_retries, "retries on rate limiting");
  fe->add_option("--backoff-ms", fe_backoff, "initial retry delay in milliseconds");
  add_common(fe, common, false);
  fe->callback([&] { action = [&] { return fetch(common, query, fe_out, fe_resume, fe_retries, fe_backoff, fe_role); }; });

  // train
  auto* tr = app.add_subcommand("train", "train generator and critic on unpaired manifests");
  fs::path tr_a, tr_b, tr_out;
  std::optional<std::int64_t> tr_iters;
  std::optional<int> tr_size;
  std::string tr_resume;
  int tr_log_every = 100;
  tr->add_option("--a", tr_a, "domain A manifest (inputs); default <paths.dataset>/A.json");
  tr->add_option("--b", tr_b, "domain B manifest (effect samples); default <paths.dataset>/B.json");
  tr->add_option("--out", tr_out, "run directory; config paths.run");
  tr->add_option("--iters", tr_iters, "total iterations");
  tr->add_option("--image-size", tr_size, "training resolution");
  tr->add_option("--resume", tr_resume, "checkpoint to continue from");
  tr->add_option("--log-every", tr_log_every, "progress interval (0 disables)");
  add_common(tr, common, true);
  tr->callback([&] {
    action = [&] { return train_cmd(common, tr_a, tr_b, tr_out, tr_iters, tr_size, tr_resume, tr_log_every); };
  });

  // predict
  auto* pr = app.add_subcommand("predict", "write VER files for images");
  fs::path pr_ckpt, pr_in, pr_out;
  pr->add_option("--checkpoint", pr_ckpt, "trained checkpoint")->required();
  pr->add_option("--input", pr_in, "image, directory or manifest")->required();
  pr->add_option("--out", pr_out, "output directory")->required();
  pr->callback([&] { action = [&] { return predict_cmd(pr_ckpt, pr_in, pr_out); }; });

  // edit
  auto* ed = app.add_subcommand("edit", "compose input, VER visualization and edited image");
  fs::path ed_in, ed_ver, ed_out;
  ed->add_option("--input", ed_in, "image, directory or manifest")->required();
  ed->add_option("--ver", ed_ver, "VER file or directory of <stem>.ver")->required();
  ed->add_option("--out", ed_out, "output directory")->required();
  add_common(ed, common, false);
  ed->callback([&] { action = [&] { return edit_cmd(common, ed_in, ed_ver, ed_out); }; });

  // binarize
  auto* bi = app.add_subcommand("binarize", "turn VERs into figure-ground masks");
  fs::path bi_in, bi_ver, bi_out;
  bi->add_option("--input", bi_in, "image, directory or manifest")->required();
  bi->add_option("--ver", bi_ver, "VER file or directory of <stem>.ver")->required();
  bi->add_option("--out", bi_out, "output directory")->required();
  add_common(bi, common, false);
  bi->callback([&] { action = [&] { return binarize_cmd(common, bi_in, bi_ver, bi_out); }; });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "IoU of predicted masks against ground truth");
  fs::path ev_pred, ev_gt, ev_out;
  std::string ev_name;
  bool ev_align = false;
  ev->add_option("--pred", ev_pred, "directory of predicted PNG masks")->required();
  ev->add_option("--gt", ev_gt, "directory of ground-truth PNG masks")->required();
  ev->add_option("--out", ev_out, "report JSON")->required();
  ev->add_option("--dataset", ev_name, "dataset name in the report");
  ev->add_flag("--align-gt", ev_align, "resize and centre-crop ground truth to the prediction size");
  ev->callback([&] { action = [&] { return evaluate_cmd(ev_pred, ev_gt, ev_out, ev_name, ev_align); }; });

  // curves
  auto* cu = app.add_subcommand("curves", "sorted-IoU curve of a report");
  fs::path cu_report, cu_out;
  std::string cu_plot;
  cu->add_option("--report", cu_report, "report JSON")->required();
  cu->add_option("--out", cu_out, "curve CSV")->required();
  cu->add_option("--plot", cu_plot, "optional PNG plot");
  cu->callback([&] { action = [&] { return curves_cmd(cu_report, cu_out, cu_plot); }; });

  // synth
  auto* sy = app.add_subcommand("synth", "write a synthetic disk corpus (images/ + masks/)");
  fs::path sy_out;
  int sy_count = 200, sy_size = 64;
  sy->add_option("--out", sy_out, "output directory")->required();
  sy->add_option("--count", sy_count, "number of image/mask pairs");
  sy->add_option("--size", sy_size, "side length in pixels");
  add_common(sy, common, false);
  sy->callback([&] {
    action = [&] {
      const RunConfig config = common.resolve();
      write_synthetic_corpus(sy_out, sy_count, sy_size, config.seed);
      write_provenance(sy_out, "synth", config, {{"count", std::to_string(sy_count)}, {"size", std::to_string(sy_size)}});
      std::cout << sy_count << " pairs -> " << sy_out.string() << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (!log_level.empty()) {
    static const std::map<std::string, LogLevel> levels = {{"debug", LogLevel::Debug}, {"info", LogLevel::Info},
                                                           {"warn", LogLevel::Warn},   {"error", LogLevel::Error},
                                                           {"off", LogLevel::Off}};
    const auto it = levels.find(log_level);
    if (it == levels.end()) {
      std::cerr << "error: unknown log level '" << log_level << "'\n";
      return 2;
    }
    set_log_level(it->second);
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::InvalidArgument) return 2;
    if (e.code() == ErrorCode::PartialFetch) return 3;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("vegan");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace vegan
