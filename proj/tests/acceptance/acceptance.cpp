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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).
//
//   vegan_acceptance [--only 1,3,5] [--work DIR] [--cli PATH] [--keep]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vegan/binarize.hpp"
#include "vegan/data.hpp"
#include "vegan/effects.hpp"
#include "vegan/evaluate.hpp"
#include "vegan/image_io.hpp"
#include "vegan/log.hpp"
#include "vegan/nn/ops.hpp"
#include "vegan/synthetic.hpp"
#include "vegan/training.hpp"

namespace fs = std::filesystem;
using namespace vegan;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImageTensor random_image(Rng& rng, int h, int w, double lo = 0.0, double hi = 1.0) {
  ImageTensor img(h, w);
  for (auto& v : img.values()) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

bool all_equal(const ImageTensor& img, float value, float tol = 0.0f) {
  return std::all_of(img.values().begin(), img.values().end(), [&](float v) { return std::abs(v - value) <= tol; });
}

float max_diff(const ImageTensor& a, const ImageTensor& b) {
  float m = 0.0f;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

// --- 1: editor algebra -------------------------------------------------------

Outcome editor_algebra() {
  Rng rng = Rng::derive(Seed{1}, "acceptance-editor");
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  };

  const ImageTensor img = random_image(rng, 24, 24);
  expect(all_equal(apply_effect(img, EffectKind::BlackBackground), 0.0f), "black background zero");

  const ImageTensor gray_px(1, 1, 0.2f);
  expect(apply_effect(gray_px, EffectKind::ColorSelectivo) == gray_px, "gray fixed point of luma");

  const ImageTensor constant(20, 20, 0.37f);
  expect(apply_effect(constant, EffectKind::Defocus) == constant, "defocus keeps constants");

  ImageTensor impulse(21, 21, 0.0f);
  for (int c = 0; c < 3; ++c) impulse.at(c, 10, 10) = 1.0f;
  const ImageTensor spread = apply_effect(impulse, EffectKind::Defocus);
  bool window_ok = true;
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 21; ++x) {
      const bool inside = std::abs(y - 10) <= 5 && std::abs(x - 10) <= 5;
      const float want = inside ? 1.0f / 121.0f : 0.0f;
      window_ok = window_ok && std::abs(spread.at(0, y, x) - want) <= 1e-7f;
    }
  }
  expect(window_ok, "impulse spreads to 1/121");

  const ImageTensor eff = apply_effect(img, EffectKind::Defocus);
  expect(max_diff(compose(img, eff, VerMap(24, 24, VerMap::open_bound())), img) <= 1e-6f, "ver -> 1 gives I");
  expect(compose(img, eff, VerMap(24, 24, 0.0f)) == eff, "ver = 0 gives I_effect");

  ImageTensor gray_img(24, 24);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) {
      const float v = static_cast<float>(rng.uniform());
      for (int c = 0; c < 3; ++c) gray_img.at(c, y, x) = v;
    }
  }
  bool gray_ok = true;
  for (int t = 0; t < 5; ++t) {
    VerMap ver(24, 24);
    for (auto& v : ver.values()) v = static_cast<float>(rng.uniform(-0.999, 0.999));
    gray_ok = gray_ok && compose(gray_img, apply_effect(gray_img, EffectKind::ColorSelectivo), ver) == gray_img;
  }
  expect(gray_ok, "grayscale input under colour selectivo");

  expect(all_equal(compose(ImageTensor(1, 1, 0.8f), ImageTensor(1, 1, 0.2f), VerMap(1, 1, -VerMap::open_bound())),
                   0.0f),
         "clamp to zero");

  expect(all_equal(compose_alpha(ImageTensor(1, 1, 1.0f), ImageTensor(1, 1, 0.0f), AlphaMap(1, 1, 0.5f)), 0.5f),
         "alpha midpoint");
  expect(max_diff(compose_alpha(img, eff, AlphaMap(24, 24, 1.0f - 1e-7f)), img) <= 1e-6f, "alpha -> 1 gives I");
  expect(max_diff(compose_alpha(img, eff, AlphaMap(24, 24, 1e-7f)), eff) <= 1e-6f, "alpha -> 0 gives I_effect");

  // The alpha and VER formulations coincide with ver = alpha on (0,1).
  float worst = 0.0f;
  for (int t = 0; t < 100; ++t) {
    const ImageTensor a = random_image(rng, 8, 8), e = random_image(rng, 8, 8);
    AlphaMap alpha(8, 8);
    VerMap ver(8, 8);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const float v = static_cast<float>(rng.uniform(0.001, 0.999));
        alpha.at(y, x) = v;
        ver.at(y, x) = v;
      }
    }
    worst = std::max(worst, max_diff(compose_alpha(a, e, alpha), compose(a, e, ver)));
  }
  expect(worst < 1e-6f, "alpha/ver identity");

  std::string detail = "max |compose_alpha - compose| " + fmt("%.2e", worst) + " over 100 triples";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " [" + f + "]";
  }
  return {failed.empty(), detail};
}

// --- 2: gradient penalty -------------------------------------------------------

Outcome gradient_penalty_oracle() {
  Rng rng = Rng::derive(Seed{2}, "acceptance-gp");
  nn::Tensor fake({3, 4, 4}), real({3, 4, 4});
  for (auto& v : fake.values()) v = rng.uniform();
  for (auto& v : real.values()) v = rng.uniform();
  const Critic twice_sum = [](const nn::Var& x) { return nn::scale(nn::sum(x), 2.0); };
  const double want = std::pow(2.0 * std::sqrt(48.0) - 1.0, 2);
  const double got = gradient_penalty(twice_sum, fake, real, rng.uniform()).item();
  const double rel_gp = std::abs(got - want) / want;

  // Input-gradient norm of a small random critic against central differences.
  const Discriminator d(DiscriminatorSpec::for_variant(Variant::V1, 32, 4), Seed{3});
  nn::Tensor x({3, 32, 32});
  for (auto& v : x.values()) v = rng.uniform();
  const nn::Var leaf = nn::Var::leaf(x);
  const auto g = nn::grad(d.score(leaf), {leaf})[0];
  double auto_sq = 0.0, fd_sq = 0.0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    auto_sq += g.value()[i] * g.value()[i];
    nn::Tensor up = x, down = x;
    up[i] += h;
    down[i] -= h;
    const double diff = (d.score(nn::Var::constant(up)).item() - d.score(nn::Var::constant(down)).item()) / (2 * h);
    fd_sq += diff * diff;
  }
  const double rel_norm = std::abs(std::sqrt(auto_sq) - std::sqrt(fd_sq)) / std::sqrt(fd_sq);
  return {rel_gp <= 1e-4 && rel_norm <= 1e-3,
          "penalty " + fmt("%.6f", got) + " vs " + fmt("%.6f", want) + " (rel " + fmt("%.1e", rel_gp) +
              "); |grad D| autodiff vs finite differences rel " + fmt("%.1e", rel_norm)};
}

// --- 3: propagation ----------------------------------------------------------

std::vector<double> neumann(const SuperpixelGraph& g, const std::vector<double>& r, double theta2) {
  const int n = g.n;
  const auto w = g.dense_weights();
  const auto d = g.degrees();
  auto series = [&](std::vector<double> v) {
    for (int i = 0; i < n; ++i) v[i] /= d[i];
    std::vector<double> total = v, term = v, next(n);
    for (int k = 0; k < 6000; ++k) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += w[static_cast<std::size_t>(i) * n + j] * term[j];
        next[i] = theta2 * s / d[i];
      }
      std::swap(term, next);
      for (int i = 0; i < n; ++i) total[i] += term[i];
    }
    return total;
  };
  const auto num = series(r), den = series(std::vector<double>(n, 1.0));
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = num[i] / den[i];
  return out;
}

Outcome propagation_oracle() {
  Rng rng = Rng::derive(Seed{3}, "acceptance-propagation");
  const double theta2 = 0.99;
  double worst = 0.0;
  bool invariants = true;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.index(19));
    std::vector<std::array<double, 3>> means(n);
    for (auto& m : means) m = {rng.uniform(0, 0.4), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    std::vector<std::pair<int, int>> adj;
    for (int i = 1; i < n; ++i) adj.emplace_back(static_cast<int>(rng.index(i)), i);
    for (int k = 0; k < n; ++k) adj.emplace_back(static_cast<int>(rng.index(n)), static_cast<int>(rng.index(n)));
    adj.erase(std::remove_if(adj.begin(), adj.end(), [](auto p) { return p.first == p.second; }), adj.end());
    const auto g = graph_from_means(means, adj, 10.0);
    std::vector<double> r(n);
    for (auto& v : r) v = rng.uniform(-0.99, 0.99);
    const auto got = propagate(g, r, theta2);
    const auto want = neumann(g, r, theta2);
    const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(std::abs(want[i]), 1e-12));
      invariants = invariants && got[i] >= lo - 1e-12 && got[i] <= hi + 1e-12;
    }
    const double c = rng.uniform(-0.9, 0.9);
    for (double v : propagate(g, std::vector<double>(n, c), theta2)) invariants = invariants && std::abs(v - c) <= 1e-12;
  }
  const auto two = graph_from_means({{0, 0, 0}, {0.07, 0.01, 0}}, {{0, 1}}, 10.0);
  const auto pair = propagate(two, {1.0, 0.0}, theta2);
  const double two_err = std::max(std::abs(pair[0] - 1.0 / (1.0 + theta2)), std::abs(pair[1] - theta2 / (1.0 + theta2)));
  return {worst <= 1e-6 && two_err <= 1e-9 && invariants,
          "max rel diff vs Neumann series " + fmt("%.1e", worst) + " on 50 graphs; two-node error " +
              fmt("%.1e", two_err) + "; range and fixed point " + (invariants ? "hold" : "VIOLATED")};
}

// --- 4: IoU ------------------------------------------------------------------

Outcome iou_oracle() {
  Rng rng = Rng::derive(Seed{4}, "acceptance-iou");
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    BinaryMask p(32, 32), q(32, 32);
    const double dp = rng.uniform(), dq = rng.uniform();
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.set(i, rng.uniform() < dp);
      q.set(i, rng.uniform() < dq);
    }
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      inter += p[i] && q[i];
      uni += p[i] || q[i];
    }
    const double want = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    mismatches += iou(p, q) != want;
  }
  BinaryMask a(2, 3), b(2, 3), c(2, 3);
  a.set(0, 0, true);
  a.set(0, 1, true);
  b.set(0, 1, true);
  b.set(0, 2, true);
  c.set(1, 2, true);
  const bool analytic = iou(a, a) == 1.0 && iou(a, c) == 0.0 && iou(a, b) == 1.0 / 3.0;
  return {mismatches == 0 && analytic, std::to_string(mismatches) + " mismatches in 1000 random pairs; analytic cases " +
                                           (analytic ? "exact" : "WRONG")};
}

// --- 5: binarization self-consistency -----------------------------------------

Outcome binarize_self_consistency() {
  Rng rng = Rng::derive(Seed{5}, "acceptance-binarize");
  const int size = 224;
  double total = 0.0, worst = 1.0;
  for (int i = 0; i < 20; ++i) {
    const SyntheticImage s = synthetic_two_region(rng, size);
    VerMap v(size, size);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) v.at(y, x) = s.mask.at(y, x) ? 0.99f : -0.99f;
    }
    const double q = iou(binarize(s.image, v), s.mask);
    total += q;
    worst = std::min(worst, q);
  }
  const double mean = total / 20.0;
  return {mean >= 0.95, "mean IoU " + fmt("%.4f", mean) + " (min " + fmt("%.4f", worst) + ") on 20 images at 224x224"};
}

// --- 6 and 8: toy pipeline -----------------------------------------------------

struct ToyRun {
  fs::path dir;
  fs::path log;
  fs::path final_checkpoint;
  std::vector<fs::path> manifests;
};

constexpr int kToySize = 64;
constexpr std::int64_t kToyIters = 2000;

ToyRun toy_pipeline(const fs::path& dir, Seed seed) {
  fs::remove_all(dir);
  write_synthetic_corpus(dir / "corpus", 200, kToySize, seed);
  const MsraSplit split = split_msra(dir / "corpus", seed, {.proportional = true, .name = "toy"});
  ToyRun run;
  run.dir = dir;
  save_manifest(split.domain_a, dir / "data" / "A.json");
  save_manifest(split.domain_b_source, dir / "data" / "Bsource.json");
  save_manifest(split.test, dir / "data" / "test.json");
  const DatasetManifest b = build_effect_samples(split.domain_b_source, EffectKind::BlackBackground, dir / "samples");
  save_manifest(b, dir / "data" / "B.json");
  for (const char* name : {"A.json", "Bsource.json", "test.json", "B.json"}) run.manifests.push_back(dir / "data" / name);

  TrainConfig config;
  config.effect = EffectKind::BlackBackground;
  config.variant = Variant::V4;
  config.seed = seed;
  config.hp.image_size = kToySize;
  config.hp.total_iters = kToyIters;
  config.generator_width = 16;
  config.n_res_blocks = 2;
  config.discriminator_width = 16;
  config.checkpoint_every = 500;
  config.out_dir = dir / "run";
  UnpairedDataset source(split.domain_a, b, kToySize, seed);
  const TrainResult result = train(config, source);
  run.log = result.log_path;
  run.final_checkpoint = result.checkpoints.back();
  return run;
}

std::optional<ToyRun> first_run;

ToyRun& toy_run(const fs::path& work) {
  if (!first_run) first_run = toy_pipeline(work / "toy_run_1", Seed{0});
  return *first_run;
}

Outcome toy_training(const fs::path& work) {
  ToyRun& run = toy_run(work);
  // All losses finite.
  std::ifstream in(run.log);
  std::string line;
  std::getline(in, line);
  std::int64_t rows = 0;
  bool finite = true;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) finite = finite && std::isfinite(std::stod(cell));
  }

  // Held-out images come from their own stream, disjoint from the corpus.
  const Generator g = load_generator(run.final_checkpoint);
  Rng held = Rng::derive(Seed{0}, "acceptance-held-out");
  Rng noise = Rng::derive(Seed{0}, "acceptance-random-baseline");
  BinarizeParams params;
  // Superpixel size matched to 400 regions at 224x224.
  params.n_target = static_cast<int>(std::lround(400.0 * kToySize * kToySize / (224.0 * 224.0)));
  double model = 0.0, baseline = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SyntheticImage s = synthetic_disk(held, kToySize);
    model += iou(binarize(s.image, predict_ver(g, s.image), params), s.mask);
    VerMap random(kToySize, kToySize);
    for (auto& v : random.values()) v = static_cast<float>(noise.uniform(-0.99, 0.99));
    baseline += iou(binarize(s.image, random, params), s.mask);
  }
  model /= 20.0;
  baseline /= 20.0;
  return {finite && rows == kToyIters && model >= 0.50 && baseline <= 0.25,
          std::to_string(rows) + " iterations, losses " + (finite ? "finite" : "NON-FINITE") + "; mean IoU " +
              fmt("%.4f", model) + " (floor 0.50) vs random baseline " + fmt("%.4f", baseline) + " (ceiling 0.25)"};
}

// --- 7: CLI dry run -------------------------------------------------------------

Outcome cli_dry_run(const fs::path& work, const std::string& cli) {
  if (cli.empty() || !fs::exists(cli)) return {false, "CLI executable not found: " + cli};
  const fs::path dir = work / "cli_dry_run";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "toy.cfg");
    cfg << "# toy-scale settings for the dry run\n"
        << "effect = black_background\nvariant = V4\nseed = 3\n"
        << "hp.image_size = 32\nhp.total_iters = 4\nhp.n_critic = 2\n"
        << "model.generator_width = 4\nmodel.n_res_blocks = 1\nmodel.discriminator_width = 4\n"
        << "train.checkpoint_every = 2\nbinarize.n_target = 25\n"
        << "paths.root = " << (dir / "corpus").string() << "\n"
        << "paths.dataset = " << (dir / "data").string() << "\n"
        << "paths.run = " << (dir / "run").string() << "\n";
  }
  const std::string d = dir.string(), cfg = "--config " + d + "/toy.cfg";
  const std::vector<std::pair<std::string, std::string>> steps = {
      {"synth", "synth --out " + d + "/corpus --count 40 --size 48 " + cfg},
      {"make-dataset", "make-dataset --proportional " + cfg},
      {"train", "train --log-every 0 " + cfg},
      {"predict", "predict --checkpoint " + d + "/run/ckpt_00000004.vgck --input " + d + "/data/test.json --out " + d +
                      "/ver"},
      {"edit", "edit --input " + d + "/data/test.json --ver " + d + "/ver --out " + d + "/edit " + cfg},
      {"binarize", "binarize --input " + d + "/data/test.json --ver " + d + "/ver --out " + d + "/masks " + cfg},
      {"evaluate", "evaluate --pred " + d + "/masks --gt " + d + "/data/test.json --align-gt --out " + d +
                       "/eval/report.json"},
      {"curves", "curves --report " + d + "/eval/report.json --out " + d + "/eval/curve.csv --plot " + d +
                     "/eval/curve.png"},
  };
  for (const auto& [name, args] : steps) {
    const std::string command = "\"" + cli + "\" --log-level warn " + args + " > " + d + "/" + name + ".out 2>&1";
    if (std::system(command.c_str()) != 0) return {false, "step '" + name + "' failed; see " + d + "/" + name + ".out"};
  }
  const fs::path expected[] = {dir / "data" / "A.json", dir / "data" / "B.json", dir / "run" / "train_log.csv",
                               dir / "eval" / "report.json", dir / "eval" / "curve.csv", dir / "eval" / "curve.png",
                               dir / "masks" / "binarize.provenance.json"};
  for (const auto& p : expected) {
    if (!fs::exists(p)) return {false, "missing output " + p.string()};
  }
  return {true, std::to_string(steps.size()) + " commands (synth, make-dataset, train, predict, edit, binarize, "
                                               "evaluate, curves) exited 0 with all outputs present"};
}

// --- 8: determinism ---------------------------------------------------------------

Outcome determinism(const fs::path& work) {
  const ToyRun& a = toy_run(work);
  const ToyRun b = toy_pipeline(work / "toy_run_2", Seed{0});
  std::vector<std::string> differing;
  for (std::size_t i = 0; i < a.manifests.size(); ++i) {
    if (slurp(a.manifests[i]) != slurp(b.manifests[i])) differing.push_back(a.manifests[i].filename().string());
  }
  const bool logs_equal = slurp(a.log) == slurp(b.log);
  const bool weights_equal = slurp(a.final_checkpoint) == slurp(b.final_checkpoint);
  std::string detail = std::to_string(a.manifests.size() - differing.size()) + "/" +
                       std::to_string(a.manifests.size()) + " manifests bit-identical; loss logs " +
                       (logs_equal ? "identical" : "DIFFER") + "; final checkpoints " +
                       (weights_equal ? "identical" : "differ");
  return {differing.empty() && logs_equal, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only, cli = VEGAN_CLI_PATH;
  fs::path work = fs::temp_directory_path() / "vegan_acceptance";
  bool keep = false;
  app.add_option("--only", only, "comma-separated criterion numbers");
  app.add_option("--work", work, "scratch directory");
  app.add_option("--cli", cli, "path of the vegan executable");
  app.add_flag("--keep", keep, "keep the scratch directory");
  CLI11_PARSE(app, argc, argv);

  set_log_level(LogLevel::Warn);
  std::set<int> selected;
  std::stringstream ss(only);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) selected.insert(std::stoi(item));
  }
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"editor algebra", editor_algebra},
      {"gradient-penalty oracle", gradient_penalty_oracle},
      {"propagation oracle", propagation_oracle},
      {"IoU oracle", iou_oracle},
      {"binarization self-consistency", binarize_self_consistency},
      {"toy training smoke", [&] { return toy_training(work); }},
      {"CLI dry run of the reproduction recipe", [&] { return cli_dry_run(work, cli); }},
      {"determinism", [&] { return determinism(work); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !outcome.pass;
    std::printf("criterion %d (%s): %s  %s  [%.1f s]\n", number, criteria[i].first.c_str(),
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str(), secs);
    std::fflush(stdout);
  }
  if (!keep) fs::remove_all(work);
  return failures;
}
