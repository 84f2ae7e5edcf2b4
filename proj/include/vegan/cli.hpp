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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vegan/binarize.hpp"
#include "vegan/effects.hpp"
#include "vegan/models.hpp"
#include "vegan/rng.hpp"
#include "vegan/training.hpp"

namespace vegan {

inline constexpr const char* kVersion = "0.1.0";

/// Settings shared by the commands. The text form is one `key = value` per
/// line with `#` comments; the canonical form lists every key, sorted, as
/// `key=value`, so parsing it and printing again gives the same bytes.
struct RunConfig {
  EffectKind effect = EffectKind::BlackBackground;
  Variant variant = Variant::V4;
  Seed seed{0};
  Hyperparams hp;
  int generator_width = 64;
  int n_res_blocks = 9;
  int discriminator_width = 64;
  std::string backbone;
  std::int64_t checkpoint_every = 500;
  BinarizeParams binarize;
  /// Corpus root for make-dataset, the directory holding A.json/B.json, and
  /// the training run directory. Command-line flags take precedence.
  std::string root_path;
  std::string dataset_path;
  std::string run_path;

  /// Applies one setting; InvalidArgument names unknown keys and bad values.
  void set(const std::string& key, const std::string& value);
  std::string canonical() const;
  TrainConfig train_config(const std::filesystem::path& out_dir) const;

  static std::vector<std::string> keys();
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
};

/// provenance.json beside a command's outputs: command, canonical config,
/// seed, arguments and library versions.
void write_provenance(const std::filesystem::path& dir, const std::string& command, const RunConfig& config,
                      const std::map<std::string, std::string>& arguments);

/// Parses argv and runs the selected subcommand. Returns the exit status:
/// 0 on success, 2 for usage errors, 3 for a partial fetch, 1 otherwise.
int run_cli(int argc, const char* const* argv);
/// Same, with the arguments after the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace vegan
