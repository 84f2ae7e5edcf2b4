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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vegan/effects.hpp"
#include "vegan/image.hpp"
#include "vegan/rng.hpp"
#include "vegan/training.hpp"

namespace vegan {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

enum class ManifestRole { DomainA, DomainB, Test };
std::string_view to_string(ManifestRole role);
ManifestRole parse_role(std::string_view s);

struct ManifestEntry {
  /// Absolute in memory; stored relative to the manifest's directory.
  std::filesystem::path path;
  std::optional<std::filesystem::path> mask;
  std::optional<std::string> tag;
  std::string sha256;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string name;
  ManifestRole role = ManifestRole::DomainA;
  /// ISO-8601 UTC; taken from SOURCE_DATE_EPOCH so rebuilt manifests match.
  std::string created;
  std::string resample = "bilinear";
  std::vector<ManifestEntry> entries;

  bool operator==(const DatasetManifest&) const = default;
};

/// SOURCE_DATE_EPOCH as ISO-8601, or the Unix epoch when unset.
std::string reproducible_timestamp();

ManifestEntry make_entry(const std::filesystem::path& image, std::optional<std::filesystem::path> mask = std::nullopt,
                         std::optional<std::string> tag = std::nullopt);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
/// With `verify`, every path must exist and every checksum match
/// (MissingFile, ChecksumMismatch).
DatasetManifest load_manifest(const std::filesystem::path& path, bool verify = true);

struct SplitOptions {
  /// Scale the 500 / 4,750 / 4,750 split to the corpus size (5% test, the
  /// remainder halved) instead of requiring 10,000 pairs.
  bool proportional = false;
  std::string name = "msra";
};

struct MsraSplit {
  DatasetManifest domain_a;
  DatasetManifest domain_b_source;
  DatasetManifest test;
};

/// Image+mask pairs under `root`, either flat (<id>.jpg beside <id>.png) or
/// in images/ and masks/ subdirectories. Sorted by id; MissingMask names the
/// first image without one.
std::vector<std::pair<std::filesystem::path, std::filesystem::path>> find_pairs(const std::filesystem::path& root);

MsraSplit split_msra(const std::filesystem::path& root, Seed seed, const SplitOptions& options = {});

/// Writes synthesize_sample for every entry to out_dir/<stem>.png. The result
/// references the new images only, never the masks.
DatasetManifest build_effect_samples(const DatasetManifest& b_source, EffectKind effect,
                                     const std::filesystem::path& out_dir);

/// Short side resized to `size` (bilinear, half-pixel), then centre-cropped
/// to size×size.
ImageTensor preprocess_image(const ImageTensor& img, int size);
/// Same geometry for masks; resampled coverage above one half is figure.
BinaryMask preprocess_mask(const BinaryMask& mask, int size);

struct WebQuery {
  std::string tag;
  int count = 0;
  /// Base URL of a Flickr-compatible REST service, e.g. https://api.flickr.com.
  std::string endpoint = "https://api.flickr.com";
  /// Environment variable holding the API key; the key itself is never stored.
  std::string credential_env = "VEGAN_FLICKR_API_KEY";
  ManifestRole role = ManifestRole::DomainB;
};

struct FetchOptions {
  bool resume = true;
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  int per_page = 100;
  std::chrono::seconds timeout{30};
};

struct FetchResult {
  DatasetManifest manifest;
  std::filesystem::path manifest_path;
  int achieved = 0;
  int downloaded = 0;
  int reused = 0;
  int failed = 0;
};

/// Downloads up to query.count images for the tag into out_dir and writes
/// out_dir/manifest.json. Files already listed in a previous manifest with a
/// matching checksum are kept. Throws AuthFailure, RateLimited (after the
/// retries) and PartialFetch (after writing the manifest) when fewer than
/// count images could be collected.
FetchResult web_fetch(const WebQuery& query, const std::filesystem::path& out_dir, const FetchOptions& options = {});

/// Unpaired draws from two image lists, uniformly and independently per
/// domain, decoded and preprocessed to image_size. Undecodable files are
/// logged, counted and redrawn.
class UnpairedDataset : public PairSource {
 public:
  UnpairedDataset(std::vector<std::filesystem::path> domain_a, std::vector<std::filesystem::path> domain_b,
                  int image_size, Seed seed, std::size_t cache_capacity = 512);
  UnpairedDataset(const DatasetManifest& a, const DatasetManifest& b, int image_size, Seed seed,
                  std::size_t cache_capacity = 512);

  ImageTensor next_input() override;
  ImageTensor next_sample() override;
  nlohmann::json state() const override;
  void restore(const nlohmann::json& state) override;

  std::size_t last_input_index() const noexcept { return last_a_; }
  std::size_t last_sample_index() const noexcept { return last_b_; }
  std::size_t decode_failures() const noexcept { return failures_; }

 private:
  ImageTensor draw(const std::vector<std::filesystem::path>& paths, Rng& rng, std::size_t& last,
                   std::unordered_map<std::string, ImageTensor>& cache);

  std::vector<std::filesystem::path> a_, b_;
  int image_size_;
  Rng rng_a_, rng_b_;
  std::size_t cache_capacity_;
  std::unordered_map<std::string, ImageTensor> cache_a_, cache_b_;
  std::size_t last_a_ = 0, last_b_ = 0, failures_ = 0;
};

/// In-memory counterpart of UnpairedDataset for already preprocessed images.
class MemoryPairSource : public PairSource {
 public:
  MemoryPairSource(std::vector<ImageTensor> domain_a, std::vector<ImageTensor> domain_b, Seed seed);

  ImageTensor next_input() override;
  ImageTensor next_sample() override;
  nlohmann::json state() const override;
  void restore(const nlohmann::json& state) override;

 private:
  std::vector<ImageTensor> a_, b_;
  Rng rng_a_, rng_b_;
};

}  // namespace vegan
