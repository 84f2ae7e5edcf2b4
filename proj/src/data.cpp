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

#include "vegan/data.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <ctime>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>

#include "vegan/image_io.hpp"
#include "vegan/kernels.hpp"
#include "vegan/log.hpp"

namespace vegan {

namespace fs = std::filesystem;

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::IoFailure, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file_bytes(path)); }

std::string_view to_string(ManifestRole role) {
  switch (role) {
    case ManifestRole::DomainA: return "domainA_inputs";
    case ManifestRole::DomainB: return "domainB_samples";
    case ManifestRole::Test: return "test";
  }
  return "";
}

ManifestRole parse_role(std::string_view s) {
  if (s == "domainA_inputs") return ManifestRole::DomainA;
  if (s == "domainB_samples") return ManifestRole::DomainB;
  if (s == "test") return ManifestRole::Test;
  fail(ErrorCode::UnsupportedFormat, "unknown manifest role '" + std::string(s) + "'");
}

std::string reproducible_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 0) fail(ErrorCode::InvalidArgument, "SOURCE_DATE_EPOCH must be a non-negative integer");
    t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ManifestEntry make_entry(const fs::path& image, std::optional<fs::path> mask, std::optional<std::string> tag) {
  ManifestEntry e;
  e.path = fs::absolute(image).lexically_normal();
  if (mask) e.mask = fs::absolute(*mask).lexically_normal();
  e.tag = std::move(tag);
  e.sha256 = sha256_file(image);
  return e;
}

namespace {

std::string relative_to(const fs::path& p, const fs::path& dir) {
  return fs::absolute(p).lexically_normal().lexically_relative(dir).generic_string();
}

}  // namespace

void save_manifest(const DatasetManifest& m, const fs::path& path) {
  const fs::path dir = fs::absolute(path).parent_path().lexically_normal();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : m.entries) {
    nlohmann::ordered_json j;
    j["path"] = relative_to(e.path, dir);
    if (e.mask) j["mask"] = relative_to(*e.mask, dir);
    if (e.tag) j["tag"] = *e.tag;
    j["sha256"] = e.sha256;
    entries.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["role"] = std::string(to_string(m.role));
  j["created"] = m.created;
  j["resample"] = m.resample;
  j["entries"] = std::move(entries);
  fs::create_directories(dir);
  write_text_atomic(path, j.dump(2) + "\n");
}

DatasetManifest load_manifest(const fs::path& path, bool verify) {
  const auto bytes = read_file_bytes(path);
  const fs::path dir = fs::absolute(path).parent_path().lexically_normal();
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    m.name = j.at("name").get<std::string>();
    m.role = parse_role(j.at("role").get<std::string>());
    m.created = j.at("created").get<std::string>();
    m.resample = j.at("resample").get<std::string>();
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.path = (dir / e.at("path").get<std::string>()).lexically_normal();
      if (e.contains("mask")) entry.mask = (dir / e.at("mask").get<std::string>()).lexically_normal();
      if (e.contains("tag")) entry.tag = e.at("tag").get<std::string>();
      entry.sha256 = e.at("sha256").get<std::string>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::UnsupportedFormat, path.string() + ": " + e.what());
  }
  if (verify) {
    for (const auto& e : m.entries) {
      if (!fs::is_regular_file(e.path)) fail(ErrorCode::MissingFile, e.path.string() + " listed in " + path.string());
      if (e.mask && !fs::is_regular_file(*e.mask)) {
        fail(ErrorCode::MissingFile, e.mask->string() + " listed in " + path.string());
      }
      if (sha256_file(e.path) != e.sha256) fail(ErrorCode::ChecksumMismatch, e.path.string());
    }
  }
  return m;
}

// --- MSRA split -------------------------------------------------------------

namespace {

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

bool is_image_ext(const std::string& ext) { return ext == ".jpg" || ext == ".jpeg" || ext == ".png"; }

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::pair<fs::path, fs::path>> find_pairs(const fs::path& root) {
  if (!fs::is_directory(root)) fail(ErrorCode::MissingFile, root.string() + " is not a directory");
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(root / "images") && fs::is_directory(root / "masks")) {
    for (const auto& img : sorted_files(root / "images")) {
      if (!is_image_ext(lower_ext(img))) continue;
      const fs::path mask = root / "masks" / (img.stem().string() + ".png");
      if (!fs::is_regular_file(mask)) fail(ErrorCode::MissingMask, "no mask for " + img.string());
      pairs.emplace_back(img, mask);
    }
  } else {
    // Flat layout: JPEG images with PNG masks of the same stem.
    std::set<std::string> pngs;
    const auto files = sorted_files(root);
    for (const auto& f : files) {
      if (lower_ext(f) == ".png") pngs.insert(f.stem().string());
    }
    for (const auto& f : files) {
      const std::string ext = lower_ext(f);
      if (ext != ".jpg" && ext != ".jpeg") continue;
      if (!pngs.count(f.stem().string())) fail(ErrorCode::MissingMask, "no mask for " + f.string());
      pairs.emplace_back(f, root / (f.stem().string() + ".png"));
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first.stem().string() < b.first.stem().string(); });
  return pairs;
}

MsraSplit split_msra(const fs::path& root, Seed seed, const SplitOptions& options) {
  auto pairs = find_pairs(root);
  const std::size_t n = pairs.size();
  std::size_t n_test = 500, n_a = 4750, n_b = 4750;
  if (options.proportional) {
    n_test = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n)));
    n_a = (n - n_test) / 2;
    n_b = n - n_test - n_a;
  } else if (n < 10000) {
    fail(ErrorCode::InsufficientImages,
         std::to_string(n) + " image/mask pairs under " + root.string() + "; 10000 needed (or use proportional mode)");
  }
  if (n_test == 0 || n_a == 0 || n_b == 0) {
    fail(ErrorCode::InsufficientImages, std::to_string(n) + " pairs are too few for a three-way split");
  }
  Rng rng = Rng::derive(seed, "msra-split");
  for (std::size_t i = n; i > 1; --i) std::swap(pairs[i - 1], pairs[rng.index(i)]);
  if (n > n_test + n_a + n_b) log_info(std::to_string(n - n_test - n_a - n_b) + " pairs left out of the split");

  const std::string created = reproducible_timestamp();
  auto make = [&](const std::string& suffix, ManifestRole role, std::size_t begin, std::size_t count, bool masks) {
    DatasetManifest m;
    m.name = options.name + "-" + suffix;
    m.role = role;
    m.created = created;
    m.entries.resize(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
      const auto& [img, mask] = pairs[begin + i];
      m.entries[i] = make_entry(img, masks ? std::optional<fs::path>(mask) : std::nullopt);
    }
    std::sort(m.entries.begin(), m.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    return m;
  };
  MsraSplit out;
  out.test = make("test", ManifestRole::Test, 0, n_test, true);
  out.domain_a = make("A", ManifestRole::DomainA, n_test, n_a, false);
  out.domain_b_source = make("Bsource", ManifestRole::DomainB, n_test + n_a, n_b, true);
  return out;
}

DatasetManifest build_effect_samples(const DatasetManifest& b_source, EffectKind effect, const fs::path& out_dir) {
  for (const auto& e : b_source.entries) {
    if (!e.mask) fail(ErrorCode::MissingMask, "manifest entry " + e.path.string() + " has no mask");
  }
  fs::create_directories(out_dir);
  DatasetManifest m;
  m.name = b_source.name + "-" + std::string(to_string(effect));
  m.role = ManifestRole::DomainB;
  m.created = reproducible_timestamp();
  m.resample = b_source.resample;
  m.entries.resize(b_source.entries.size());
  std::vector<std::string> errors(b_source.entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(b_source.entries.size()); ++i) {
    const auto& e = b_source.entries[i];
    try {
      const ImageTensor img = load_image(e.path);
      const BinaryMask mask = load_mask(*e.mask);
      const fs::path out = out_dir / (e.path.stem().string() + ".png");
      save_image(synthesize_sample(img, mask, effect), out);
      m.entries[i] = make_entry(out, std::nullopt, std::string(to_string(effect)));
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  }
  for (const auto& err : errors) {
    if (!err.empty()) throw std::runtime_error(err);
  }
  return m;
}

// --- preprocessing ----------------------------------------------------------

namespace {

struct CropGeometry {
  int rh, rw, y0, x0;
};

CropGeometry crop_geometry(int h, int w, int size) {
  if (size < 1) fail(ErrorCode::InvalidArgument, "target size must be positive");
  if (h < 1 || w < 1) fail(ErrorCode::DegenerateImage, "empty image");
  CropGeometry g{};
  if (h <= w) {
    g.rh = size;
    g.rw = std::max(size, static_cast<int>(std::lround(static_cast<double>(w) * size / h)));
  } else {
    g.rw = size;
    g.rh = std::max(size, static_cast<int>(std::lround(static_cast<double>(h) * size / w)));
  }
  g.y0 = (g.rh - size) / 2;
  g.x0 = (g.rw - size) / 2;
  return g;
}

std::vector<float> resize_crop_plane(std::span<const float> src, int h, int w, int size, const CropGeometry& g) {
  std::vector<float> resized(static_cast<std::size_t>(g.rh) * g.rw);
  kernels::resize_bilinear(src, h, w, resized, g.rh, g.rw);
  std::vector<float> out(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    std::copy_n(resized.begin() + static_cast<std::ptrdiff_t>(y + g.y0) * g.rw + g.x0, size,
                out.begin() + static_cast<std::ptrdiff_t>(y) * size);
  }
  return out;
}

}  // namespace

ImageTensor preprocess_image(const ImageTensor& img, int size) {
  const CropGeometry g = crop_geometry(img.height(), img.width(), size);
  ImageTensor out(size, size);
  for (int c = 0; c < ImageTensor::kChannels; ++c) {
    const auto plane = resize_crop_plane(img.plane(c), img.height(), img.width(), size, g);
    std::copy(plane.begin(), plane.end(), out.plane(c).begin());
  }
  return out;
}

BinaryMask preprocess_mask(const BinaryMask& mask, int size) {
  const CropGeometry g = crop_geometry(mask.height(), mask.width(), size);
  std::vector<float> src(mask.size());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] = mask[i] ? 1.0f : 0.0f;
  const auto plane = resize_crop_plane(src, mask.height(), mask.width(), size, g);
  BinaryMask out(size, size);
  for (std::size_t i = 0; i < plane.size(); ++i) out.set(i, plane[i] > 0.5f);
  return out;
}

// --- web fetch --------------------------------------------------------------

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) fail(ErrorCode::InvalidArgument, "not an absolute URL: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

class Http {
 public:
  Http(const FetchOptions& options) : options_(options) {}

  // GET with retries on 429 and 5xx. Auth errors and other client errors are
  // surfaced immediately.
  std::string get(const std::string& origin, const std::string& target, const httplib::Params& params = {}) {
    auto backoff = options_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      httplib::Client& client = client_for(origin);
      const auto res = params.empty() ? client.Get(target) : client.Get(target, params, httplib::Headers{});
      int status = res ? res->status : 0;
      if (res && status == 200) return res->body;
      if (status == 401 || status == 403) fail(ErrorCode::AuthFailure, "request rejected with HTTP " + std::to_string(status));
      const bool retryable = status == 0 || status == 429 || status >= 500;
      if (!retryable) fail(ErrorCode::IoFailure, origin + target + ": HTTP " + std::to_string(status));
      if (attempt >= options_.max_retries) {
        if (status == 429) fail(ErrorCode::RateLimited, "still rate limited after " + std::to_string(attempt) + " retries");
        fail(ErrorCode::IoFailure, origin + target + (status ? ": HTTP " + std::to_string(status) : ": connection failed"));
      }
      log_warn(origin + ": " + (status == 429 ? std::string("rate limited") : "HTTP " + std::to_string(status)) +
               ", retrying in " + std::to_string(backoff.count()) + " ms");
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }

 private:
  httplib::Client& client_for(const std::string& origin) {
    auto it = clients_.find(origin);
    if (it == clients_.end()) {
      auto c = std::make_unique<httplib::Client>(origin);
      c->set_follow_location(true);
      c->set_connection_timeout(options_.timeout);
      c->set_read_timeout(options_.timeout);
      it = clients_.emplace(origin, std::move(c)).first;
    }
    return *it->second;
  }

  const FetchOptions& options_;
  std::map<std::string, std::unique_ptr<httplib::Client>> clients_;
};

std::string photo_url(const nlohmann::json& photo) {
  for (const char* key : {"url_o", "url_l", "url_c"}) {
    if (photo.contains(key) && photo[key].is_string()) return photo[key].get<std::string>();
  }
  return {};
}

std::string id_string(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

bool safe_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

}  // namespace

FetchResult web_fetch(const WebQuery& query, const fs::path& out_dir, const FetchOptions& options) {
  if (query.count <= 0) fail(ErrorCode::InvalidArgument, "count must be positive");
  if (query.tag.empty()) fail(ErrorCode::InvalidArgument, "tag must not be empty");
  const char* key = std::getenv(query.credential_env.c_str());
  if (!key || !*key) fail(ErrorCode::AuthFailure, "credential variable " + query.credential_env + " is not set");

  fs::create_directories(out_dir);
  FetchResult result;
  result.manifest_path = out_dir / "manifest.json";

  std::map<std::string, std::string> known;  // file name -> sha256 from a previous run
  if (options.resume && fs::exists(result.manifest_path)) {
    try {
      for (const auto& e : load_manifest(result.manifest_path, false).entries) known[e.path.filename().string()] = e.sha256;
    } catch (const Error& e) {
      log_warn("ignoring unreadable previous manifest: " + std::string(e.what()));
    }
  }

  const Url api = split_url(query.endpoint);
  Http http(options);
  DatasetManifest& m = result.manifest;
  m.name = query.tag;
  m.role = query.role;
  m.created = reproducible_timestamp();
  std::set<std::string> seen;

  for (int page = 1; result.achieved < query.count; ++page) {
    const std::string base = api.target == "/" ? "" : api.target;
    const std::string body = http.get(api.origin, base + "/services/rest/",
                                      {{"method", "flickr.photos.search"},
                                       {"api_key", key},
                                       {"tags", query.tag},
                                       {"extras", "url_o,url_l"},
                                       {"per_page", std::to_string(options.per_page)},
                                       {"page", std::to_string(page)},
                                       {"format", "json"},
                                       {"nojsoncallback", "1"}});
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::IoFailure, "search response is not JSON");
    }
    if (j.value("stat", "") != "ok") {
      const int code = j.value("code", 0);
      const std::string msg = j.value("message", "search failed");
      if (code == 100 || code == 98) fail(ErrorCode::AuthFailure, msg);
      fail(ErrorCode::IoFailure, "search failed: " + msg);
    }
    const auto& photos = j.at("photos");
    const auto& list = photos.at("photo");
    for (const auto& photo : list) {
      if (result.achieved >= query.count) break;
      const std::string id = id_string(photo.at("id"));
      const std::string url = photo_url(photo);
      if (!safe_id(id) || url.empty() || !seen.insert(id).second) continue;
      std::string ext = lower_ext(fs::path(split_url(url).target.substr(0, split_url(url).target.find('?'))));
      if (!is_image_ext(ext)) ext = ".jpg";
      const fs::path file = out_dir / (id + ext);
      const auto prior = known.find(file.filename().string());
      if (prior != known.end() && fs::is_regular_file(file) && sha256_file(file) == prior->second) {
        m.entries.push_back({fs::absolute(file).lexically_normal(), std::nullopt, query.tag, prior->second});
        ++result.reused;
        ++result.achieved;
        continue;
      }
      try {
        const Url u = split_url(url);
        const std::string bytes = http.get(u.origin, u.target);
        const std::span<const std::uint8_t> view(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
        decode_image(view, url);
        write_file_atomic(file, view);
        m.entries.push_back({fs::absolute(file).lexically_normal(), std::nullopt, query.tag, sha256_hex(view)});
        ++result.downloaded;
        ++result.achieved;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::AuthFailure || e.code() == ErrorCode::RateLimited) throw;
        log_warn("skipping photo " + id + ": " + e.what());
        ++result.failed;
      }
    }
    const int pages = photos.value("pages", page);
    if (list.empty() || page >= pages) break;
  }
  save_manifest(m, result.manifest_path);
  if (result.achieved < query.count) {
    fail(ErrorCode::PartialFetch, "collected " + std::to_string(result.achieved) + " of " + std::to_string(query.count) +
                                      " images for '" + query.tag + "'; manifest written to " +
                                      result.manifest_path.string());
  }
  return result;
}

// --- unpaired sampling ------------------------------------------------------

UnpairedDataset::UnpairedDataset(std::vector<fs::path> domain_a, std::vector<fs::path> domain_b, int image_size,
                                 Seed seed, std::size_t cache_capacity)
    : a_(std::move(domain_a)),
      b_(std::move(domain_b)),
      image_size_(image_size),
      rng_a_(Rng::derive(seed, "domain-a")),
      rng_b_(Rng::derive(seed, "domain-b")),
      cache_capacity_(cache_capacity) {
  if (a_.empty() || b_.empty()) fail(ErrorCode::InsufficientImages, "both domains need at least one image");
  if (image_size_ < 1) fail(ErrorCode::InvalidArgument, "image_size must be positive");
}

namespace {

std::vector<fs::path> manifest_paths(const DatasetManifest& m) {
  std::vector<fs::path> out;
  for (const auto& e : m.entries) out.push_back(e.path);
  return out;
}

}  // namespace

UnpairedDataset::UnpairedDataset(const DatasetManifest& a, const DatasetManifest& b, int image_size, Seed seed,
                                 std::size_t cache_capacity)
    : UnpairedDataset(manifest_paths(a), manifest_paths(b), image_size, seed, cache_capacity) {}

ImageTensor UnpairedDataset::draw(const std::vector<fs::path>& paths, Rng& rng, std::size_t& last,
                                  std::unordered_map<std::string, ImageTensor>& cache) {
  const std::size_t max_attempts = 4 * paths.size() + 16;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    last = static_cast<std::size_t>(rng.index(paths.size()));
    const std::string key = paths[last].string();
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    try {
      ImageTensor img = preprocess_image(load_image(paths[last]), image_size_);
      if (cache.size() < cache_capacity_) cache.emplace(key, img);
      return img;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MissingFile) throw;
      ++failures_;
      log_warn("skipping undecodable " + key + ": " + e.what());
    }
  }
  fail(ErrorCode::DecodeFailure, "no decodable image after " + std::to_string(max_attempts) + " draws");
}

ImageTensor UnpairedDataset::next_input() { return draw(a_, rng_a_, last_a_, cache_a_); }
ImageTensor UnpairedDataset::next_sample() { return draw(b_, rng_b_, last_b_, cache_b_); }

nlohmann::json UnpairedDataset::state() const {
  return {{"rng_a", rng_a_.serialize()}, {"rng_b", rng_b_.serialize()}, {"decode_failures", failures_}};
}

void UnpairedDataset::restore(const nlohmann::json& state) {
  rng_a_.deserialize(state.at("rng_a").get<std::string>());
  rng_b_.deserialize(state.at("rng_b").get<std::string>());
  failures_ = state.value("decode_failures", std::size_t{0});
}

MemoryPairSource::MemoryPairSource(std::vector<ImageTensor> domain_a, std::vector<ImageTensor> domain_b, Seed seed)
    : a_(std::move(domain_a)),
      b_(std::move(domain_b)),
      rng_a_(Rng::derive(seed, "domain-a")),
      rng_b_(Rng::derive(seed, "domain-b")) {
  if (a_.empty() || b_.empty()) fail(ErrorCode::InsufficientImages, "both domains need at least one image");
}

ImageTensor MemoryPairSource::next_input() { return a_[rng_a_.index(a_.size())]; }
ImageTensor MemoryPairSource::next_sample() { return b_[rng_b_.index(b_.size())]; }

nlohmann::json MemoryPairSource::state() const {
  return {{"rng_a", rng_a_.serialize()}, {"rng_b", rng_b_.serialize()}};
}

void MemoryPairSource::restore(const nlohmann::json& state) {
  rng_a_.deserialize(state.at("rng_a").get<std::string>());
  rng_b_.deserialize(state.at("rng_b").get<std::string>());
}

}  // namespace vegan
