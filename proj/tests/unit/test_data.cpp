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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>

#include "support.hpp"
#include "vegan/data.hpp"
#include "vegan/image_io.hpp"
#include "vegan/synthetic.hpp"

using namespace vegan;
using vegan::testing::code_of;
using vegan::testing::random_image;
using vegan::testing::TempDir;

namespace {

std::set<std::string> stems(const DatasetManifest& m) {
  std::set<std::string> out;
  for (const auto& e : m.entries) out.insert(e.path.stem().string());
  return out;
}

// Minimal stand-in for the photo search service, serving `available` PNGs.
class FakePhotoService {
 public:
  explicit FakePhotoService(int available) : available_(available) {
    TempDir scratch;
    Rng rng(1);
    save_image(random_image(rng, 12, 10), scratch / "p.png");
    png_ = read_file_bytes(scratch / "p.png");

    server_.Get("/services/rest/", [this](const httplib::Request& req, httplib::Response& res) {
      ++searches;
      if (forced_status != 0) {
        res.status = forced_status;
        return;
      }
      if (req.get_param_value("api_key") != "good-key") {
        res.set_content(R"({"stat":"fail","code":100,"message":"Invalid API Key"})", "application/json");
        return;
      }
      const int page = std::stoi(req.get_param_value("page"));
      const int per_page = std::stoi(req.get_param_value("per_page"));
      nlohmann::json photos = nlohmann::json::array();
      for (int i = (page - 1) * per_page; i < std::min(available_, page * per_page); ++i) {
        photos.push_back({{"id", std::to_string(1000 + i)}, {"url_o", origin() + "/img/" + std::to_string(i) + ".png"}});
      }
      const int pages = (available_ + per_page - 1) / per_page;
      nlohmann::json body = {{"stat", "ok"}, {"photos", {{"page", page}, {"pages", pages}, {"photo", photos}}}};
      res.set_content(body.dump(), "application/json");
    });
    server_.Get(R"(/img/(\d+)\.png)", [this](const httplib::Request&, httplib::Response& res) {
      ++downloads;
      res.set_content(std::string(png_.begin(), png_.end()), "image/png");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakePhotoService() {
    server_.stop();
    thread_.join();
  }

  std::string origin() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> searches{0};
  std::atomic<int> downloads{0};
  std::atomic<int> forced_status{0};

 private:
  int available_;
  std::vector<std::uint8_t> png_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

WebQuery query_for(const FakePhotoService& svc, int count) {
  WebQuery q;
  q.tag = "sunset";
  q.count = count;
  q.endpoint = svc.origin();
  q.credential_env = "VEGAN_TEST_PHOTO_KEY";
  return q;
}

FetchOptions quick_options() {
  FetchOptions o;
  o.max_retries = 2;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.per_page = 4;
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("sha256 of known inputs") {
    CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string abc = "abc";
    CHECK(sha256_hex({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()}) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("manifest round trip with relative paths") {
    TempDir dir;
    write_synthetic_corpus(dir / "corpus", 3, 16, Seed{1});
    DatasetManifest m;
    m.name = "tiny";
    m.role = ManifestRole::Test;
    m.created = reproducible_timestamp();
    for (const auto& [img, mask] : find_pairs(dir / "corpus")) m.entries.push_back(make_entry(img, mask, "t"));
    save_manifest(m, dir / "m.json");
    const DatasetManifest back = load_manifest(dir / "m.json");
    CHECK(back == m);
    std::ifstream in(dir / "m.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["entries"][0]["path"] == "corpus/images/00000.png");
    CHECK(j["role"] == "test");

    // Tampering is caught on load.
    save_image(ImageTensor(16, 16, 0.5f), dir / "corpus" / "images" / "00001.png");
    CHECK(code_of([&] { load_manifest(dir / "m.json"); }) == ErrorCode::ChecksumMismatch);
    CHECK(load_manifest(dir / "m.json", false).entries.size() == 3u);
    std::filesystem::remove(dir / "corpus" / "images" / "00001.png");
    CHECK(code_of([&] { load_manifest(dir / "m.json"); }) == ErrorCode::MissingFile);
  }

  TEST_CASE("timestamps follow SOURCE_DATE_EPOCH") {
    const char* old = std::getenv("SOURCE_DATE_EPOCH");
    const std::string saved = old ? old : "";
    ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
    CHECK(reproducible_timestamp() == "1970-01-02T00:00:00Z");
    ::unsetenv("SOURCE_DATE_EPOCH");
    CHECK(reproducible_timestamp() == "1970-01-01T00:00:00Z");
    if (old) ::setenv("SOURCE_DATE_EPOCH", saved.c_str(), 1);
  }

  TEST_CASE("pair discovery") {
    TempDir dir;
    write_synthetic_corpus(dir / "nested", 4, 16, Seed{2});
    CHECK(find_pairs(dir / "nested").size() == 4u);
    std::filesystem::create_directories(dir / "flat");
    Rng rng(1);
    for (const std::string id : {"b", "a"}) {
      save_image(random_image(rng, 8, 8), dir / "flat" / (id + ".jpg"));
      save_mask(BinaryMask(8, 8), dir / "flat" / (id + ".png"));
    }
    const auto flat = find_pairs(dir / "flat");
    REQUIRE(flat.size() == 2u);
    CHECK(flat[0].first.stem() == "a");
    save_image(random_image(rng, 8, 8), dir / "flat" / "c.jpg");
    CHECK(code_of([&] { find_pairs(dir / "flat"); }) == ErrorCode::MissingMask);
    std::filesystem::remove(dir / "nested" / "masks" / "00002.png");
    CHECK(code_of([&] { find_pairs(dir / "nested"); }) == ErrorCode::MissingMask);
  }

  TEST_CASE("MSRA-style split sizes, disjointness and determinism") {
    TempDir dir;
    write_synthetic_corpus(dir / "c", 40, 8, Seed{3});
    CHECK(code_of([&] { split_msra(dir / "c", Seed{1}); }) == ErrorCode::InsufficientImages);
    const MsraSplit s = split_msra(dir / "c", Seed{1}, {.proportional = true});
    CHECK(s.test.entries.size() == 2u);
    CHECK(s.domain_a.entries.size() == 19u);
    CHECK(s.domain_b_source.entries.size() == 19u);
    std::set<std::string> all;
    for (const auto* m : {&s.test, &s.domain_a, &s.domain_b_source}) {
      for (const auto& id : stems(*m)) CHECK(all.insert(id).second);
    }
    CHECK(all.size() == 40u);
    for (const auto& e : s.domain_a.entries) CHECK_FALSE(e.mask.has_value());
    for (const auto& e : s.test.entries) CHECK(e.mask.has_value());
    for (const auto& e : s.domain_b_source.entries) CHECK(e.mask.has_value());
    CHECK(s.domain_a.role == ManifestRole::DomainA);
    CHECK(s.domain_a.name == "msra-A");

    const MsraSplit again = split_msra(dir / "c", Seed{1}, {.proportional = true});
    CHECK(again.test == s.test);
    CHECK(again.domain_a == s.domain_a);
    const MsraSplit other = split_msra(dir / "c", Seed{2}, {.proportional = true});
    CHECK_FALSE(stems(other.test) == stems(s.test));
    CHECK(code_of([&] {
            write_synthetic_corpus(dir / "few", 3, 8, Seed{1});
            split_msra(dir / "few", Seed{1}, {.proportional = true});
          }) == ErrorCode::InsufficientImages);
  }

  TEST_CASE("effect samples are written without masks") {
    TempDir dir;
    write_synthetic_corpus(dir / "c", 4, 16, Seed{4});
    DatasetManifest src;
    src.name = "b";
    src.role = ManifestRole::DomainB;
    for (const auto& [img, mask] : find_pairs(dir / "c")) src.entries.push_back(make_entry(img, mask));
    for (EffectKind k : {EffectKind::BlackBackground, EffectKind::ColorSelectivo}) {
      const auto out = build_effect_samples(src, k, dir / std::string(to_string(k)));
      REQUIRE(out.entries.size() == 4u);
      for (std::size_t i = 0; i < 4; ++i) {
        const auto& e = out.entries[i];
        CHECK_FALSE(e.mask.has_value());
        CHECK(e.tag == std::string(to_string(k)));
        const ImageTensor img = load_image(e.path);
        const BinaryMask gt = load_mask(*src.entries[i].mask);
        for (int y = 0; y < 16; ++y) {
          for (int x = 0; x < 16; ++x) {
            if (gt.at(y, x)) continue;
            if (k == EffectKind::BlackBackground) {
              CHECK(img.at(0, y, x) == 0.0f);
              CHECK(img.at(2, y, x) == 0.0f);
            } else {
              CHECK(std::abs(img.at(0, y, x) - img.at(1, y, x)) <= 2.0f / 255.0f);
              CHECK(std::abs(img.at(1, y, x) - img.at(2, y, x)) <= 2.0f / 255.0f);
            }
          }
        }
      }
    }
    DatasetManifest bare = src;
    bare.entries[1].mask.reset();
    CHECK(code_of([&] { build_effect_samples(bare, EffectKind::Defocus, dir / "x"); }) == ErrorCode::MissingMask);
  }

  TEST_CASE("preprocessing resizes the short side then centre crops") {
    Rng rng(2);
    const ImageTensor wide = random_image(rng, 30, 60);
    const ImageTensor out = preprocess_image(wide, 20);
    CHECK(out.height() == 20);
    CHECK(out.width() == 20);
    CHECK(out.valid());
    CHECK(preprocess_image(out, 20) == out);
    const ImageTensor flat(50, 40, 0.25f);
    const ImageTensor small = preprocess_image(flat, 16);
    for (float v : small.values()) CHECK(v == doctest::Approx(0.25f));
    BinaryMask m(40, 80);
    for (int y = 0; y < 40; ++y) {
      for (int x = 40; x < 80; ++x) m.set(y, x, true);
    }
    const BinaryMask pm = preprocess_mask(m, 10);
    CHECK(pm.height() == 10);
    CHECK(pm.width() == 10);
    // The crop keeps the middle 40 of 80 columns; the right half is figure.
    CHECK(pm.count() == 50u);
  }

  TEST_CASE("unpaired sampling is uniform, independent and resumable") {
    TempDir dir;
    write_synthetic_corpus(dir / "a", 2, 8, Seed{5});
    write_synthetic_corpus(dir / "b", 7, 8, Seed{6});
    std::vector<std::filesystem::path> a, b;
    for (const auto& [img, mask] : find_pairs(dir / "a")) a.push_back(img);
    for (const auto& [img, mask] : find_pairs(dir / "b")) b.push_back(img);
    UnpairedDataset ds(a, b, 8, Seed{3});
    int first = 0;
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      ds.next_input();
      ds.next_sample();
      const double x = static_cast<double>(ds.last_input_index()), y = static_cast<double>(ds.last_sample_index());
      first += ds.last_input_index() == 0;
      sa += x;
      sb += y;
      sab += x * y;
      saa += x * x;
      sbb += y * y;
    }
    CHECK(first >= 430);
    CHECK(first <= 570);
    const double cov = sab / n - (sa / n) * (sb / n);
    const double corr = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) * (sbb / n - (sb / n) * (sb / n)));
    CHECK(std::abs(corr) < 0.1);

    const auto state = ds.state();
    std::vector<std::size_t> expect;
    for (int i = 0; i < 10; ++i) {
      ds.next_input();
      expect.push_back(ds.last_input_index());
    }
    UnpairedDataset resumed(a, b, 8, Seed{99});
    resumed.restore(state);
    for (int i = 0; i < 10; ++i) {
      resumed.next_input();
      CHECK(resumed.last_input_index() == expect[i]);
    }
  }

  TEST_CASE("undecodable files are skipped and counted") {
    TempDir dir;
    write_synthetic_corpus(dir / "a", 1, 8, Seed{5});
    write_text_atomic(dir / "broken.png", "not an image");
    const std::vector<std::filesystem::path> a{dir / "a" / "images" / "00000.png", dir / "broken.png"};
    UnpairedDataset ds(a, a, 8, Seed{1});
    for (int i = 0; i < 20; ++i) CHECK(ds.next_input().height() == 8);
    CHECK(ds.decode_failures() >= 1u);
    CHECK(code_of([] { UnpairedDataset(std::vector<std::filesystem::path>{}, {"x"}, 8, Seed{1}); }) == ErrorCode::InsufficientImages);
  }

  TEST_CASE("web fetch downloads, resumes and repairs") {
    FakePhotoService svc(20);
    ::setenv("VEGAN_TEST_PHOTO_KEY", "good-key", 1);
    TempDir dir;
    const auto r = web_fetch(query_for(svc, 10), dir.path(), quick_options());
    CHECK(r.achieved == 10);
    CHECK(r.downloaded == 10);
    CHECK(svc.downloads == 10);
    const DatasetManifest m = load_manifest(r.manifest_path);
    CHECK(m.entries.size() == 10u);
    CHECK(m.role == ManifestRole::DomainB);
    for (const auto& e : m.entries) CHECK(e.tag == std::optional<std::string>("sunset"));
    std::ifstream raw(r.manifest_path);
    const std::string text((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());
    CHECK(text.find("good-key") == std::string::npos);

    const auto again = web_fetch(query_for(svc, 10), dir.path(), quick_options());
    CHECK(again.downloaded == 0);
    CHECK(again.reused == 10);
    CHECK(svc.downloads == 10);

    write_text_atomic(m.entries[3].path, "corrupted");
    const auto repaired = web_fetch(query_for(svc, 10), dir.path(), quick_options());
    CHECK(repaired.downloaded == 1);
    CHECK(svc.downloads == 11);
    CHECK(load_manifest(repaired.manifest_path).entries.size() == 10u);
  }

  TEST_CASE("web fetch error handling") {
    FakePhotoService svc(5);
    TempDir dir;
    ::unsetenv("VEGAN_TEST_PHOTO_KEY");
    CHECK(code_of([&] { web_fetch(query_for(svc, 3), dir.path(), quick_options()); }) == ErrorCode::AuthFailure);
    ::setenv("VEGAN_TEST_PHOTO_KEY", "wrong", 1);
    CHECK(code_of([&] { web_fetch(query_for(svc, 3), dir.path(), quick_options()); }) == ErrorCode::AuthFailure);
    ::setenv("VEGAN_TEST_PHOTO_KEY", "good-key", 1);

    svc.forced_status = 401;
    CHECK(code_of([&] { web_fetch(query_for(svc, 3), dir.path(), quick_options()); }) == ErrorCode::AuthFailure);
    svc.forced_status = 429;
    const int before = svc.searches;
    CHECK(code_of([&] { web_fetch(query_for(svc, 3), dir.path(), quick_options()); }) == ErrorCode::RateLimited);
    CHECK(svc.searches - before == 3);
    svc.forced_status = 0;

    CHECK(code_of([&] { web_fetch(query_for(svc, 8), dir / "partial", quick_options()); }) ==
          ErrorCode::PartialFetch);
    CHECK(load_manifest(dir / "partial" / "manifest.json").entries.size() == 5u);
    ::unsetenv("VEGAN_TEST_PHOTO_KEY");
  }
}
