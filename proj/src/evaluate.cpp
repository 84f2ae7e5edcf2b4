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

#include "vegan/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "vegan/data.hpp"
#include "vegan/image_io.hpp"
#include "vegan/log.hpp"

namespace vegan {

namespace fs = std::filesystem;

double iou(const BinaryMask& p, const BinaryMask& q) {
  require_same_dims(p, q, "iou");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] && q[i];
    uni += p[i] || q[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> EvalReport::curve() const {
  std::vector<double> c;
  c.reserve(records.size());
  for (const auto& r : records) c.push_back(r.iou);
  std::sort(c.begin(), c.end());
  return c;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json rec = nlohmann::json::array();
  for (const auto& r : records) rec.push_back({{"id", r.id}, {"iou", r.iou}});
  return {{"dataset", dataset},
          {"mean_iou", mean_iou},
          {"records", rec},
          {"missing_predictions", missing_predictions},
          {"missing_ground_truth", missing_ground_truth}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.dataset = j.at("dataset").get<std::string>();
  r.mean_iou = j.at("mean_iou").get<double>();
  for (const auto& e : j.at("records")) r.records.push_back({e.at("id").get<std::string>(), e.at("iou").get<double>()});
  r.missing_predictions = j.value("missing_predictions", std::vector<std::string>{});
  r.missing_ground_truth = j.value("missing_ground_truth", std::vector<std::string>{});
  return r;
}

EvalReport make_report(std::string dataset, std::vector<EvalRecord> records) {
  EvalReport r;
  r.dataset = std::move(dataset);
  std::sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) { return a.id < b.id; });
  r.records = std::move(records);
  double sum = 0.0;
  for (const auto& rec : r.records) sum += rec.iou;
  r.mean_iou = r.records.empty() ? 0.0 : sum / static_cast<double>(r.records.size());
  return r;
}

namespace {

std::map<std::string, fs::path> masks_by_stem(const fs::path& dir) {
  if (dir.extension() == ".json" && fs::is_regular_file(dir)) {
    std::map<std::string, fs::path> out;
    for (const auto& e : load_manifest(dir).entries) {
      if (!e.mask) fail(ErrorCode::MissingMask, "manifest entry " + e.path.string() + " has no mask");
      out.emplace(e.path.stem().string(), *e.mask);
    }
    return out;
  }
  if (!fs::is_directory(dir)) fail(ErrorCode::MissingFile, dir.string() + " is not a directory");
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".png") continue;
    out.emplace(entry.path().stem().string(), entry.path());
  }
  return out;
}

}  // namespace

EvalReport evaluate_dataset(const fs::path& pred_dir, const fs::path& gt_dir, const std::string& dataset,
                            bool align_ground_truth) {
  const auto pred = masks_by_stem(pred_dir);
  const auto gt = masks_by_stem(gt_dir);
  std::vector<std::string> shared, missing_pred, missing_gt;
  for (const auto& [stem, path] : gt) {
    if (pred.count(stem)) shared.push_back(stem);
    else missing_pred.push_back(stem);
  }
  for (const auto& [stem, path] : pred) {
    if (!gt.count(stem)) missing_gt.push_back(stem);
  }
  if (shared.empty()) {
    fail(ErrorCode::EmptyIntersection, "no common mask names between " + pred_dir.string() + " and " + gt_dir.string());
  }
  auto report_missing = [](const std::vector<std::string>& ids, const std::string& what) {
    if (ids.empty()) return;
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(ids.size(), 5); ++i) list += (i ? ", " : "") + ids[i];
    log_warn(std::to_string(ids.size()) + " " + what + " (" + list + (ids.size() > 5 ? ", ..." : "") + ")");
  };
  report_missing(missing_pred, "ground-truth masks without prediction");
  report_missing(missing_gt, "predictions without ground truth");

  std::vector<EvalRecord> records(shared.size());
  std::vector<std::exception_ptr> errors(shared.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(shared.size()); ++i) {
    try {
      const BinaryMask p = load_mask(pred.at(shared[i]));
      BinaryMask q = load_mask(gt.at(shared[i]));
      if (align_ground_truth && p.height() == p.width() && (q.height() != p.height() || q.width() != p.width())) {
        q = preprocess_mask(q, p.height());
      }
      if (p.height() != q.height() || p.width() != q.width()) {
        fail(ErrorCode::DimensionMismatch, pred.at(shared[i]).string() + " vs " + gt.at(shared[i]).string());
      }
      records[i] = {shared[i], iou(p, q)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  EvalReport r = make_report(dataset.empty() ? (gt_dir.extension() == ".json" ? gt_dir.stem() : gt_dir.filename()).string() : dataset, std::move(records));
  r.missing_predictions = std::move(missing_pred);
  r.missing_ground_truth = std::move(missing_gt);
  return r;
}

void write_report(const EvalReport& report, const fs::path& path) {
  write_text_atomic(path, report.to_json().dump(2) + "\n");
}

EvalReport read_report(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return EvalReport::from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::UnsupportedFormat, path.string() + ": " + e.what());
  }
}

namespace {

void draw_line(ImageTensor& img, int x0, int y0, int x1, int y1, std::array<float, 3> color) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    if (x0 >= 0 && x0 < img.width() && y0 >= 0 && y0 < img.height()) {
      for (int c = 0; c < 3; ++c) img.at(c, y0, x0) = color[c];
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void render_curve(const std::vector<double>& curve, const fs::path& path) {
  constexpr int kW = 480, kH = 320, kMargin = 30;
  ImageTensor img(kH, kW, 1.0f);
  const std::array<float, 3> axis{0.0f, 0.0f, 0.0f}, grid{0.85f, 0.85f, 0.85f}, line{0.1f, 0.3f, 0.8f};
  const int left = kMargin, right = kW - kMargin / 2, top = kMargin / 2, bottom = kH - kMargin;
  for (int t = 1; t < 4; ++t) {
    const int y = bottom - (bottom - top) * t / 4;
    draw_line(img, left, y, right, y, grid);
  }
  draw_line(img, left, bottom, right, bottom, axis);
  draw_line(img, left, bottom, left, top, axis);
  auto px = [&](std::size_t i) {
    const double f = curve.size() < 2 ? 0.5 : static_cast<double>(i) / static_cast<double>(curve.size() - 1);
    return left + static_cast<int>(std::lround(f * (right - left)));
  };
  auto py = [&](double v) { return bottom - static_cast<int>(std::lround(v * (bottom - top))); };
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) draw_line(img, px(i), py(curve[i]), px(i + 1), py(curve[i + 1]), line);
  if (curve.size() == 1) draw_line(img, px(0) - 2, py(curve[0]), px(0) + 2, py(curve[0]), line);
  save_image(img, path);
}

}  // namespace

void emit_curve(const EvalReport& report, const fs::path& csv_path, const std::optional<fs::path>& plot_path) {
  if (report.records.empty()) fail(ErrorCode::InvalidArgument, "cannot emit the curve of an empty report");
  const auto curve = report.curve();
  std::string csv = "rank,iou\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, curve[i]);
    csv += buf;
  }
  write_text_atomic(csv_path, csv);
  if (plot_path) render_curve(curve, *plot_path);
}

std::vector<double> read_curve(const fs::path& csv_path) {
  const auto bytes = read_file_bytes(csv_path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  std::getline(in, line);
  if (line != "rank,iou") fail(ErrorCode::UnsupportedFormat, csv_path.string() + ": missing rank,iou header");
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorCode::UnsupportedFormat, csv_path.string() + ": bad row '" + line + "'");
    out.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return out;
}

double curve_area(const std::vector<double>& curve) {
  if (curve.size() < 2) return curve.empty() ? 0.0 : curve[0];
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) area += 0.5 * (curve[i] + curve[i + 1]);
  return area / static_cast<double>(curve.size() - 1);
}

}  // namespace vegan
