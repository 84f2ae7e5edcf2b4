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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vegan/image.hpp"

namespace vegan {

/// |P ∩ Q| / |P ∪ Q|, with two empty masks scoring 1.
double iou(const BinaryMask& p, const BinaryMask& q);

struct EvalRecord {
  std::string id;
  double iou = 0.0;
};

struct EvalReport {
  std::string dataset;
  /// Sorted by id.
  std::vector<EvalRecord> records;
  double mean_iou = 0.0;
  /// Stems present on one side only.
  std::vector<std::string> missing_predictions;
  std::vector<std::string> missing_ground_truth;

  /// IoU values in ascending order.
  std::vector<double> curve() const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

/// Builds a report from already computed records (sorted, mean filled in).
EvalReport make_report(std::string dataset, std::vector<EvalRecord> records);

/// Pairs PNG masks of the two directories by file stem. `gt_dir` may also be
/// a manifest, whose mask paths are keyed by their image's stem. Throws
/// EmptyIntersection when no stem is shared. With `align_ground_truth`, a
/// ground-truth mask whose size differs from a square prediction goes
/// through the training resize and centre crop first.
EvalReport evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                            const std::string& dataset = "", bool align_ground_truth = false);

void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

/// CSV "rank,iou" of the ascending curve, and a rendered plot when
/// `plot_path` is given.
void emit_curve(const EvalReport& report, const std::filesystem::path& csv_path,
                const std::optional<std::filesystem::path>& plot_path = std::nullopt);
std::vector<double> read_curve(const std::filesystem::path& csv_path);

/// Trapezoidal area under the curve with rank normalized to [0,1].
double curve_area(const std::vector<double>& curve);

}  // namespace vegan
