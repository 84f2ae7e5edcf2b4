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

#include <array>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "vegan/image.hpp"

namespace vegan {

/// Per-pixel superpixel ids in [0, count), each id a connected region.
struct SuperpixelLabeling {
  int rows = 0;
  int cols = 0;
  int count = 0;
  std::vector<int> labels;

  int height() const noexcept { return rows; }
  int width() const noexcept { return cols; }
  int at(int y, int x) const { return labels[static_cast<std::size_t>(y) * cols + x]; }
};

struct GraphEdge {
  int i;
  int j;
  double weight;
};

/// Region adjacency graph with colour affinities. Only adjacent pairs carry
/// an edge (i < j); every other entry of W is zero.
struct SuperpixelGraph {
  int n = 0;
  std::vector<std::array<double, 3>> lab_means;
  std::vector<GraphEdge> edges;
  double theta1 = 10.0;
  double lab_scale = 255.0;

  /// Row sums of W.
  std::vector<double> degrees() const;
  /// Dense symmetric W, for small graphs.
  std::vector<double> dense_weights() const;
};

/// CIE Lab (D65) of an sRGB colour in [0,1]; L in [0,100].
std::array<double, 3> srgb_to_lab(double r, double g, double b);

struct SlicParams {
  int n_target = 400;
  double compactness = 10.0;
  int iterations = 10;
};

SuperpixelLabeling oversegment(const ImageTensor& img, int n_target, const SlicParams& params = {});

/// Lab means are divided by `lab_scale` before ω = exp(−θ₁‖cᵢ − cⱼ‖).
SuperpixelGraph build_graph(const ImageTensor& img, const SuperpixelLabeling& labeling, double theta1,
                            double lab_scale = 255.0);
/// Same weights from precomputed (already scaled) means and an adjacency list.
SuperpixelGraph graph_from_means(std::vector<std::array<double, 3>> means,
                                 const std::vector<std::pair<int, int>>& adjacency, double theta1);

std::vector<double> mean_ver(const SuperpixelLabeling& labeling, const VerMap& ver);

/// r̂ = D_A⁻¹ A r with A = (D − θ₂W)⁻¹, solved per connected component.
/// Isolated superpixels keep their value. SingularSystem when θ₂ = 1 leaves a
/// component's system singular.
std::vector<double> propagate(const SuperpixelGraph& graph, const std::vector<double>& r, double theta2);

struct ThresholdResult {
  BinaryMask mask;
  double threshold = 0.0;
  std::vector<bool> figure;
};

/// Figure iff r̂ᵢ > mean(r̂); an all-equal r̂ gives an empty mask.
ThresholdResult threshold(const std::vector<double>& r_hat, const SuperpixelLabeling& labeling);

struct BinarizeParams {
  int n_target = 400;
  double theta1 = 10.0;
  double theta2 = 0.99;
  double compactness = 10.0;
  double lab_scale = 255.0;
};

struct BinarizeResult {
  BinaryMask mask;
  int n_superpixels = 0;
  double threshold = 0.0;
  BinarizeParams params;

  nlohmann::json sidecar() const;
};

BinarizeResult binarize_detailed(const ImageTensor& img, const VerMap& ver, const BinarizeParams& params = {});
BinaryMask binarize(const ImageTensor& img, const VerMap& ver, const BinarizeParams& params = {});

void write_sidecar(const BinarizeResult& result, const std::filesystem::path& path);

}  // namespace vegan
