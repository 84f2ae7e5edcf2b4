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

#include "vegan/binarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "vegan/image_io.hpp"
#include "vegan/log.hpp"

namespace vegan {

namespace {

constexpr int kDenseSolveLimit = 2000;

double srgb_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

double lab_f(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

std::vector<std::array<double, 3>> image_lab(const ImageTensor& img) {
  std::vector<std::array<double, 3>> lab(img.plane_size());
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lab.size()); ++i) {
    lab[i] = srgb_to_lab(r[i], g[i], b[i]);
  }
  return lab;
}

double sq(double v) { return v * v; }

double lab_dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return sq(a[0] - b[0]) + sq(a[1] - b[1]) + sq(a[2] - b[2]);
}

// Relabels 4-connected components; fragments below `min_size` join the
// label of the already-visited neighbour of their first pixel.
int enforce_connectivity(std::vector<int>& labels, int h, int w, std::size_t min_size) {
  const std::size_t n = labels.size();
  std::vector<int> out(n, -1);
  std::vector<std::size_t> component;
  int next = 0;
  const int dy[4] = {-1, 0, 1, 0}, dx[4] = {0, -1, 0, 1};
  for (std::size_t start = 0; start < n; ++start) {
    if (out[start] >= 0) continue;
    const int sy = static_cast<int>(start / w), sx = static_cast<int>(start % w);
    int adjacent = -1;
    for (int k = 0; k < 4 && adjacent < 0; ++k) {
      const int y = sy + dy[k], x = sx + dx[k];
      if (y >= 0 && y < h && x >= 0 && x < w && out[static_cast<std::size_t>(y) * w + x] >= 0) {
        adjacent = out[static_cast<std::size_t>(y) * w + x];
      }
    }
    component.clear();
    component.push_back(start);
    out[start] = next;
    for (std::size_t q = 0; q < component.size(); ++q) {
      const int cy = static_cast<int>(component[q] / w), cx = static_cast<int>(component[q] % w);
      for (int k = 0; k < 4; ++k) {
        const int y = cy + dy[k], x = cx + dx[k];
        if (y < 0 || y >= h || x < 0 || x >= w) continue;
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        if (out[p] < 0 && labels[p] == labels[start]) {
          out[p] = next;
          component.push_back(p);
        }
      }
    }
    if (component.size() < min_size && adjacent >= 0) {
      for (std::size_t p : component) out[p] = adjacent;
    } else {
      ++next;
    }
  }
  labels = std::move(out);
  return next;
}

std::vector<int> components(const SuperpixelGraph& graph) {
  std::vector<int> parent(graph.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : graph.edges) {
    if (e.weight > 0.0) parent[find(e.i)] = find(e.j);
  }
  std::vector<int> comp(graph.n);
  for (int v = 0; v < graph.n; ++v) comp[v] = find(v);
  return comp;
}

}  // namespace

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
  const double lr = srgb_linear(r), lg = srgb_linear(g), lb = srgb_linear(b);
  const double x = 0.4124564 * lr + 0.3575761 * lg + 0.1804375 * lb;
  const double y = 0.2126729 * lr + 0.7151522 * lg + 0.0721750 * lb;
  const double z = 0.0193339 * lr + 0.1191920 * lg + 0.9503041 * lb;
  const double fx = lab_f(x / 0.95047), fy = lab_f(y / 1.0), fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::vector<double> SuperpixelGraph::degrees() const {
  std::vector<double> d(n, 0.0);
  for (const auto& e : edges) {
    d[e.i] += e.weight;
    d[e.j] += e.weight;
  }
  return d;
}

std::vector<double> SuperpixelGraph::dense_weights() const {
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& e : edges) {
    w[static_cast<std::size_t>(e.i) * n + e.j] = e.weight;
    w[static_cast<std::size_t>(e.j) * n + e.i] = e.weight;
  }
  return w;
}

SuperpixelLabeling oversegment(const ImageTensor& img, int n_target, const SlicParams& params) {
  if (n_target < 2) fail(ErrorCode::InvalidArgument, "n_target must be at least 2");
  const int h = img.height(), w = img.width();
  const std::size_t n = img.plane_size();
  if (n < static_cast<std::size_t>(n_target)) {
    fail(ErrorCode::DegenerateImage, std::to_string(h) + "x" + std::to_string(w) + " image has fewer pixels than " +
                                         std::to_string(n_target) + " superpixels");
  }
  const auto lab = image_lab(img);
  const double step = std::sqrt(static_cast<double>(n) / n_target);
  const int nx = std::max(1, static_cast<int>(std::lround(w / step)));
  const int ny = std::max(1, static_cast<int>(std::lround(h / step)));

  struct Center {
    std::array<double, 3> lab;
    double y, x;
  };
  std::vector<Center> centers;
  auto grad_at = [&](int y, int x) {
    const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
    const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
    return lab_dist2(lab[static_cast<std::size_t>(y) * w + x1], lab[static_cast<std::size_t>(y) * w + x0]) +
           lab_dist2(lab[static_cast<std::size_t>(y1) * w + x], lab[static_cast<std::size_t>(y0) * w + x]);
  };
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      int cy = std::min(h - 1, static_cast<int>((gy + 0.5) * h / ny));
      int cx = std::min(w - 1, static_cast<int>((gx + 0.5) * w / nx));
      // Seeds move off edges to the lowest-gradient pixel of their 3x3 neighbourhood.
      double best = grad_at(cy, cx);
      int by = cy, bx = cx;
      for (int y = std::max(cy - 1, 0); y <= std::min(cy + 1, h - 1); ++y) {
        for (int x = std::max(cx - 1, 0); x <= std::min(cx + 1, w - 1); ++x) {
          const double g = grad_at(y, x);
          if (g < best) {
            best = g;
            by = y;
            bx = x;
          }
        }
      }
      centers.push_back({lab[static_cast<std::size_t>(by) * w + bx], static_cast<double>(by), static_cast<double>(bx)});
    }
  }

  std::vector<int> labels(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int gy = std::min(ny - 1, y * ny / h), gx = std::min(nx - 1, x * nx / w);
      labels[static_cast<std::size_t>(y) * w + x] = gy * nx + gx;
    }
  }

  const double spatial = sq(params.compactness / step);
  const int radius = static_cast<int>(std::ceil(step));
  std::vector<double> dist(n);
  for (int it = 0; it < params.iterations; ++it) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const int y0 = std::max(0, static_cast<int>(c.y) - radius), y1 = std::min(h - 1, static_cast<int>(c.y) + radius);
      const int x0 = std::max(0, static_cast<int>(c.x) - radius), x1 = std::min(w - 1, static_cast<int>(c.x) + radius);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * w + x;
          const double d = lab_dist2(lab[p], c.lab) + spatial * (sq(y - c.y) + sq(x - c.x));
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = static_cast<int>(k);
          }
        }
      }
    }
    std::vector<Center> sums(centers.size(), Center{{0, 0, 0}, 0, 0});
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      Center& s = sums[labels[p]];
      for (int ch = 0; ch < 3; ++ch) s.lab[ch] += lab[p][ch];
      s.y += static_cast<double>(p / w);
      s.x += static_cast<double>(p % w);
      ++counts[labels[p]];
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (!counts[k]) continue;
      const double inv = 1.0 / static_cast<double>(counts[k]);
      centers[k] = {{sums[k].lab[0] * inv, sums[k].lab[1] * inv, sums[k].lab[2] * inv}, sums[k].y * inv, sums[k].x * inv};
    }
  }

  SuperpixelLabeling out;
  out.rows = h;
  out.cols = w;
  const std::size_t min_size = std::max<std::size_t>(1, n / centers.size() / 4);
  out.count = enforce_connectivity(labels, h, w, min_size);
  out.labels = std::move(labels);
  return out;
}

SuperpixelGraph graph_from_means(std::vector<std::array<double, 3>> means,
                                 const std::vector<std::pair<int, int>>& adjacency, double theta1) {
  SuperpixelGraph g;
  g.n = static_cast<int>(means.size());
  g.theta1 = theta1;
  for (auto [i, j] : adjacency) {
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= g.n) fail(ErrorCode::InvalidArgument, "adjacency index out of range");
    g.edges.push_back({i, j, std::exp(-theta1 * std::sqrt(lab_dist2(means[i], means[j])))});
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end(),
                            [](const GraphEdge& a, const GraphEdge& b) { return a.i == b.i && a.j == b.j; }),
                g.edges.end());
  g.lab_means = std::move(means);
  return g;
}

SuperpixelGraph build_graph(const ImageTensor& img, const SuperpixelLabeling& labeling, double theta1,
                            double lab_scale) {
  require_same_dims(img, labeling, "build_graph");
  if (!(lab_scale > 0.0)) fail(ErrorCode::InvalidArgument, "lab_scale must be positive");
  const auto lab = image_lab(img);
  std::vector<std::array<double, 3>> means(labeling.count, {0.0, 0.0, 0.0});
  std::vector<std::size_t> counts(labeling.count, 0);
  for (std::size_t p = 0; p < lab.size(); ++p) {
    const int l = labeling.labels[p];
    for (int c = 0; c < 3; ++c) means[l][c] += lab[p][c];
    ++counts[l];
  }
  for (int l = 0; l < labeling.count; ++l) {
    for (int c = 0; c < 3; ++c) means[l][c] /= static_cast<double>(std::max<std::size_t>(counts[l], 1)) * lab_scale;
  }
  std::vector<std::pair<int, int>> adjacency;
  const int h = labeling.rows, w = labeling.cols;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = labeling.at(y, x);
      if (x + 1 < w && labeling.at(y, x + 1) != a) adjacency.emplace_back(a, labeling.at(y, x + 1));
      if (y + 1 < h && labeling.at(y + 1, x) != a) adjacency.emplace_back(a, labeling.at(y + 1, x));
    }
  }
  SuperpixelGraph g = graph_from_means(std::move(means), adjacency, theta1);
  g.lab_scale = lab_scale;
  return g;
}

std::vector<double> mean_ver(const SuperpixelLabeling& labeling, const VerMap& ver) {
  require_same_dims(labeling, ver, "mean_ver");
  std::vector<double> sum(labeling.count, 0.0);
  std::vector<std::size_t> counts(labeling.count, 0);
  const auto v = ver.values();
  for (std::size_t p = 0; p < v.size(); ++p) {
    sum[labeling.labels[p]] += v[p];
    ++counts[labeling.labels[p]];
  }
  for (int l = 0; l < labeling.count; ++l) {
    if (!counts[l]) fail(ErrorCode::InvalidArgument, "superpixel " + std::to_string(l) + " is empty");
    sum[l] /= static_cast<double>(counts[l]);
  }
  return sum;
}

std::vector<double> propagate(const SuperpixelGraph& graph, const std::vector<double>& r, double theta2) {
  if (r.size() != static_cast<std::size_t>(graph.n)) fail(ErrorCode::DimensionMismatch, "r must have one value per superpixel");
  if (!(theta2 > 0.0 && theta2 <= 1.0)) fail(ErrorCode::InvalidArgument, "theta2 must lie in (0,1]");
  const auto comp = components(graph);
  const auto deg = graph.degrees();
  std::vector<double> out(r);

  std::vector<std::vector<int>> members(graph.n);
  for (int v = 0; v < graph.n; ++v) members[comp[v]].push_back(v);
  std::vector<int> local(graph.n, -1);
  std::vector<std::vector<const GraphEdge*>> comp_edges(graph.n);
  for (const auto& e : graph.edges) {
    if (e.weight > 0.0) comp_edges[comp[e.i]].push_back(&e);
  }

  for (int root = 0; root < graph.n; ++root) {
    const auto& nodes = members[root];
    if (nodes.size() < 2) continue;
    if (theta2 >= 1.0) {
      fail(ErrorCode::SingularSystem, "D - W is singular on a connected component; use theta2 < 1");
    }
    const int m = static_cast<int>(nodes.size());
    for (int k = 0; k < m; ++k) local[nodes[k]] = k;
    Eigen::MatrixXd rhs(m, 2);
    for (int k = 0; k < m; ++k) {
      rhs(k, 0) = r[nodes[k]];
      rhs(k, 1) = 1.0;
    }
    Eigen::MatrixXd sol;
    if (m <= kDenseSolveLimit) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
      for (int k = 0; k < m; ++k) a(k, k) = deg[nodes[k]];
      for (const GraphEdge* e : comp_edges[root]) {
        a(local[e->i], local[e->j]) -= theta2 * e->weight;
        a(local[e->j], local[e->i]) -= theta2 * e->weight;
      }
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) fail(ErrorCode::SingularSystem, "propagation system is not positive definite");
      sol = llt.solve(rhs);
    } else {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(static_cast<std::size_t>(m) + 2 * comp_edges[root].size());
      for (int k = 0; k < m; ++k) trip.emplace_back(k, k, deg[nodes[k]]);
      for (const GraphEdge* e : comp_edges[root]) {
        trip.emplace_back(local[e->i], local[e->j], -theta2 * e->weight);
        trip.emplace_back(local[e->j], local[e->i], -theta2 * e->weight);
      }
      Eigen::SparseMatrix<double> a(m, m);
      a.setFromTriplets(trip.begin(), trip.end());
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-12);
      cg.setMaxIterations(20 * m);
      cg.compute(a);
      sol = Eigen::MatrixXd(m, 2);
      for (int c = 0; c < 2; ++c) {
        sol.col(c) = cg.solve(rhs.col(c));
        if (cg.info() != Eigen::Success) fail(ErrorCode::SingularSystem, "iterative propagation solve did not converge");
      }
    }
    for (int k = 0; k < m; ++k) {
      if (!(sol(k, 1) > 0.0)) fail(ErrorCode::SingularSystem, "non-positive row sum in propagation");
      out[nodes[k]] = sol(k, 0) / sol(k, 1);
    }
  }
  return out;
}

ThresholdResult threshold(const std::vector<double>& r_hat, const SuperpixelLabeling& labeling) {
  if (r_hat.size() != static_cast<std::size_t>(labeling.count)) {
    fail(ErrorCode::DimensionMismatch, "r_hat must have one value per superpixel");
  }
  ThresholdResult out;
  out.mask = BinaryMask(labeling.rows, labeling.cols);
  out.figure.assign(r_hat.size(), false);
  if (r_hat.empty()) return out;
  out.threshold = std::accumulate(r_hat.begin(), r_hat.end(), 0.0) / static_cast<double>(r_hat.size());
  const auto [lo, hi] = std::minmax_element(r_hat.begin(), r_hat.end());
  // A constant input comes back from the solver with rounding-level spread;
  // that is still a tie, not a figure.
  const double spread_floor = 1e-9 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
  if (*hi - *lo <= spread_floor) {
    log_warn("all superpixel values are equal; mask is empty");
    return out;
  }
  for (std::size_t i = 0; i < r_hat.size(); ++i) out.figure[i] = r_hat[i] > out.threshold;
  for (std::size_t p = 0; p < labeling.labels.size(); ++p) out.mask.set(p, out.figure[labeling.labels[p]]);
  return out;
}

nlohmann::json BinarizeResult::sidecar() const {
  return {{"n_superpixels", n_superpixels}, {"theta1", params.theta1},       {"theta2", params.theta2},
          {"threshold", threshold},         {"n_target", params.n_target},   {"compactness", params.compactness},
          {"lab_scale", params.lab_scale}};
}

BinarizeResult binarize_detailed(const ImageTensor& img, const VerMap& ver, const BinarizeParams& params) {
  require_same_dims(img, ver, "binarize");
  SlicParams slic;
  slic.n_target = params.n_target;
  slic.compactness = params.compactness;
  const SuperpixelLabeling labeling = oversegment(img, params.n_target, slic);
  const SuperpixelGraph graph = build_graph(img, labeling, params.theta1, params.lab_scale);
  const auto r_hat = propagate(graph, mean_ver(labeling, ver), params.theta2);
  ThresholdResult t = threshold(r_hat, labeling);
  BinarizeResult out;
  out.mask = std::move(t.mask);
  out.n_superpixels = labeling.count;
  out.threshold = t.threshold;
  out.params = params;
  return out;
}

BinaryMask binarize(const ImageTensor& img, const VerMap& ver, const BinarizeParams& params) {
  return binarize_detailed(img, ver, params).mask;
}

void write_sidecar(const BinarizeResult& result, const std::filesystem::path& path) {
  write_text_atomic(path, result.sidecar().dump(2) + "\n");
}

}  // namespace vegan
