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

#include "vegan/nn/ops.hpp"

#include <cmath>
#include <memory>

#include "vegan/error.hpp"
#include "vegan/kernels.hpp"

namespace vegan::nn {

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    fail(ErrorCode::ShapeError,
         std::string(op) + ": " + a.value().shape_string() + " vs " + b.value().shape_string());
  }
}

void require_rank(const Var& a, int rank, const char* op) {
  if (a.value().rank() != rank) fail(ErrorCode::ShapeError, std::string(op) + ": unexpected rank " + a.value().shape_string());
}

template <typename F>
Tensor map_unary(const Tensor& a, F f) {
  Tensor out(a.shape());
  auto o = out.values();
  auto in = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = f(in[i]);
  return out;
}

template <typename F>
Tensor map_binary(const Tensor& a, const Tensor& b, F f) {
  Tensor out(a.shape());
  auto o = out.values();
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = f(x[i], y[i]);
  return out;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  return make_result(map_binary(a.value(), b.value(), [](double x, double y) { return x + y; }), {a, b},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{g, g}; }, "add");
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  return make_result(map_binary(a.value(), b.value(), [](double x, double y) { return x - y; }), {a, b},
                     [](const Var& g, const std::vector<bool>& needs) {
                       return std::vector<Var>{g, needs[1] ? scale(g, -1.0) : Var()};
                     },
                     "sub");
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  return make_result(map_binary(a.value(), b.value(), [](double x, double y) { return x * y; }), {a, b},
                     [a, b](const Var& g, const std::vector<bool>& needs) {
                       return std::vector<Var>{needs[0] ? mul(g, b) : Var(), needs[1] ? mul(g, a) : Var()};
                     },
                     "mul");
}

Var scale(const Var& a, double s) {
  return make_result(map_unary(a.value(), [s](double x) { return s * x; }), {a},
                     [s](const Var& g, const std::vector<bool>&) { return std::vector<Var>{scale(g, s)}; }, "scale");
}

Var add_scalar(const Var& a, double s) {
  return make_result(map_unary(a.value(), [s](double x) { return x + s; }), {a},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{g}; }, "add_scalar");
}

Var mul_const(const Var& a, Tensor m) {
  if (a.shape() != m.shape()) fail(ErrorCode::ShapeError, "mul_const shape mismatch");
  auto mask = std::make_shared<const Tensor>(std::move(m));
  Tensor out = map_binary(a.value(), *mask, [](double x, double y) { return x * y; });
  return make_result(std::move(out), {a},
                     [mask](const Var& g, const std::vector<bool>&) { return std::vector<Var>{mul_const(g, *mask)}; },
                     "mul_const");
}

Var square(const Var& a) {
  return make_result(map_unary(a.value(), [](double x) { return x * x; }), {a},
                     [a](const Var& g, const std::vector<bool>&) { return std::vector<Var>{mul(g, scale(a, 2.0))}; },
                     "square");
}

Var sqrt(const Var& a) {
  Tensor y = map_unary(a.value(), [](double x) { return std::sqrt(x); });
  // Zero subgradient at the origin, where the norm of a vanishing gradient sits.
  Tensor dydx = map_unary(y, [](double v) { return v > 0.0 ? 0.5 / v : 0.0; });
  return make_result(std::move(y), {a},
                     [d = std::move(dydx)](const Var& g, const std::vector<bool>&) {
                       return std::vector<Var>{mul_const(g, d)};
                     },
                     "sqrt", false);
}

Var tanh(const Var& a) {
  Tensor y = map_unary(a.value(), [](double x) { return std::tanh(x); });
  Tensor dydx = map_unary(y, [](double v) { return 1.0 - v * v; });
  return make_result(std::move(y), {a},
                     [d = std::move(dydx)](const Var& g, const std::vector<bool>&) {
                       return std::vector<Var>{mul_const(g, d)};
                     },
                     "tanh", false);
}

Var relu(const Var& a) { return leaky_relu(a, 0.0); }

Var leaky_relu(const Var& a, double slope) {
  Tensor mask = map_unary(a.value(), [slope](double x) { return x > 0.0 ? 1.0 : slope; });
  Tensor y = map_binary(a.value(), mask, [](double x, double m) { return x * m; });
  return make_result(std::move(y), {a},
                     [m = std::move(mask)](const Var& g, const std::vector<bool>&) {
                       return std::vector<Var>{mul_const(g, m)};
                     },
                     "leaky_relu");
}

Var clamp(const Var& a, double lo, double hi) {
  Tensor mask = map_unary(a.value(), [lo, hi](double x) { return (x > lo && x < hi) ? 1.0 : 0.0; });
  Tensor y = map_unary(a.value(), [lo, hi](double x) { return std::min(std::max(x, lo), hi); });
  return make_result(std::move(y), {a},
                     [m = std::move(mask)](const Var& g, const std::vector<bool>&) {
                       return std::vector<Var>{mul_const(g, m)};
                     },
                     "clamp");
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  auto shape = a.shape();
  return make_result(Tensor::scalar(s), {a},
                     [shape](const Var& g, const std::vector<bool>&) {
                       return std::vector<Var>{expand_scalar(g, shape)};
                     },
                     "sum");
}

Var mean(const Var& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Var expand_scalar(const Var& s, const std::vector<int>& shape) {
  if (s.numel() != 1) fail(ErrorCode::ShapeError, "expand_scalar needs a scalar");
  return make_result(Tensor(shape, s.item()), {s},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{sum(g)}; }, "expand_scalar");
}

Var conv2d(const Var& x, const Var& w, int stride, int pad) {
  require_rank(x, 3, "conv2d input");
  require_rank(w, 4, "conv2d weight");
  if (w.dim(1) != x.dim(0) || w.dim(2) != w.dim(3)) fail(ErrorCode::ShapeError, "conv2d channel/kernel mismatch");
  const auto g = kernels::ConvGeometry::make(x.dim(0), x.dim(1), x.dim(2), w.dim(0), w.dim(2), stride, pad);
  Tensor y({g.out_channels, g.out_height, g.out_width});
  kernels::conv2d_forward(g, x.value().values(), w.value().values(), {}, y.values());
  return make_result(std::move(y), {x, w},
                     [x, w, g](const Var& gy, const std::vector<bool>& needs) {
                       return std::vector<Var>{
                           needs[0] ? conv2d_input_grad(gy, w, g.in_height, g.in_width, g.stride, g.pad) : Var(),
                           needs[1] ? conv2d_weight_grad(x, gy, g.kernel, g.stride, g.pad) : Var()};
                     },
                     "conv2d");
}

Var conv2d_input_grad(const Var& dy, const Var& w, int in_height, int in_width, int stride, int pad) {
  require_rank(dy, 3, "conv2d_input_grad dy");
  require_rank(w, 4, "conv2d_input_grad weight");
  const auto g = kernels::ConvGeometry::make(w.dim(1), in_height, in_width, w.dim(0), w.dim(2), stride, pad);
  if (dy.dim(0) != g.out_channels || dy.dim(1) != g.out_height || dy.dim(2) != g.out_width) {
    fail(ErrorCode::ShapeError, "conv2d_input_grad: gradient shape " + dy.value().shape_string() +
                                    " does not match geometry");
  }
  Tensor dx({g.in_channels, g.in_height, g.in_width});
  kernels::conv2d_backward_input(g, dy.value().values(), w.value().values(), dx.values());
  return make_result(std::move(dx), {dy, w},
                     [dy, w, g](const Var& gx, const std::vector<bool>& needs) {
                       return std::vector<Var>{needs[0] ? conv2d(gx, w, g.stride, g.pad) : Var(),
                                               needs[1] ? conv2d_weight_grad(gx, dy, g.kernel, g.stride, g.pad) : Var()};
                     },
                     "conv2d_input_grad");
}

Var conv2d_weight_grad(const Var& x, const Var& dy, int kernel, int stride, int pad) {
  require_rank(x, 3, "conv2d_weight_grad x");
  require_rank(dy, 3, "conv2d_weight_grad dy");
  const auto g = kernels::ConvGeometry::make(x.dim(0), x.dim(1), x.dim(2), dy.dim(0), kernel, stride, pad);
  if (dy.dim(1) != g.out_height || dy.dim(2) != g.out_width) {
    fail(ErrorCode::ShapeError, "conv2d_weight_grad: gradient shape does not match geometry");
  }
  Tensor dw({g.out_channels, g.in_channels, kernel, kernel});
  kernels::conv2d_backward_weight(g, x.value().values(), dy.value().values(), dw.values());
  return make_result(std::move(dw), {x, dy},
                     [x, dy, g](const Var& gw, const std::vector<bool>& needs) {
                       return std::vector<Var>{
                           needs[0] ? conv2d_input_grad(dy, gw, g.in_height, g.in_width, g.stride, g.pad) : Var(),
                           needs[1] ? conv2d(x, gw, g.stride, g.pad) : Var()};
                     },
                     "conv2d_weight_grad");
}

Var conv_transpose2d(const Var& x, const Var& w, int stride, int pad, int output_pad) {
  require_rank(x, 3, "conv_transpose2d input");
  require_rank(w, 4, "conv_transpose2d weight");
  if (w.dim(0) != x.dim(0)) fail(ErrorCode::ShapeError, "conv_transpose2d channel mismatch");
  const int k = w.dim(2);
  const int oh = (x.dim(1) - 1) * stride - 2 * pad + k + output_pad;
  const int ow = (x.dim(2) - 1) * stride - 2 * pad + k + output_pad;
  return conv2d_input_grad(x, w, oh, ow, stride, pad);
}

Var add_bias(const Var& x, const Var& b) {
  require_rank(x, 3, "add_bias");
  if (b.value().rank() != 1 || b.dim(0) != x.dim(0)) fail(ErrorCode::ShapeError, "add_bias channel mismatch");
  Tensor y = x.value();
  const std::size_t plane = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  for (int c = 0; c < x.dim(0); ++c)
    for (std::size_t i = 0; i < plane; ++i) y[c * plane + i] += b.value()[c];
  return make_result(std::move(y), {x, b},
                     [](const Var& g, const std::vector<bool>& needs) {
                       return std::vector<Var>{g, needs[1] ? channel_sum(g) : Var()};
                     },
                     "add_bias");
}

Var channel_sum(const Var& x) {
  require_rank(x, 3, "channel_sum");
  const int h = x.dim(1), w = x.dim(2);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  Tensor y({x.dim(0)});
  for (int c = 0; c < x.dim(0); ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < plane; ++i) s += x.value()[c * plane + i];
    y[static_cast<std::size_t>(c)] = s;
  }
  return make_result(std::move(y), {x},
                     [h, w](const Var& g, const std::vector<bool>&) { return std::vector<Var>{channel_expand(g, h, w)}; },
                     "channel_sum");
}

Var channel_expand(const Var& b, int height, int width) {
  if (b.value().rank() != 1) fail(ErrorCode::ShapeError, "channel_expand needs a vector");
  Tensor y({b.dim(0), height, width});
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (int c = 0; c < b.dim(0); ++c)
    for (std::size_t i = 0; i < plane; ++i) y[c * plane + i] = b.value()[static_cast<std::size_t>(c)];
  return make_result(std::move(y), {b},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{channel_sum(g)}; },
                     "channel_expand");
}

Var reflect_pad(const Var& x, int pad) {
  require_rank(x, 3, "reflect_pad");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Tensor y({c, h + 2 * pad, w + 2 * pad});
  kernels::reflect_pad(x.value().values(), c, h, w, pad, y.values());
  return make_result(std::move(y), {x},
                     [pad](const Var& g, const std::vector<bool>&) { return std::vector<Var>{reflect_fold(g, pad)}; },
                     "reflect_pad");
}

Var reflect_fold(const Var& x, int pad) {
  require_rank(x, 3, "reflect_fold");
  const int c = x.dim(0), h = x.dim(1) - 2 * pad, w = x.dim(2) - 2 * pad;
  Tensor y({c, h, w});
  kernels::reflect_fold(x.value().values(), c, h, w, pad, y.values());
  return make_result(std::move(y), {x},
                     [pad](const Var& g, const std::vector<bool>&) { return std::vector<Var>{reflect_pad(g, pad)}; },
                     "reflect_fold");
}

Var upsample2x(const Var& x) {
  require_rank(x, 3, "upsample2x");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Tensor y({c, 2 * h, 2 * w});
  kernels::upsample2x(x.value().values(), c, h, w, y.values());
  return make_result(std::move(y), {x},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{upsample2x_adjoint(g)}; },
                     "upsample2x");
}

Var upsample2x_adjoint(const Var& x) {
  require_rank(x, 3, "upsample2x_adjoint");
  const int c = x.dim(0), h = x.dim(1) / 2, w = x.dim(2) / 2;
  if (x.dim(1) % 2 || x.dim(2) % 2) fail(ErrorCode::ShapeError, "upsample2x_adjoint needs even dimensions");
  Tensor y({c, h, w});
  kernels::upsample2x_adjoint(x.value().values(), c, h, w, y.values());
  return make_result(std::move(y), {x},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{upsample2x(g)}; },
                     "upsample2x_adjoint");
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) fail(ErrorCode::ShapeError, "concat of nothing");
  const int h = parts[0].dim(1), w = parts[0].dim(2);
  int total = 0;
  std::vector<int> offsets;
  for (const Var& p : parts) {
    require_rank(p, 3, "concat_channels");
    if (p.dim(1) != h || p.dim(2) != w) fail(ErrorCode::ShapeError, "concat_channels spatial mismatch");
    offsets.push_back(total);
    total += p.dim(0);
  }
  Tensor y({total, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto src = parts[i].value().values();
    std::copy(src.begin(), src.end(), y.values().begin() + static_cast<std::ptrdiff_t>(offsets[i] * plane));
  }
  return make_result(std::move(y), parts,
                     [parts, offsets](const Var& g, const std::vector<bool>& needs) {
                       std::vector<Var> out(parts.size());
                       for (std::size_t i = 0; i < parts.size(); ++i) {
                         if (needs[i]) out[i] = slice_channels(g, offsets[i], offsets[i] + parts[i].dim(0));
                       }
                       return out;
                     },
                     "concat_channels");
}

Var slice_channels(const Var& x, int begin, int end) {
  require_rank(x, 3, "slice_channels");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (begin < 0 || end > c || begin >= end) fail(ErrorCode::ShapeError, "slice_channels range");
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  Tensor y({end - begin, h, w});
  auto src = x.value().values();
  std::copy(src.begin() + static_cast<std::ptrdiff_t>(begin * plane),
            src.begin() + static_cast<std::ptrdiff_t>(end * plane), y.values().begin());
  return make_result(std::move(y), {x},
                     [c, h, w, begin, end](const Var& g, const std::vector<bool>&) {
                       std::vector<Var> parts;
                       if (begin > 0) parts.push_back(Var::constant(Tensor({begin, h, w})));
                       parts.push_back(g);
                       if (end < c) parts.push_back(Var::constant(Tensor({c - end, h, w})));
                       return std::vector<Var>{parts.size() == 1 ? g : concat_channels(parts)};
                     },
                     "slice_channels");
}

Var broadcast_channels(const Var& x, int channels) {
  require_rank(x, 3, "broadcast_channels");
  if (x.dim(0) != 1) fail(ErrorCode::ShapeError, "broadcast_channels needs a single channel");
  const std::size_t plane = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  Tensor y({channels, x.dim(1), x.dim(2)});
  for (int c = 0; c < channels; ++c)
    std::copy(x.value().values().begin(), x.value().values().end(),
              y.values().begin() + static_cast<std::ptrdiff_t>(c * plane));
  return make_result(std::move(y), {x},
                     [](const Var& g, const std::vector<bool>&) { return std::vector<Var>{reduce_channels(g)}; },
                     "broadcast_channels");
}

Var reduce_channels(const Var& x) {
  require_rank(x, 3, "reduce_channels");
  const int c = x.dim(0);
  const std::size_t plane = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  Tensor y({1, x.dim(1), x.dim(2)});
  for (int k = 0; k < c; ++k)
    for (std::size_t i = 0; i < plane; ++i) y[i] += x.value()[k * plane + i];
  return make_result(std::move(y), {x},
                     [c](const Var& g, const std::vector<bool>&) { return std::vector<Var>{broadcast_channels(g, c)}; },
                     "reduce_channels");
}

Var instance_norm(const Var& x, double eps) {
  require_rank(x, 3, "instance_norm");
  const int channels = x.dim(0);
  const std::size_t plane = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  Tensor y(x.shape());
  std::vector<double> inv_std(static_cast<std::size_t>(channels));
  auto in = x.value().values();
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    const double* p = in.data() + c * plane;
    double m = 0.0;
    for (std::size_t i = 0; i < plane; ++i) m += p[i];
    m /= static_cast<double>(plane);
    double v = 0.0;
    for (std::size_t i = 0; i < plane; ++i) v += (p[i] - m) * (p[i] - m);
    v /= static_cast<double>(plane);
    const double is = 1.0 / std::sqrt(v + eps);
    inv_std[static_cast<std::size_t>(c)] = is;
    double* o = y.values().data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) o[i] = (p[i] - m) * is;
  }
  Tensor normalized = y;
  return make_result(
      std::move(y), {x},
      [xhat = std::move(normalized), inv_std, plane, channels](const Var& g, const std::vector<bool>&) {
        // dx = inv_std * (g - mean(g) - xhat * mean(g * xhat)), per channel.
        Tensor dx(xhat.shape());
        auto gv = g.value().values();
#pragma omp parallel for schedule(static)
        for (int c = 0; c < channels; ++c) {
          const double* gp = gv.data() + c * plane;
          const double* xp = xhat.values().data() + c * plane;
          double mg = 0.0, mgx = 0.0;
          for (std::size_t i = 0; i < plane; ++i) {
            mg += gp[i];
            mgx += gp[i] * xp[i];
          }
          mg /= static_cast<double>(plane);
          mgx /= static_cast<double>(plane);
          double* o = dx.values().data() + c * plane;
          for (std::size_t i = 0; i < plane; ++i) o[i] = inv_std[static_cast<std::size_t>(c)] * (gp[i] - mg - xp[i] * mgx);
        }
        return std::vector<Var>{Var::constant(std::move(dx))};
      },
      "instance_norm", false);
}

}  // namespace vegan::nn
