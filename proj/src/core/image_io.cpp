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

#include "vegan/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace vegan {

namespace fs = std::filesystem;
static_assert(std::endian::native == std::endian::little, "VER1 I/O assumes a little-endian host");

namespace {

enum class Container { Png, Jpeg, Unknown };

Container sniff(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t png[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (b.size() >= 8 && std::equal(std::begin(png), std::end(png), b.begin())) return Container::Png;
  if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) return Container::Jpeg;
  return Container::Unknown;
}

cv::Mat decode_8bit(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (sniff(bytes) == Container::Unknown) fail(ErrorCode::UnsupportedFormat, origin + ": not a PNG or JPEG stream");
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat m = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
  if (m.empty()) fail(ErrorCode::UnsupportedFormat, origin + ": undecodable image data");
  if (m.depth() != CV_8U) fail(ErrorCode::UnsupportedFormat, origin + ": only 8-bit images are supported");
  return m;
}

void write_png(const cv::Mat& m, const fs::path& path) {
  std::vector<std::uint8_t> out;
  try {
    if (!cv::imencode(".png", m, out)) fail(ErrorCode::IoFailure, path.string() + ": PNG encoding failed");
  } catch (const cv::Exception& e) {
    fail(ErrorCode::IoFailure, path.string() + ": " + e.what());
  }
  write_file_atomic(path, out);
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) fail(ErrorCode::MissingFile, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, path.string() + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, tmp.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoFailure, tmp.string() + ": write failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoFailure, path.string() + ": " + ec.message());
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::uint8_t quantize_unit(double v) {
  const double s = std::floor(255.0 * std::clamp(v, 0.0, 1.0) + 0.5);
  return static_cast<std::uint8_t>(s);
}

ImageTensor decode_image(std::span<const std::uint8_t> bytes, const std::string& origin) {
  cv::Mat m = decode_8bit(bytes, origin);
  const int ch = m.channels();
  if (ch != 1 && ch != 3 && ch != 4) fail(ErrorCode::UnsupportedFormat, origin + ": unsupported channel count");
  ImageTensor img(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
      if (ch == 1) {
        const float v = px[0] / 255.0f;
        img.at(0, y, x) = img.at(1, y, x) = img.at(2, y, x) = v;
      } else {
        // OpenCV decodes to BGR(A).
        img.at(0, y, x) = px[2] / 255.0f;
        img.at(1, y, x) = px[1] / 255.0f;
        img.at(2, y, x) = px[0] / 255.0f;
      }
    }
  }
  return img;
}

ImageTensor load_image(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_image(bytes, path.string());
}

void save_image(const ImageTensor& img, const fs::path& path) {
  if (img.empty()) fail(ErrorCode::ShapeError, "cannot save an empty image");
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      row[3 * x + 0] = quantize_unit(img.at(2, y, x));
      row[3 * x + 1] = quantize_unit(img.at(1, y, x));
      row[3 * x + 2] = quantize_unit(img.at(0, y, x));
    }
  }
  write_png(m, path);
}

std::vector<std::uint8_t> encode_ver(const VerMap& ver) {
  if (ver.height() < 1 || ver.height() > 0xFFFF || ver.width() < 1 || ver.width() > 0xFFFF) {
    fail(ErrorCode::ShapeError, "VER dimensions must fit in 16 bits");
  }
  std::vector<std::uint8_t> out(8 + 4 * ver.size());
  std::memcpy(out.data(), "VER1", 4);
  const auto h = static_cast<std::uint16_t>(ver.height());
  const auto w = static_cast<std::uint16_t>(ver.width());
  std::memcpy(out.data() + 4, &h, 2);
  std::memcpy(out.data() + 6, &w, 2);
  std::memcpy(out.data() + 8, ver.values().data(), 4 * ver.size());
  return out;
}

VerMap decode_ver(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 8) fail(ErrorCode::TruncatedFile, origin + ": shorter than the VER1 header");
  if (std::memcmp(bytes.data(), "VER1", 4) != 0) fail(ErrorCode::BadMagic, origin);
  std::uint16_t h = 0, w = 0;
  std::memcpy(&h, bytes.data() + 4, 2);
  std::memcpy(&w, bytes.data() + 6, 2);
  if (h == 0 || w == 0) fail(ErrorCode::ShapeError, origin + ": zero dimension in header");
  const std::size_t n = static_cast<std::size_t>(h) * w;
  if (bytes.size() != 8 + 4 * n) {
    fail(ErrorCode::TruncatedFile, origin + ": expected " + std::to_string(8 + 4 * n) + " bytes, found " +
                                       std::to_string(bytes.size()));
  }
  VerMap ver(h, w);
  std::memcpy(ver.values().data(), bytes.data() + 8, 4 * n);
  for (float v : ver.values()) {
    if (!std::isfinite(v) || std::fabs(v) >= 1.0f) fail(ErrorCode::ValueOutOfRange, origin + ": |v| >= 1");
  }
  return ver;
}

void save_ver(const VerMap& ver, const fs::path& path) { write_file_atomic(path, encode_ver(ver)); }

VerMap load_ver(const fs::path& path) { return decode_ver(read_file_bytes(path), path.string()); }

BinaryMask load_mask(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  if (sniff(bytes) != Container::Png) fail(ErrorCode::UnsupportedFormat, path.string() + ": masks must be PNG");
  cv::Mat m = decode_8bit(bytes, path.string());
  if (m.channels() != 1) fail(ErrorCode::UnsupportedFormat, path.string() + ": masks must be single-channel");
  BinaryMask mask(m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) mask.set(y, x, row[x] > 127);
  }
  return mask;
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = mask.at(y, x) ? 255 : 0;
  }
  write_png(m, path);
}

void save_gray(std::span<const float> values, int height, int width, const fs::path& path) {
  if (values.size() != static_cast<std::size_t>(height) * width) fail(ErrorCode::ShapeError, "gray raster size");
  cv::Mat m(height, width, CV_8UC1);
  for (int y = 0; y < height; ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < width; ++x) row[x] = quantize_unit(values[static_cast<std::size_t>(y) * width + x]);
  }
  write_png(m, path);
}

}  // namespace vegan
