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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vegan/image.hpp"

namespace vegan {

/// Reads an 8-bit PNG or JPEG. Values are mapped v/255; grayscale inputs are
/// broadcast to three channels and an alpha channel, if present, is dropped.
ImageTensor load_image(const std::filesystem::path& path);

/// Decodes an in-memory PNG/JPEG buffer with the same rules as load_image.
ImageTensor decode_image(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

/// Writes an 8-bit RGB PNG with v -> round-half-up(255 v).
void save_image(const ImageTensor& img, const std::filesystem::path& path);

/// Float-to-byte quantization shared by every PNG writer.
std::uint8_t quantize_unit(double v);

/// VER1 raster: "VER1", u16 height, u16 width (little-endian), then row-major
/// little-endian float32 values.
void save_ver(const VerMap& ver, const std::filesystem::path& path);
VerMap load_ver(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_ver(const VerMap& ver);
VerMap decode_ver(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

/// 8-bit single-channel PNG masks: pixel > 127 is figure; saved as 0/255.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Writes a single-channel 8-bit PNG from values in [0,1].
void save_gray(std::span<const float> values, int height, int width, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace vegan
