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

#include <stdexcept>
#include <string>
#include <string_view>

namespace vegan {

enum class ErrorCode {
  MissingFile,
  UnsupportedFormat,
  IoFailure,
  BadMagic,
  TruncatedFile,
  ValueOutOfRange,
  DimensionMismatch,
  ShapeError,
  UnsupportedVariant,
  NonFiniteGradient,
  NonFiniteLoss,
  CheckpointMismatch,
  DegenerateImage,
  SingularSystem,
  EmptyIntersection,
  InsufficientImages,
  MissingMask,
  AuthFailure,
  RateLimited,
  PartialFetch,
  DecodeFailure,
  ChecksumMismatch,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InsufficientImages: return "InsufficientImages";
    case ErrorCode::MissingMask: return "MissingMask";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::PartialFetch: return "PartialFetch";
    case ErrorCode::DecodeFailure: return "DecodeFailure";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace vegan
