/* Copyright 2026 The transcore Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef TRANSCORE_ERROR_H_
#define TRANSCORE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace transcore {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kMalformedFile,
  kUnsupportedPixelFormat,
  kUnsupportedDtype,
  kUnsupportedByteOrder,
  kShapeMismatch,
  kLengthMismatch,
  kImageTooSmall,
  kBackendUnavailable,
  kMissingEmbedding,
  kNonFinite,
  kClassCountMismatch,
  kEmptyMatrix,
  kGrayscaleUnsupported,
  kDegenerateSeries,
  kZeroBaseline,
  kInsufficientDegrees,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failure class so callers (CLI exit codes, sweep record status, Python
// bindings) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace transcore

#endif  // TRANSCORE_ERROR_H_
