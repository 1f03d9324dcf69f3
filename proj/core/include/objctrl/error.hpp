// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace objctrl {

enum class ErrorCode {
  kUsage,       // bad invocation or unknown option
  kValidation,  // input violates a documented invariant
  kDomain,      // numeric precondition failed (e.g. nonpositive depth)
  kShape,       // tensor/raster dimensions disagree
  kFormat,      // malformed file contents
  kIo,          // file could not be read or written
  kNotFound,    // unknown session or resource
};

std::string_view to_string(ErrorCode code);

/// Single exception type thrown by every objctrl module. The code drives CLI
/// exit statuses and HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string &message);

inline void require(bool condition, ErrorCode code, const std::string &message) {
  if (!condition) fail(code, message);
}

}  // namespace objctrl
