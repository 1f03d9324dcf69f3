// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/error.hpp"

namespace objctrl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kNotFound: return "not_found";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string &message) { throw Error(code, message); }

}  // namespace objctrl
