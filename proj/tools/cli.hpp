// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace objctrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitIo = 4;

/// Runs one command line (args excludes the program name). Subcommands:
/// lift, poses, plucker, warp-mask, pyramid, fuse, swl, preset, objmc, run,
/// serve. Returns the process exit code.
int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace objctrl::cli
