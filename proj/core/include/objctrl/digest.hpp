// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>

namespace objctrl {

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

/// Hex string of `bytes` bytes from the OS CSPRNG.
std::string random_token(std::size_t bytes = 16);

/// Builds an uncompressed ("stored") ZIP archive. Entries are written in key
/// order with a fixed DOS timestamp, so identical inputs give identical bytes.
std::string make_zip(const std::map<std::string, std::string> &entries);

}  // namespace objctrl
