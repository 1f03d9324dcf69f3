// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "objctrl/tensor.hpp"

namespace objctrl {

// OTSR layout (all integers little-endian):
//   [0..3]  "OTSR"
//   [4..7]  version 00 00 00 01
//   [8]     dtype code, 0 = float32
//   [9]     rank r
//   [10..]  r x u32 dimension sizes, then the row-major payload
inline constexpr std::uint8_t kOtsrDtypeFloat32 = 0;

inline constexpr int kDefaultMaskThreshold = 128;

struct DepthRange {
  double min = 0.0;
  double max = 1.0;
};

std::string read_file(const std::filesystem::path &path);
/// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path &path, std::string_view bytes);

std::string encode_tensor(const Tensor &tensor);
Tensor decode_tensor(std::string_view bytes);
void save_tensor(const Tensor &tensor, const std::filesystem::path &path);
Tensor load_tensor(const std::filesystem::path &path);

bool looks_like_tensor(std::string_view bytes);

Image decode_image(std::string_view png_bytes);
Image load_image(const std::filesystem::path &path);
std::string encode_image(const Image &image);

/// Reads an 8-bit grayscale PNG; sample >= threshold maps to 1.
Mask decode_mask(std::string_view png_bytes, int threshold = kDefaultMaskThreshold);
Mask load_mask(const std::filesystem::path &path, int threshold = kDefaultMaskThreshold);
/// Writes 0/255 grayscale so any threshold in [1, 255] recovers the mask.
std::string encode_mask(const Mask &mask);
void save_mask(const Mask &mask, const std::filesystem::path &path);

/// 16-bit grayscale PNG with linear mapping min + (s / 65535) * (max - min).
DepthMap decode_depth_png(std::string_view png_bytes, const DepthRange &range);
std::string encode_depth_png(const DepthMap &depth, const DepthRange &range);
/// Either OTSR rank-2 [H, W] bytes, or a 16-bit PNG when a range is given.
DepthMap decode_depth(std::string_view bytes, const std::optional<DepthRange> &range);

/// Sidecar for a depth PNG: "<file>.json" if it exists, else the file's
/// stem with a ".json" extension. Contents: {"min": m, "max": M}.
std::filesystem::path depth_sidecar_path(const std::filesystem::path &png_path);
DepthRange load_depth_range(const std::filesystem::path &sidecar);

DepthMap load_depth(const std::filesystem::path &path);
/// Persists as OTSR rank-2 [H, W].
void save_depth(const DepthMap &depth, const std::filesystem::path &path);
void save_depth_png(const DepthMap &depth, const DepthRange &range,
                    const std::filesystem::path &png_path);

Tensor depth_to_tensor(const DepthMap &depth);
DepthMap tensor_to_depth(const Tensor &tensor);

}  // namespace objctrl
