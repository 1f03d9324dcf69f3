// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/tensor.hpp"

namespace objctrl {

inline constexpr int kDefaultPyramidLevels = 4;
inline constexpr int kDefaultDilationKernel = 3;

/// Scale-wise dilated object masks. Level s has size ceil(H / 2^s) x
/// ceil(W / 2^s).
struct MaskPyramid {
  std::vector<Mask> levels;
  int kernel_size = kDefaultDilationKernel;

  bool operator==(const MaskPyramid &) const = default;
};

enum class BackgroundMode { kStatic, kReversed, kNone };

std::string to_string(BackgroundMode mode);
BackgroundMode parse_background_mode(const std::string &name);

Mask union_mask(std::span<const Mask> masks);

/// Binary dilation with a kernel x kernel square; out-of-frame taps ignored.
Mask dilate(const Mask &mask, int kernel);

/// 2x2 max pooling with ceiling division on odd sizes.
Mask max_pool2(const Mask &mask);

/// Max pooling by an integer factor (any covered pixel sets the cell).
Mask max_pool(const Mask &mask, int factor);

/// Level 0 = dilate(union); level s = dilate(max_pool2(level s-1)).
MaskPyramid mask_pyramid(const Mask &union_mask, int levels = kDefaultPyramidLevels,
                         int kernel = kDefaultDilationKernel);

/// Per-pixel selection: object where the h x w mask is set, background
/// elsewhere, on [N, C, h, w] volumes.
Tensor fuse_volumes(const Tensor &object, const Tensor &background, const Mask &mask);

/// static: [I|0] every frame. reversed: R = I and the negated object
/// translation (requires a
/// rotation-free object sequence). none: no background poses, fusion uses a
/// zero volume.
std::optional<PoseSequence> background_poses(BackgroundMode mode, const PoseSequence &object);

/// Per-scale fused Plücker volumes. Scale s uses intrinsics divided by 2^s
/// and the pyramid level's resolution.
std::vector<Tensor> build_control_volume(const PoseSequence &object, BackgroundMode mode,
                                         const MaskPyramid &pyramid, int width, int height,
                                         const PluckerOptions &options = {});

/// One PNG per level plus pyramid.json {"levels", "kernel", "files"}.
void save_pyramid(const MaskPyramid &pyramid, const std::filesystem::path &dir);
MaskPyramid load_pyramid(const std::filesystem::path &manifest);
std::string pyramid_manifest_json(const MaskPyramid &pyramid);
std::string pyramid_level_filename(std::size_t level);

}  // namespace objctrl
