// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/tensor.hpp"

namespace objctrl {

/// For every destination pixel, the row-major index of the source pixel that
/// won the z-test, or kNoSource. Front-most (smallest destination z) wins;
/// ties go to the smaller source index.
struct SplatMap {
  static constexpr std::int64_t kNoSource = -1;

  int width = 0;
  int height = 0;
  std::vector<std::int64_t> source;

  Mask validity() const;
};

/// Forward-splats every source pixel (or only those inside `support`):
/// unproject with its depth under `src`, map to world with the inverse of
/// `src`, into `dst`, project, round to the nearest pixel. Pixels with
/// nonpositive depth, landing behind the camera, or outside the frame are
/// dropped.
SplatMap compute_splat(const DepthMap &depth, const CameraPose &src, const CameraPose &dst,
                       const Intrinsics &k, const Mask *support = nullptr);

struct WarpResult {
  Tensor warped;  // same shape as the input grid, zero where invalid
  Mask validity;  // 1 where a source pixel landed
};

/// Warps a [C, H, W] grid; depth must be H x W.
WarpResult forward_warp(const Tensor &grid, const DepthMap &depth, const CameraPose &src,
                        const CameraPose &dst, const Intrinsics &k);

/// Applies a precomputed splat to a [C, H, W] grid.
WarpResult apply_splat(const Tensor &grid, const SplatMap &splat);

/// The object mask carried from frame 0 to every frame. Only object
/// pixels are splatted so background pixels cannot occlude the object; the
/// result is the binarized (>= 0.5) warp, which equals the splat validity.
std::vector<Mask> warp_mask_sequence(const Mask &mask, const DepthMap &depth,
                                     const PoseSequence &poses);

/// Mask as a [1, H, W] float grid of 0/1 values.
Tensor mask_to_grid(const Mask &mask);

}  // namespace objctrl
