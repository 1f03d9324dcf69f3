// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/warp_engine.hpp"

#include <cmath>
#include <limits>

#include "objctrl/error.hpp"
#include "objctrl/parallel.hpp"

namespace objctrl {

Mask SplatMap::validity() const {
  std::vector<std::uint8_t> bits(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) bits[i] = source[i] != kNoSource ? 1 : 0;
  return Mask(width, height, std::move(bits));
}

SplatMap compute_splat(const DepthMap &depth, const CameraPose &src, const CameraPose &dst,
                       const Intrinsics &k, const Mask *support) {
  validate(k);
  const int w = depth.width();
  const int h = depth.height();
  if (support != nullptr) {
    require(support->width() == w && support->height() == h, ErrorCode::kShape,
            "warp support mask does not match the depth map");
  }

  SplatMap splat{w, h, std::vector<std::int64_t>(static_cast<std::size_t>(w) * h, SplatMap::kNoSource)};
  std::vector<double> zbuffer(splat.source.size(), std::numeric_limits<double>::infinity());

  const Eigen::Matrix3d src_rt = src.rotation.transpose();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (support != nullptr && !support->at(x, y)) continue;
      const double d = depth.at(x, y);
      if (!(d > 0.0)) continue;
      const Eigen::Vector3d cam_src = unproject(x, y, d, k).xyz;
      const Eigen::Vector3d world = src_rt * (cam_src - src.translation);
      const Eigen::Vector3d cam_dst = dst.rotation * world + dst.translation;
      const double z = cam_dst.z();
      if (!(z > 0.0)) continue;
      const PixelCoord p = project({cam_dst}, k);
      const double rx = std::floor(p.x + 0.5);
      const double ry = std::floor(p.y + 0.5);
      if (!(rx >= 0.0 && ry >= 0.0 && rx < w && ry < h)) continue;
      const auto dst_index = static_cast<std::size_t>(ry) * w + static_cast<std::size_t>(rx);
      // Row-major visiting order makes strict '<' keep the smaller source
      // index on equal z.
      if (z < zbuffer[dst_index]) {
        zbuffer[dst_index] = z;
        splat.source[dst_index] = static_cast<std::int64_t>(y) * w + x;
      }
    }
  }
  return splat;
}

WarpResult apply_splat(const Tensor &grid, const SplatMap &splat) {
  require(grid.rank() == 3, ErrorCode::kShape, "warp grid must be [C, H, W]");
  require(grid.dim(1) == static_cast<std::size_t>(splat.height) &&
              grid.dim(2) == static_cast<std::size_t>(splat.width),
          ErrorCode::kShape, "warp grid spatial dims do not match the depth map");
  const std::size_t channels = grid.dim(0);
  const std::size_t plane = splat.source.size();
  Tensor warped(grid.shape(), 0.0f);
  auto out = warped.data();
  auto in = grid.data();
  for (std::size_t i = 0; i < plane; ++i) {
    const std::int64_t s = splat.source[i];
    if (s == SplatMap::kNoSource) continue;
    for (std::size_t c = 0; c < channels; ++c) {
      out[c * plane + i] = in[c * plane + static_cast<std::size_t>(s)];
    }
  }
  return {std::move(warped), splat.validity()};
}

WarpResult forward_warp(const Tensor &grid, const DepthMap &depth, const CameraPose &src,
                        const CameraPose &dst, const Intrinsics &k) {
  require(grid.rank() == 3, ErrorCode::kShape, "warp grid must be [C, H, W]");
  require(grid.dim(1) == static_cast<std::size_t>(depth.height()) &&
              grid.dim(2) == static_cast<std::size_t>(depth.width()),
          ErrorCode::kShape, "warp grid spatial dims do not match the depth map");
  return apply_splat(grid, compute_splat(depth, src, dst, k));
}

std::vector<Mask> warp_mask_sequence(const Mask &mask, const DepthMap &depth,
                                     const PoseSequence &poses) {
  validate(poses);
  require(mask.width() == depth.width() && mask.height() == depth.height(), ErrorCode::kShape,
          "mask and depth map dimensions differ");
  std::vector<Mask> out(poses.frames.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = compute_splat(depth, poses.frames.front(), poses.frames[i], poses.intrinsics, &mask)
                 .validity();
  });
  return out;
}

Tensor mask_to_grid(const Mask &mask) {
  std::vector<float> values(mask.bits().begin(), mask.bits().end());
  return Tensor({1, static_cast<std::size_t>(mask.height()), static_cast<std::size_t>(mask.width())},
                std::move(values));
}

}  // namespace objctrl
