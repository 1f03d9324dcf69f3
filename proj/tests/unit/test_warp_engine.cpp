// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "objctrl/camera_presets.hpp"
#include "objctrl/error.hpp"
#include "objctrl/warp_engine.hpp"

namespace objctrl {
namespace {

using testing::Rng;

CameraPose translated(double x, double y, double z) {
  CameraPose p;
  p.translation = {x, y, z};
  return p;
}

// Straight-line reimplementation of the splat rule for cross-checking.
std::vector<std::int64_t> naive_sources(const DepthMap &depth, const CameraPose &src,
                                        const CameraPose &dst, const Intrinsics &k) {
  const int w = depth.width(), h = depth.height();
  std::vector<std::int64_t> best(static_cast<std::size_t>(w) * h, -1);
  std::vector<double> bestz(best.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = depth.at(x, y);
      if (d <= 0) continue;
      const Eigen::Vector3d c(d * (x - k.cx) / k.fx, d * (y - k.cy) / k.fy, d);
      const Eigen::Vector3d wp = src.rotation.transpose() * (c - src.translation);
      const Eigen::Vector3d q = dst.rotation * wp + dst.translation;
      if (q.z() <= 0) continue;
      const double px = k.fx * q.x() / q.z() + k.cx, py = k.fy * q.y() / q.z() + k.cy;
      const long ix = std::lround(std::floor(px + 0.5)), iy = std::lround(std::floor(py + 0.5));
      if (ix < 0 || iy < 0 || ix >= w || iy >= h) continue;
      const std::size_t di = static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix);
      const std::int64_t si = static_cast<std::int64_t>(y) * w + x;
      if (best[di] < 0 || q.z() < bestz[di] || (q.z() == bestz[di] && si < best[di])) {
        best[di] = si;
        bestz[di] = q.z();
      }
    }
  return best;
}

TEST(ForwardWarp, IdentityWarpIsIdentity) {
  Rng rng(1);
  const Tensor grid = testing::random_tensor(rng, {3, 9, 13});
  const DepthMap depth = testing::random_smooth_depth(rng, 13, 9, 0.5, 4);
  const Intrinsics k = default_intrinsics(13, 9);
  const CameraPose pose = testing::random_pose(rng);
  const auto r = forward_warp(grid, depth, pose, pose, k);
  EXPECT_EQ(r.validity.count(), 13u * 9u);
  EXPECT_EQ(r.warped, grid);
}

TEST(ForwardWarp, TranslationShiftsByFocalTimesTOverDepth) {
  Rng rng(2);
  const Tensor grid = testing::random_tensor(rng, {2, 4, 30});
  const auto r = forward_warp(grid, DepthMap(30, 4, 1.0f), CameraPose::identity(),
                              translated(0.1, 0, 0), {100, 100, 0, 0});
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t x = 0; x < 30; ++x) {
        if (x < 10) {
          EXPECT_FALSE(r.validity.at(static_cast<int>(x), static_cast<int>(y)));
          EXPECT_EQ(r.warped.at({c, y, x}), 0.0f);
        } else {
          EXPECT_EQ(r.warped.at({c, y, x}), grid.at({c, y, x - 10}));
        }
      }
}

TEST(ForwardWarp, FrontMostWins) {
  // x' = x + fx * t / d: pixel 0 at depth 1 and pixel 5 at depth 2 both land on 10.
  std::vector<float> d(12, 0.0f);
  d[0] = 1.0f;
  d[5] = 2.0f;
  Tensor grid({1, 1, 12}, 0.0f);
  grid.at({0, 0, 0}) = 7.0f;
  grid.at({0, 0, 5}) = 9.0f;
  const auto r = forward_warp(grid, DepthMap(12, 1, d), CameraPose::identity(),
                              translated(0.1, 0, 0), {100, 100, 0, 0});
  EXPECT_EQ(r.warped.at({0, 0, 10}), 7.0f);
  EXPECT_EQ(r.validity.count(), 1u);
}

TEST(ForwardWarp, EqualDepthTieGoesToSmallerSourceIndex) {
  // Zoom out by t_z = 1 at depth 1 halves x: pixels 1 and 2 both round to 1.
  Tensor grid({1, 1, 4}, std::vector<float>{10, 11, 12, 13});
  const auto splat = compute_splat(DepthMap(4, 1, 1.0f), CameraPose::identity(),
                                   translated(0, 0, 1), {1, 1, 0, 0});
  EXPECT_EQ(splat.source[1], 1);
  EXPECT_EQ(apply_splat(grid, splat).warped.at({0, 0, 1}), 11.0f);
}

TEST(ForwardWarp, MatchesNaiveSplatOnRandomScenes) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = rng.integer(4, 40), h = rng.integer(4, 30);
    const DepthMap depth = testing::random_smooth_depth(rng, w, h, 0.3, 4);
    const Intrinsics k = default_intrinsics(w, h);
    CameraPose src = CameraPose::identity();
    CameraPose dst;
    dst.rotation = rotation_y(rng.uniform(-0.3, 0.3));
    dst.translation = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.5)};
    if (rng.coin()) std::swap(src, dst);
    const auto splat = compute_splat(depth, src, dst, k);
    EXPECT_EQ(splat.source, naive_sources(depth, src, dst, k));
  }
}

TEST(ForwardWarp, ShapeMismatchIsShapeError) {
  try {
    forward_warp(Tensor({1, 3, 3}), DepthMap(4, 3, 1.0f), {}, {}, {1, 1, 0, 0});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  EXPECT_THROW(forward_warp(Tensor({3, 3}), DepthMap(3, 3, 1.0f), {}, {}, {1, 1, 0, 0}), Error);
}

TEST(WarpMaskSequence, IdentityPosesKeepMask) {
  Rng rng(4);
  const Mask m = testing::random_mask(rng, 20, 12, 0.3);
  const auto seq = warp_mask_sequence(m, testing::random_smooth_depth(rng, 20, 12, 1, 2),
                                      testing::identity_poses(5, default_intrinsics(20, 12)));
  ASSERT_EQ(seq.size(), 5u);
  for (const auto &f : seq) EXPECT_EQ(f, m);
}

TEST(WarpMaskSequence, FollowsTrajectory) {
  Mask m(20, 10);
  m.set(5, 5, true);
  const Intrinsics k{100, 100, 0, 0};
  const auto poses = trajectory_to_poses({{{5, 5, 1}, {15, 5, 1}}}, k);
  const auto seq = warp_mask_sequence(m, DepthMap(20, 10, 1.0f), poses);
  EXPECT_TRUE(seq[1].at(15, 5));
  EXPECT_EQ(seq[1].count(), 1u);
}

TEST(WarpMaskSequence, ZoomOutShrinksBlob) {
  const Mask blob = testing::disk_mask(64, 48, 32, 24, 10);
  const Intrinsics k = default_intrinsics(64, 48);
  PoseSequence poses{k, {CameraPose::identity(), translated(0, 0, 0.5)}};
  const auto seq = warp_mask_sequence(blob, DepthMap(64, 48, 2.0f), poses);
  EXPECT_LT(seq[1].count(), blob.count());
  EXPECT_GT(seq[1].count(), 0u);
}

TEST(WarpMaskSequence, InPlaneTranslationNeverGrowsArea) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Mask m = testing::random_mask(rng, 24, 16, 0.4);
    const Intrinsics k = default_intrinsics(24, 16);
    PoseSequence poses{k, {CameraPose::identity(),
                           translated(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0)}};
    const auto seq = warp_mask_sequence(m, DepthMap(24, 16, static_cast<float>(rng.uniform(0.5, 3))), poses);
    EXPECT_LE(seq[1].count(), m.count());
  }
}

TEST(WarpMaskSequence, BackgroundCannotOccludeObject) {
  // Background pixel nearer to the camera lands on the object's destination,
  // but only object pixels are splatted.
  std::vector<float> d(12, 2.0f);
  d[0] = 1.0f;
  Mask m(12, 1);
  m.set(5, 0, true);
  PoseSequence poses{{100, 100, 0, 0}, {CameraPose::identity(), translated(0.1, 0, 0)}};
  const auto seq = warp_mask_sequence(m, DepthMap(12, 1, d), poses);
  EXPECT_TRUE(seq[1].at(10, 0));
}

TEST(WarpMaskSequence, SizeMismatchIsShapeError) {
  EXPECT_THROW(warp_mask_sequence(Mask(3, 3), DepthMap(4, 3, 1.0f),
                                  testing::identity_poses(2, {1, 1, 0, 0})),
               Error);
}

TEST(MaskToGrid, ZeroOneFloats) {
  Mask m(2, 1);
  m.set(1, 0, true);
  EXPECT_EQ(mask_to_grid(m), Tensor({1, 1, 2}, std::vector<float>{0, 1}));
}

}  // namespace
}  // namespace objctrl
