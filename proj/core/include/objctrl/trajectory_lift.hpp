// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/tensor.hpp"

namespace objctrl {

inline constexpr std::size_t kDefaultFrameCount = 14;
inline constexpr double kDefaultSmoothingTheta = 0.2;

struct Trajectory2D {
  std::vector<PixelCoord> points;
};

struct TrajectoryPoint3 {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;

  bool operator==(const TrajectoryPoint3 &) const = default;
};

struct Trajectory3D {
  std::vector<TrajectoryPoint3> points;

  bool operator==(const Trajectory3D &) const = default;
};

struct SmoothingConfig {
  double theta = kDefaultSmoothingTheta;
  /// Divide depth gradients by the depth map maximum before the std test.
  bool normalize = true;
};

/// Resamples a stroke to exactly n points uniformly spaced in cumulative arc
/// length. Endpoints are copied exactly; a zero-length stroke yields n copies
/// of its first point.
Trajectory2D resample(const Trajectory2D &trajectory, std::size_t n);

/// Nearest-pixel depth lookup. Points must lie in [0, W) x [0, H).
std::vector<double> sample_depth(const Trajectory2D &trajectory, const DepthMap &depth);

/// Flat-depth fallback: if the population std of consecutive depth
/// differences exceeds theta, every entry becomes depths[0]; otherwise the
/// input is returned unchanged. With cfg.normalize the differences are
/// divided by `depth_scale` (the depth map maximum); when no scale is given
/// the list maximum is used.
std::vector<double> smooth_depths(std::span<const double> depths, const SmoothingConfig &cfg,
                                  std::optional<double> depth_scale = std::nullopt);

/// Population standard deviation of consecutive differences, after the
/// optional scale division. Exposed for diagnostics.
double gradient_std(std::span<const double> depths, double scale = 1.0);

/// resample -> sample_depth -> smooth_depths.
Trajectory3D lift(const Trajectory2D &trajectory, const DepthMap &depth,
                  std::size_t n = kDefaultFrameCount, const SmoothingConfig &cfg = {});

}  // namespace objctrl
