// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "objctrl/tensor.hpp"

namespace objctrl {

struct TrajectoryPoint3;
struct Trajectory3D;

/// Pinhole intrinsics in pixels. Pixel centers sit on integer coordinates,
/// origin top-left, x to the right, y down.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Intrinsics for a grid downsampled by `factor` (all four terms divided).
  Intrinsics downscaled(double factor) const {
    return {fx / factor, fy / factor, cx / factor, cy / factor};
  }
  Eigen::Matrix3d matrix() const;

  bool operator==(const Intrinsics &) const = default;
};

void validate(const Intrinsics &k);

/// fx = fy = max(width, height), principal point at the image center.
Intrinsics default_intrinsics(int width, int height);

/// World-to-camera extrinsics [R|t]: x_cam = R * x_world + t.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static CameraPose identity() { return {}; }
  bool is_identity() const;
  bool has_identity_rotation() const;

  bool operator==(const CameraPose &other) const {
    return rotation == other.rotation && translation == other.translation;
  }
};

inline constexpr double kRotationTolerance = 1e-6;

/// Throws kValidation unless R^T R = I and det R = 1 within kRotationTolerance.
void validate(const CameraPose &pose);

struct PoseSequence {
  Intrinsics intrinsics;
  std::vector<CameraPose> frames;

  std::size_t size() const { return frames.size(); }
  bool operator==(const PoseSequence &) const = default;
};

void validate(const PoseSequence &poses);

struct CameraPoint {
  Eigen::Vector3d xyz;
};

struct WorldPoint {
  Eigen::Vector3d xyz;
};

struct PixelCoord {
  double x = 0.0;
  double y = 0.0;
};

/// Camera coordinates of pixel (px, py) at depth d; d must be positive.
CameraPoint unproject(double px, double py, double depth, const Intrinsics &k);

/// Pixel of a camera-frame point; throws kDomain when z <= 0.
PixelCoord project(const CameraPoint &p, const Intrinsics &k);

CameraPoint world_to_camera(const WorldPoint &p, const CameraPose &pose);
WorldPoint camera_to_world(const CameraPoint &p, const CameraPose &pose);

/// Models object motion as camera translation with R = I. Frame 0 is the
/// canonical space: frame i translates by (point i - point 0), both
/// unprojected, so the first translation is exactly zero.
PoseSequence trajectory_to_poses(const Trajectory3D &trajectory, const Intrinsics &k);

struct PluckerOptions {
  // Ray direction is R K^-1 [x y 1]^T + t, i.e. the translation is added to
  // the direction. Clear to use the conventional R K^-1 [x y 1]^T.
  bool add_translation = true;
  bool normalize_direction = false;

  bool operator==(const PluckerOptions &) const = default;
};

/// Per-pixel Plücker embedding (o x d, d) with o = t. Output shape
/// [N, 6, height, width]; channels 0..2 hold the moment, 3..5 the direction.
Tensor plucker_volume(const PoseSequence &poses, int width, int height,
                      const PluckerOptions &options = {});

/// The 6-vector for one pixel, exposed for tests and previews.
Eigen::Matrix<double, 6, 1> plucker_ray(const CameraPose &pose, const Intrinsics &k, double x,
                                        double y, const PluckerOptions &options = {});

Eigen::Matrix3d rotation_y(double radians);

}  // namespace objctrl
