// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/camera_geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "objctrl/error.hpp"
#include "objctrl/parallel.hpp"
#include "objctrl/trajectory_lift.hpp"

namespace objctrl {

Eigen::Matrix3d Intrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void validate(const Intrinsics &k) {
  require(std::isfinite(k.fx) && std::isfinite(k.fy) && k.fx > 0.0 && k.fy > 0.0,
          ErrorCode::kValidation, "focal lengths must be positive and finite");
  require(std::isfinite(k.cx) && std::isfinite(k.cy), ErrorCode::kValidation,
          "principal point must be finite");
}

Intrinsics default_intrinsics(int width, int height) {
  require(width >= 1 && height >= 1, ErrorCode::kValidation, "image size must be at least 1x1");
  const double f = static_cast<double>(std::max(width, height));
  return {f, f, width / 2.0, height / 2.0};
}

bool CameraPose::is_identity() const {
  return has_identity_rotation() && translation == Eigen::Vector3d::Zero();
}

bool CameraPose::has_identity_rotation() const {
  return rotation == Eigen::Matrix3d::Identity();
}

void validate(const CameraPose &pose) {
  require(pose.rotation.allFinite() && pose.translation.allFinite(), ErrorCode::kValidation,
          "camera pose contains non-finite values");
  const double orthogonality =
      (pose.rotation.transpose() * pose.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  require(orthogonality <= kRotationTolerance, ErrorCode::kValidation,
          "rotation is not orthonormal (max |R^T R - I| = " + std::to_string(orthogonality) + ")");
  require(std::abs(pose.rotation.determinant() - 1.0) <= kRotationTolerance,
          ErrorCode::kValidation, "rotation determinant is not 1");
}

void validate(const PoseSequence &poses) {
  validate(poses.intrinsics);
  require(!poses.frames.empty(), ErrorCode::kValidation, "pose sequence needs at least one frame");
  for (const auto &pose : poses.frames) validate(pose);
}

CameraPoint unproject(double px, double py, double depth, const Intrinsics &k) {
  require(depth > 0.0, ErrorCode::kDomain, "unproject requires positive depth");
  return {Eigen::Vector3d(depth * (px - k.cx) / k.fx, depth * (py - k.cy) / k.fy, depth)};
}

PixelCoord project(const CameraPoint &p, const Intrinsics &k) {
  require(p.xyz.z() > 0.0, ErrorCode::kDomain, "point is behind the camera");
  return {k.fx * p.xyz.x() / p.xyz.z() + k.cx, k.fy * p.xyz.y() / p.xyz.z() + k.cy};
}

CameraPoint world_to_camera(const WorldPoint &p, const CameraPose &pose) {
  return {pose.rotation * p.xyz + pose.translation};
}

WorldPoint camera_to_world(const CameraPoint &p, const CameraPose &pose) {
  return {pose.rotation.transpose() * (p.xyz - pose.translation)};
}

PoseSequence trajectory_to_poses(const Trajectory3D &trajectory, const Intrinsics &k) {
  validate(k);
  require(!trajectory.points.empty(), ErrorCode::kValidation, "trajectory has no points");
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(trajectory.points.size());
  for (const auto &p : trajectory.points) {
    require(p.depth > 0.0, ErrorCode::kDomain, "trajectory depths must be positive");
    centers.push_back(unproject(p.x, p.y, p.depth, k).xyz);
  }

  // Every frame observes the unprojected first point.
  const Eigen::Vector3d &world = centers.front();
  PoseSequence poses{k, {}};
  poses.frames.reserve(centers.size());
  for (const auto &c : centers) {
    CameraPose pose;
    pose.translation = Eigen::Vector3d(c.x() - world.x(), c.y() - world.y(), c.z() - world.z());
    poses.frames.push_back(pose);
  }
  return poses;
}

Eigen::Matrix<double, 6, 1> plucker_ray(const CameraPose &pose, const Intrinsics &k, double x,
                                        double y, const PluckerOptions &options) {
  const Eigen::Vector3d pixel_ray((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
  Eigen::Vector3d direction = pose.rotation * pixel_ray;
  if (options.add_translation) direction += pose.translation;
  if (options.normalize_direction) {
    const double norm = direction.norm();
    if (norm > 0.0) direction /= norm;
  }
  const Eigen::Vector3d &origin = pose.translation;
  Eigen::Matrix<double, 6, 1> out;
  out.head<3>() = origin.cross(direction);
  out.tail<3>() = direction;
  return out;
}

Tensor plucker_volume(const PoseSequence &poses, int width, int height,
                      const PluckerOptions &options) {
  require(width >= 1 && height >= 1, ErrorCode::kValidation, "plucker size must be at least 1x1");
  validate(poses);
  const std::size_t n = poses.frames.size();
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  Tensor volume({n, 6, h, w});
  auto data = volume.data();
  const std::size_t plane = h * w;

  parallel_for(n, [&](std::size_t i) {
    const CameraPose &pose = poses.frames[i];
    float *frame = data.data() + i * 6 * plane;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const auto ray = plucker_ray(pose, poses.intrinsics, static_cast<double>(x),
                                     static_cast<double>(y), options);
        for (std::size_t c = 0; c < 6; ++c) {
          frame[c * plane + y * w + x] = static_cast<float>(ray[static_cast<Eigen::Index>(c)]);
        }
      }
    }
  });
  return volume;
}

Eigen::Matrix3d rotation_y(double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  Eigen::Matrix3d r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

}  // namespace objctrl
