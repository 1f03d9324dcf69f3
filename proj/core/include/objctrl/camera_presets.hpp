// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "objctrl/camera_geometry.hpp"

namespace objctrl {

enum class PresetKind { kZoomIn, kZoomOut, kPanLeft, kPanRight, kOrbit };

std::string to_string(PresetKind kind);
PresetKind parse_preset_kind(const std::string &name);

/// Object-motion sign convention: the camera translation equals the
/// object's displacement in camera space with the world held fixed. So
/// pan_right has positive t_x and moves the object toward +x in the image,
/// the opposite of a conventional camera pan.
struct PresetSpec {
  PresetKind kind = PresetKind::kZoomIn;
  double magnitude = 0.0;  // scene units; degrees for orbit
  std::size_t frames = 14;
  double pivot_depth = 1.0;  // orbit only

  bool operator==(const PresetSpec &) const = default;
};

void validate(const PresetSpec &spec);

/// Linear schedule alpha = i / (N - 1). Translations for zoom/pan; orbit
/// rotates about the camera y axis through (0, 0, pivot_depth) with
/// t = (I - R) * pivot so the pivot stays fixed in camera coordinates.
PoseSequence preset_poses(const PresetSpec &spec, const Intrinsics &k);

/// Rotation about +y, with exact entries at multiples of 90 degrees.
Eigen::Matrix3d rotation_y_degrees(double degrees);

}  // namespace objctrl
