// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/camera_presets.hpp"

#include <cmath>
#include <numbers>

#include "objctrl/error.hpp"

namespace objctrl {

std::string to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::kZoomIn: return "zoom_in";
    case PresetKind::kZoomOut: return "zoom_out";
    case PresetKind::kPanLeft: return "pan_left";
    case PresetKind::kPanRight: return "pan_right";
    case PresetKind::kOrbit: return "orbit";
  }
  return "zoom_in";
}

PresetKind parse_preset_kind(const std::string &name) {
  if (name == "zoom_in") return PresetKind::kZoomIn;
  if (name == "zoom_out") return PresetKind::kZoomOut;
  if (name == "pan_left") return PresetKind::kPanLeft;
  if (name == "pan_right") return PresetKind::kPanRight;
  if (name == "orbit") return PresetKind::kOrbit;
  fail(ErrorCode::kValidation, "unknown preset kind '" + name + "'");
}

void validate(const PresetSpec &spec) {
  require(spec.frames >= 2, ErrorCode::kValidation, "preset needs at least 2 frames");
  require(std::isfinite(spec.magnitude), ErrorCode::kValidation, "preset magnitude must be finite");
  if (spec.kind == PresetKind::kOrbit) {
    require(std::isfinite(spec.pivot_depth) && spec.pivot_depth > 0.0, ErrorCode::kValidation,
            "orbit pivot depth must be positive");
  }
}

Eigen::Matrix3d rotation_y_degrees(double degrees) {
  const double quarter_turns = degrees / 90.0;
  if (quarter_turns == std::round(quarter_turns)) {
    static constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0};
    const auto q = static_cast<long long>(std::round(quarter_turns));
    const int idx = static_cast<int>(((q % 4) + 4) % 4);
    Eigen::Matrix3d r;
    r << kCos[idx], 0.0, kSin[idx], 0.0, 1.0, 0.0, 0.0 - kSin[idx], 0.0, kCos[idx];
    return r;
  }
  return rotation_y(degrees * std::numbers::pi / 180.0);
}

PoseSequence preset_poses(const PresetSpec &spec, const Intrinsics &k) {
  validate(spec);
  validate(k);
  PoseSequence poses{k, {}};
  poses.frames.reserve(spec.frames);
  const double last = static_cast<double>(spec.frames - 1);
  for (std::size_t i = 0; i < spec.frames; ++i) {
    // i / last is exactly 1 on the final frame, so it lands on the magnitude.
    const double amount = spec.magnitude * (static_cast<double>(i) / last);
    CameraPose pose;
    switch (spec.kind) {
      case PresetKind::kZoomIn: pose.translation = {0.0, 0.0, 0.0 - amount}; break;
      case PresetKind::kZoomOut: pose.translation = {0.0, 0.0, amount}; break;
      case PresetKind::kPanRight: pose.translation = {amount, 0.0, 0.0}; break;
      case PresetKind::kPanLeft: pose.translation = {0.0 - amount, 0.0, 0.0}; break;
      case PresetKind::kOrbit: {
        const Eigen::Vector3d pivot(0.0, 0.0, spec.pivot_depth);
        pose.rotation = rotation_y_degrees(amount);
        pose.translation = pivot - pose.rotation * pivot;
        break;
      }
    }
    poses.frames.push_back(pose);
  }
  return poses;
}

}  // namespace objctrl
