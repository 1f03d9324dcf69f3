// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/camera_presets.hpp"
#include "objctrl/metrics.hpp"
#include "objctrl/trajectory_lift.hpp"

namespace objctrl {

// Trajectory JSON: {"points": [[x, y], ...]} (2D) or {"points": [[x, y, d], ...]} (3D).
// Pose JSON: {"fx", "fy", "cx", "cy", "frames": [{"R": [9 row-major], "t": [3]}, ...]}.
// All documents are serialized compactly with a trailing newline so the same
// value always yields the same bytes.

nlohmann::json to_json(const Trajectory2D &t);
nlohmann::json to_json(const Trajectory3D &t);
nlohmann::json to_json(const PoseSequence &poses);
nlohmann::json to_json(const PresetSpec &spec);
nlohmann::json to_json(const ObjMCReport &report);
nlohmann::json to_json(const BatchReport &report);

/// Accepts [x, y] or [x, y, d] points; depth, if present, is ignored.
Trajectory2D trajectory2d_from_json(const nlohmann::json &doc);
Trajectory3D trajectory3d_from_json(const nlohmann::json &doc);
PoseSequence poses_from_json(const nlohmann::json &doc);
PresetSpec preset_from_json(const nlohmann::json &doc);

std::string serialize(const nlohmann::json &doc);
nlohmann::json parse_json(std::string_view text);
nlohmann::json load_json(const std::filesystem::path &path);

Trajectory2D load_trajectory2d(const std::filesystem::path &path);
Trajectory3D load_trajectory3d(const std::filesystem::path &path);
PoseSequence load_poses(const std::filesystem::path &path);

void save_json(const nlohmann::json &doc, const std::filesystem::path &path);

}  // namespace objctrl
