// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/json_formats.hpp"

#include "objctrl/error.hpp"
#include "objctrl/tensor_io.hpp"

namespace objctrl {

using nlohmann::json;

namespace {

double number(const json &v, const char *what) {
  require(v.is_number(), ErrorCode::kFormat, std::string(what) + " must be a number");
  return v.get<double>();
}

const json &points_array(const json &doc) {
  require(doc.is_object() && doc.contains("points") && doc["points"].is_array(),
          ErrorCode::kFormat, "trajectory JSON needs a \"points\" array");
  return doc["points"];
}

}  // namespace

json to_json(const Trajectory2D &t) {
  json points = json::array();
  for (const auto &p : t.points) points.push_back({p.x, p.y});
  return {{"points", points}};
}

json to_json(const Trajectory3D &t) {
  json points = json::array();
  for (const auto &p : t.points) points.push_back({p.x, p.y, p.depth});
  return {{"points", points}};
}

json to_json(const PoseSequence &poses) {
  json frames = json::array();
  for (const auto &pose : poses.frames) {
    json r = json::array();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) r.push_back(pose.rotation(i, j));
    }
    frames.push_back({{"R", r},
                      {"t", {pose.translation.x(), pose.translation.y(), pose.translation.z()}}});
  }
  return {{"fx", poses.intrinsics.fx},
          {"fy", poses.intrinsics.fy},
          {"cx", poses.intrinsics.cx},
          {"cy", poses.intrinsics.cy},
          {"frames", frames}};
}

json to_json(const PresetSpec &spec) {
  return {{"kind", to_string(spec.kind)},
          {"mag", spec.magnitude},
          {"frames", spec.frames},
          {"pivot_depth", spec.pivot_depth}};
}

json to_json(const ObjMCReport &report) {
  return {{"per_frame", report.per_frame},
          {"mean", report.mean},
          {"frames_compared", report.frames_compared}};
}

json to_json(const BatchReport &report) {
  json pairs = json::array();
  for (const auto &item : report.items) {
    json entry = {{"target", item.pair.target.string()}, {"tracked", item.pair.tracked.string()}};
    if (item.report) {
      entry["report"] = to_json(*item.report);
    } else {
      entry["error"] = item.error;
    }
    pairs.push_back(entry);
  }
  return {{"pairs", pairs}, {"mean", report.mean ? json(*report.mean) : json(nullptr)}};
}

Trajectory2D trajectory2d_from_json(const json &doc) {
  Trajectory2D out;
  for (const auto &p : points_array(doc)) {
    require(p.is_array() && (p.size() == 2 || p.size() == 3), ErrorCode::kFormat,
            "2D trajectory points must be [x, y]");
    out.points.push_back({number(p[0], "x"), number(p[1], "y")});
  }
  return out;
}

Trajectory3D trajectory3d_from_json(const json &doc) {
  Trajectory3D out;
  for (const auto &p : points_array(doc)) {
    require(p.is_array() && p.size() == 3, ErrorCode::kFormat,
            "3D trajectory points must be [x, y, d]");
    out.points.push_back({number(p[0], "x"), number(p[1], "y"), number(p[2], "d")});
  }
  return out;
}

PoseSequence poses_from_json(const json &doc) {
  require(doc.is_object(), ErrorCode::kFormat, "pose JSON must be an object");
  for (const char *key : {"fx", "fy", "cx", "cy", "frames"}) {
    require(doc.contains(key), ErrorCode::kFormat, std::string("pose JSON is missing \"") + key + "\"");
  }
  PoseSequence poses;
  poses.intrinsics = {number(doc["fx"], "fx"), number(doc["fy"], "fy"), number(doc["cx"], "cx"),
                      number(doc["cy"], "cy")};
  require(doc["frames"].is_array(), ErrorCode::kFormat, "\"frames\" must be an array");
  for (const auto &f : doc["frames"]) {
    require(f.is_object() && f.contains("R") && f.contains("t") && f["R"].is_array() &&
                f["R"].size() == 9 && f["t"].is_array() && f["t"].size() == 3,
            ErrorCode::kFormat, "each frame needs \"R\" (9 reals) and \"t\" (3 reals)");
    CameraPose pose;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) pose.rotation(i, j) = number(f["R"][3 * i + j], "R");
      pose.translation[i] = number(f["t"][i], "t");
    }
    poses.frames.push_back(pose);
  }
  validate(poses);
  return poses;
}

PresetSpec preset_from_json(const json &doc) {
  require(doc.is_object() && doc.contains("kind") && doc["kind"].is_string(), ErrorCode::kFormat,
          "preset needs a string \"kind\"");
  PresetSpec spec;
  spec.kind = parse_preset_kind(doc["kind"].get<std::string>());
  if (doc.contains("mag")) spec.magnitude = number(doc["mag"], "mag");
  if (doc.contains("frames")) {
    require(doc["frames"].is_number_unsigned(), ErrorCode::kFormat, "frames must be a count");
    spec.frames = doc["frames"].get<std::size_t>();
  }
  if (doc.contains("pivot_depth")) spec.pivot_depth = number(doc["pivot_depth"], "pivot_depth");
  validate(spec);
  return spec;
}

std::string serialize(const json &doc) { return doc.dump() + "\n"; }

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    fail(ErrorCode::kFormat, std::string("invalid JSON: ") + e.what());
  }
}

json load_json(const std::filesystem::path &path) { return parse_json(read_file(path)); }

Trajectory2D load_trajectory2d(const std::filesystem::path &path) {
  return trajectory2d_from_json(load_json(path));
}

Trajectory3D load_trajectory3d(const std::filesystem::path &path) {
  return trajectory3d_from_json(load_json(path));
}

PoseSequence load_poses(const std::filesystem::path &path) { return poses_from_json(load_json(path)); }

void save_json(const json &doc, const std::filesystem::path &path) { write_file(path, serialize(doc)); }

}  // namespace objctrl
