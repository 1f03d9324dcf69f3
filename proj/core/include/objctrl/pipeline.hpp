// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/camera_presets.hpp"
#include "objctrl/layer_control.hpp"
#include "objctrl/shared_warp_latent.hpp"
#include "objctrl/tensor.hpp"
#include "objctrl/trajectory_lift.hpp"

namespace objctrl {

/// Exactly one way of describing the object's motion.
using Guidance = std::variant<Trajectory2D, Trajectory3D, PresetSpec, PoseSequence>;

struct RunOptions {
  std::size_t frames = kDefaultFrameCount;  // resampled length for 2D strokes
  SmoothingConfig smoothing;
  int pyramid_levels = kDefaultPyramidLevels;
  int kernel = kDefaultDilationKernel;
  BackgroundMode background = BackgroundMode::kStatic;
  PluckerOptions plucker;
  std::optional<Intrinsics> intrinsics;  // default_intrinsics(W, H) when unset
  bool swl = false;
  std::uint64_t seed = 0;
  double cutoff = kDefaultLowpassCutoff;
  int latent_downsample = kDefaultLatentDownsample;
  std::size_t latent_channels = kDefaultLatentChannels;
  int mask_threshold = 128;
};

nlohmann::json to_json(const RunOptions &options);
RunOptions run_options_from_json(const nlohmann::json &doc);

/// Everything the pipeline derives for one conditioning image.
struct ControlBundle {
  std::optional<Trajectory3D> trajectory;
  PoseSequence poses_obj;
  std::optional<PoseSequence> poses_bg;
  std::vector<Mask> warped_masks;
  Mask union_mask;
  MaskPyramid pyramid;
  std::vector<Tensor> plucker_fused;
  std::optional<LatentVolume> swl;
};

struct ObjectMotion {
  std::optional<Trajectory3D> trajectory;  // set for trajectory guidance
  PoseSequence poses;
};

/// Object poses for any guidance source, lifting 2D strokes first.
ObjectMotion derive_motion(const Guidance &guidance, const DepthMap &depth,
                           const RunOptions &options);

ControlBundle compute_bundle(const Image &image, const DepthMap &depth, const Mask &object_mask,
                             const Guidance &guidance, const RunOptions &options);

/// Relative path -> file bytes for every bundle artifact plus manifest.json.
/// `inputs` is recorded verbatim in the manifest.
std::map<std::string, std::string> bundle_files(const ControlBundle &bundle,
                                                const RunOptions &options,
                                                const nlohmann::json &inputs);

void write_bundle(const std::map<std::string, std::string> &files,
                  const std::filesystem::path &out_dir);

std::string warped_mask_filename(std::size_t frame);

/// File-backed guidance, as named on the command line or in a manifest.
struct GuidanceInput {
  enum class Kind { kTrajectory2D, kTrajectory3D, kPoses, kPreset };
  Kind kind = Kind::kTrajectory2D;
  std::filesystem::path path;  // unused for presets
  PresetSpec preset;
};

struct RunInputs {
  std::filesystem::path image;
  std::filesystem::path depth;
  std::filesystem::path mask;
  GuidanceInput guidance;
};

/// Loads inputs, computes the bundle and writes it (with manifest.json) to
/// out_dir. Same inputs and options give byte-identical directories.
ControlBundle run(const RunInputs &inputs, const RunOptions &options,
                  const std::filesystem::path &out_dir);

/// Re-runs from a manifest written by run(); input hashes must still match.
ControlBundle run_from_manifest(const std::filesystem::path &manifest,
                                const std::filesystem::path &out_dir);

}  // namespace objctrl
