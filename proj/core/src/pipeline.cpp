// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/pipeline.hpp"

#include <cstdio>

#include "objctrl/digest.hpp"
#include "objctrl/error.hpp"
#include "objctrl/json_formats.hpp"
#include "objctrl/parallel.hpp"
#include "objctrl/tensor_io.hpp"
#include "objctrl/warp_engine.hpp"

namespace objctrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kManifestFormat = "objctrl-bundle/1";

std::string indexed_name(const char *pattern, std::size_t i) {
  char name[64];
  std::snprintf(name, sizeof(name), pattern, i);
  return name;
}

}  // namespace

json to_json(const RunOptions &o) {
  json doc = {{"frames", o.frames},
              {"theta", o.smoothing.theta},
              {"normalize_depth", o.smoothing.normalize},
              {"pyramid_levels", o.pyramid_levels},
              {"kernel", o.kernel},
              {"background", to_string(o.background)},
              {"plucker_add_translation", o.plucker.add_translation},
              {"plucker_normalize", o.plucker.normalize_direction},
              {"swl", o.swl},
              {"seed", o.seed},
              {"d0", o.cutoff},
              {"latent_downsample", o.latent_downsample},
              {"latent_channels", o.latent_channels},
              {"mask_threshold", o.mask_threshold}};
  if (o.intrinsics) {
    doc["intrinsics"] = {{"fx", o.intrinsics->fx},
                         {"fy", o.intrinsics->fy},
                         {"cx", o.intrinsics->cx},
                         {"cy", o.intrinsics->cy}};
  } else {
    doc["intrinsics"] = nullptr;
  }
  return doc;
}

RunOptions run_options_from_json(const json &doc) {
  require(doc.is_object(), ErrorCode::kFormat, "run options must be a JSON object");
  RunOptions o;
  try {
    o.frames = doc.value("frames", o.frames);
    o.smoothing.theta = doc.value("theta", o.smoothing.theta);
    o.smoothing.normalize = doc.value("normalize_depth", o.smoothing.normalize);
    o.pyramid_levels = doc.value("pyramid_levels", o.pyramid_levels);
    o.kernel = doc.value("kernel", o.kernel);
    o.background = parse_background_mode(doc.value("background", std::string("static")));
    o.plucker.add_translation = doc.value("plucker_add_translation", o.plucker.add_translation);
    o.plucker.normalize_direction = doc.value("plucker_normalize", o.plucker.normalize_direction);
    o.swl = doc.value("swl", o.swl);
    o.seed = doc.value("seed", o.seed);
    o.cutoff = doc.value("d0", o.cutoff);
    o.latent_downsample = doc.value("latent_downsample", o.latent_downsample);
    o.latent_channels = doc.value("latent_channels", o.latent_channels);
    o.mask_threshold = doc.value("mask_threshold", o.mask_threshold);
    if (doc.contains("intrinsics") && !doc["intrinsics"].is_null()) {
      const json &k = doc["intrinsics"];
      o.intrinsics = Intrinsics{k.at("fx").get<double>(), k.at("fy").get<double>(),
                                k.at("cx").get<double>(), k.at("cy").get<double>()};
    }
  } catch (const json::exception &e) {
    fail(ErrorCode::kFormat, std::string("bad run options: ") + e.what());
  }
  return o;
}

std::string warped_mask_filename(std::size_t frame) {
  return indexed_name("warped_masks/frame_%03zu.png", frame);
}

ObjectMotion derive_motion(const Guidance &guidance, const DepthMap &depth,
                           const RunOptions &options) {
  const Intrinsics k = options.intrinsics.value_or(default_intrinsics(depth.width(), depth.height()));
  ObjectMotion motion;
  if (const auto *stroke = std::get_if<Trajectory2D>(&guidance)) {
    motion.trajectory = lift(*stroke, depth, options.frames, options.smoothing);
  } else if (const auto *traj = std::get_if<Trajectory3D>(&guidance)) {
    motion.trajectory = *traj;
  }

  if (motion.trajectory) {
    motion.poses = trajectory_to_poses(*motion.trajectory, k);
  } else if (const auto *preset = std::get_if<PresetSpec>(&guidance)) {
    motion.poses = preset_poses(*preset, k);
  } else {
    motion.poses = std::get<PoseSequence>(guidance);
    if (options.intrinsics) motion.poses.intrinsics = *options.intrinsics;
    validate(motion.poses);
  }
  return motion;
}

ControlBundle compute_bundle(const Image &image, const DepthMap &depth, const Mask &object_mask,
                             const Guidance &guidance, const RunOptions &options) {
  require(depth.width() == image.width() && depth.height() == image.height(), ErrorCode::kShape,
          "depth map and image dimensions differ");
  require(object_mask.width() == image.width() && object_mask.height() == image.height(),
          ErrorCode::kShape, "object mask and image dimensions differ");
  require(!object_mask.empty(), ErrorCode::kValidation,
          "object mask is empty; layer control needs an object region");

  ControlBundle bundle;
  ObjectMotion motion = derive_motion(guidance, depth, options);
  bundle.trajectory = std::move(motion.trajectory);
  bundle.poses_obj = std::move(motion.poses);
  bundle.poses_bg = background_poses(options.background, bundle.poses_obj);
  bundle.warped_masks = warp_mask_sequence(object_mask, depth, bundle.poses_obj);
  bundle.union_mask = union_mask(bundle.warped_masks);
  bundle.pyramid = mask_pyramid(bundle.union_mask, options.pyramid_levels, options.kernel);
  bundle.plucker_fused = build_control_volume(bundle.poses_obj, options.background, bundle.pyramid,
                                              image.width(), image.height(), options.plucker);
  if (options.swl) {
    SwlConfig config;
    config.seed = options.seed;
    config.downsample = options.latent_downsample;
    config.cutoff = options.cutoff;
    const int ds = options.latent_downsample;
    require(ds >= 1, ErrorCode::kValidation, "latent downsample must be >= 1");
    config.shape = {bundle.poses_obj.size(), options.latent_channels,
                    static_cast<std::size_t>((image.height() + ds - 1) / ds),
                    static_cast<std::size_t>((image.width() + ds - 1) / ds)};
    bundle.swl = make_swl(config, depth, bundle.poses_obj, bundle.warped_masks);
  }
  return bundle;
}

std::map<std::string, std::string> bundle_files(const ControlBundle &bundle,
                                                const RunOptions &options, const json &inputs) {
  std::map<std::string, std::string> files;
  if (bundle.trajectory) files["trajectory3d.json"] = serialize(to_json(*bundle.trajectory));
  files["poses_obj.json"] = serialize(to_json(bundle.poses_obj));
  if (bundle.poses_bg) files["poses_bg.json"] = serialize(to_json(*bundle.poses_bg));
  for (std::size_t i = 0; i < bundle.warped_masks.size(); ++i) {
    files[warped_mask_filename(i)] = encode_mask(bundle.warped_masks[i]);
  }
  files["union_mask.png"] = encode_mask(bundle.union_mask);
  for (std::size_t s = 0; s < bundle.pyramid.levels.size(); ++s) {
    files["pyramid/" + pyramid_level_filename(s)] = encode_mask(bundle.pyramid.levels[s]);
  }
  files["pyramid/pyramid.json"] = pyramid_manifest_json(bundle.pyramid);

  std::vector<std::string> encoded(bundle.plucker_fused.size());
  parallel_for(encoded.size(), [&](std::size_t s) { encoded[s] = encode_tensor(bundle.plucker_fused[s]); });
  for (std::size_t s = 0; s < encoded.size(); ++s) {
    files[indexed_name("plucker/scale_%zu.otsr", s)] = std::move(encoded[s]);
  }

  if (bundle.swl) {
    files["swl.otsr"] = encode_tensor(bundle.swl->values);
    const auto &shape = bundle.swl->values.shape();
    files["swl.json"] = serialize({{"seed", bundle.swl->seed},
                                   {"d0", options.cutoff},
                                   {"downsample", options.latent_downsample},
                                   {"shape", shape},
                                   {"poses", "poses_obj.json"},
                                   {"masks", "warped_masks/"}});
  }

  json hashes = json::object();
  for (const auto &[name, bytes] : files) hashes[name] = sha256_hex(bytes);
  json manifest = {{"format", kManifestFormat},
                   {"inputs", inputs},
                   {"options", to_json(options)},
                   {"files", hashes}};
  files["manifest.json"] = manifest.dump(2) + "\n";
  return files;
}

void write_bundle(const std::map<std::string, std::string> &files, const fs::path &out_dir) {
  for (const auto &[name, bytes] : files) {
    const fs::path target = out_dir / name;
    fs::create_directories(target.parent_path());
    write_file(target, bytes);
  }
}

namespace {

const char *guidance_kind_name(GuidanceInput::Kind kind) {
  switch (kind) {
    case GuidanceInput::Kind::kTrajectory2D: return "traj2d";
    case GuidanceInput::Kind::kTrajectory3D: return "traj3d";
    case GuidanceInput::Kind::kPoses: return "poses";
    case GuidanceInput::Kind::kPreset: return "preset";
  }
  return "traj2d";
}

GuidanceInput::Kind parse_guidance_kind(const std::string &name) {
  if (name == "traj2d") return GuidanceInput::Kind::kTrajectory2D;
  if (name == "traj3d") return GuidanceInput::Kind::kTrajectory3D;
  if (name == "poses") return GuidanceInput::Kind::kPoses;
  if (name == "preset") return GuidanceInput::Kind::kPreset;
  fail(ErrorCode::kFormat, "unknown guidance kind '" + name + "'");
}

json file_record(const fs::path &path, const std::string &bytes) {
  return {{"path", fs::absolute(path).lexically_normal().string()}, {"sha256", sha256_hex(bytes)}};
}

void check_record(const json &record, const std::string &bytes, const char *what) {
  require(record.at("sha256").get<std::string>() == sha256_hex(bytes), ErrorCode::kValidation,
          std::string(what) + " changed since the manifest was written");
}

struct LoadedInputs {
  Image image;
  DepthMap depth;
  Mask mask;
  Guidance guidance;
  json record;
};

LoadedInputs load_inputs(const RunInputs &in, const RunOptions &options) {
  LoadedInputs out;
  const std::string image_bytes = read_file(in.image);
  const std::string depth_bytes = read_file(in.depth);
  const std::string mask_bytes = read_file(in.mask);
  out.image = decode_image(image_bytes);
  out.mask = decode_mask(mask_bytes, options.mask_threshold);
  out.record["image"] = file_record(in.image, image_bytes);
  out.record["mask"] = file_record(in.mask, mask_bytes);
  out.record["depth"] = file_record(in.depth, depth_bytes);
  if (looks_like_tensor(depth_bytes)) {
    out.depth = decode_depth(depth_bytes, std::nullopt);
  } else {
    const fs::path sidecar = depth_sidecar_path(in.depth);
    const DepthRange range = load_depth_range(sidecar);
    out.depth = decode_depth_png(depth_bytes, range);
    out.record["depth"]["sidecar"] = file_record(sidecar, read_file(sidecar));
  }

  json guidance = {{"kind", guidance_kind_name(in.guidance.kind)}};
  if (in.guidance.kind == GuidanceInput::Kind::kPreset) {
    out.guidance = in.guidance.preset;
    guidance["preset"] = to_json(in.guidance.preset);
  } else {
    const std::string bytes = read_file(in.guidance.path);
    const json doc = parse_json(bytes);
    switch (in.guidance.kind) {
      case GuidanceInput::Kind::kTrajectory2D: out.guidance = trajectory2d_from_json(doc); break;
      case GuidanceInput::Kind::kTrajectory3D: out.guidance = trajectory3d_from_json(doc); break;
      default: out.guidance = poses_from_json(doc); break;
    }
    guidance.update(file_record(in.guidance.path, bytes));
  }
  out.record["guidance"] = guidance;
  return out;
}

}  // namespace

ControlBundle run(const RunInputs &inputs, const RunOptions &options, const fs::path &out_dir) {
  LoadedInputs loaded = load_inputs(inputs, options);
  ControlBundle bundle =
      compute_bundle(loaded.image, loaded.depth, loaded.mask, loaded.guidance, options);
  write_bundle(bundle_files(bundle, options, loaded.record), out_dir);
  return bundle;
}

ControlBundle run_from_manifest(const fs::path &manifest_path, const fs::path &out_dir) {
  const json manifest = load_json(manifest_path);
  require(manifest.value("format", std::string()) == kManifestFormat, ErrorCode::kFormat,
          "not an objctrl bundle manifest");
  RunOptions options = run_options_from_json(manifest.at("options"));
  RunInputs inputs;
  try {
    const json &rec = manifest.at("inputs");
    inputs.image = rec.at("image").at("path").get<std::string>();
    inputs.depth = rec.at("depth").at("path").get<std::string>();
    inputs.mask = rec.at("mask").at("path").get<std::string>();
    const json &g = rec.at("guidance");
    inputs.guidance.kind = parse_guidance_kind(g.at("kind").get<std::string>());
    if (inputs.guidance.kind == GuidanceInput::Kind::kPreset) {
      inputs.guidance.preset = preset_from_json(g.at("preset"));
    } else {
      inputs.guidance.path = g.at("path").get<std::string>();
    }

    check_record(rec.at("image"), read_file(inputs.image), "image");
    check_record(rec.at("depth"), read_file(inputs.depth), "depth map");
    if (rec.at("depth").contains("sidecar")) {
      check_record(rec.at("depth").at("sidecar"),
                   read_file(rec.at("depth").at("sidecar").at("path").get<std::string>()),
                   "depth sidecar");
    }
    check_record(rec.at("mask"), read_file(inputs.mask), "object mask");
    if (inputs.guidance.kind != GuidanceInput::Kind::kPreset) {
      check_record(g, read_file(inputs.guidance.path), "guidance file");
    }
  } catch (const json::exception &e) {
    fail(ErrorCode::kFormat, std::string("malformed manifest: ") + e.what());
  }
  return run(inputs, options, out_dir);
}

}  // namespace objctrl
