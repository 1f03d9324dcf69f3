// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <memory>
#include <optional>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/camera_presets.hpp"
#include "objctrl/error.hpp"
#include "objctrl/json_formats.hpp"
#include "objctrl/layer_control.hpp"
#include "objctrl/metrics.hpp"
#include "objctrl/pipeline.hpp"
#include "objctrl/preview_service.hpp"
#include "objctrl/shared_warp_latent.hpp"
#include "objctrl/tensor_io.hpp"
#include "objctrl/trajectory_lift.hpp"
#include "objctrl/warp_engine.hpp"

namespace objctrl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Explicit intrinsics win; otherwise default_intrinsics(width, height).
struct IntrinsicsFlags {
  std::optional<double> fx, fy, cx, cy;
  int width = 576;
  int height = 320;

  void attach(CLI::App *app) {
    app->add_option("--width", width, "Image width in pixels (for default intrinsics)");
    app->add_option("--height", height, "Image height in pixels (for default intrinsics)");
    app->add_option("--fx", fx, "Focal length x (pixels)");
    app->add_option("--fy", fy, "Focal length y (pixels)");
    app->add_option("--cx", cx, "Principal point x (pixels)");
    app->add_option("--cy", cy, "Principal point y (pixels)");
  }

  bool any_explicit() const { return fx || fy || cx || cy; }

  Intrinsics resolve() const {
    if (!any_explicit()) return default_intrinsics(width, height);
    require(fx && fy && cx && cy, ErrorCode::kUsage, "--fx, --fy, --cx and --cy go together");
    Intrinsics k{*fx, *fy, *cx, *cy};
    validate(k);
    return k;
  }
};

std::vector<fs::path> expand_masks(const std::vector<std::string> &inputs) {
  std::vector<fs::path> out;
  for (const auto &item : inputs) {
    const fs::path p(item);
    if (fs::is_directory(p)) {
      std::vector<fs::path> pngs;
      for (const auto &entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") pngs.push_back(entry.path());
      }
      std::sort(pngs.begin(), pngs.end());
      out.insert(out.end(), pngs.begin(), pngs.end());
    } else {
      out.push_back(p);
    }
  }
  require(!out.empty(), ErrorCode::kUsage, "no mask files given");
  return out;
}

std::vector<Mask> load_masks(const std::vector<std::string> &inputs, int threshold) {
  std::vector<Mask> masks;
  for (const auto &p : expand_masks(inputs)) masks.push_back(load_mask(p, threshold));
  return masks;
}

std::string frame_png(std::size_t i) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%03zu.png", i);
  return name;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return kExitUsage;
    case ErrorCode::kIo:
    case ErrorCode::kFormat: return kExitIo;
    default: return kExitValidation;
  }
}

struct Context {
  std::ostream &out;
  bool json_mode = false;

  /// Emits the single JSON document (--json) or the human summary.
  void report(const json &doc, const std::string &summary) const {
    if (json_mode) {
      out << doc.dump() << "\n";
    } else {
      out << summary << "\n";
    }
  }
};

}  // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"objctrl: object-motion control signals from trajectories, depth and masks",
               "objctrl"};
  app.require_subcommand(1);
  bool json_mode = false;
  std::vector<std::pair<CLI::App *, std::function<void(Context &)>>> commands;

  auto add_command = [&](const std::string &name, const std::string &description) {
    CLI::App *sub = app.add_subcommand(name, description);
    sub->add_flag("--json", json_mode, "Emit a single JSON document on stdout");
    return sub;
  };

  // lift --------------------------------------------------------------------
  {
    struct Flags {
      std::string traj;
      std::string depth;
      std::string output;
      std::size_t frames = kDefaultFrameCount;
      double theta = kDefaultSmoothingTheta;
      bool no_normalize = false;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("lift", "Lift a 2D stroke to a smoothed N-frame 3D trajectory");
    sub->add_option("--traj", f->traj, "2D trajectory JSON")->required();
    sub->add_option("--depth", f->depth, "Depth map (OTSR rank 2, or 16-bit PNG + sidecar)")->required();
    sub->add_option("--frames", f->frames, "Output frame count")->check(CLI::Range(2, 100000));
    sub->add_option("--theta", f->theta, "Depth-gradient std threshold");
    sub->add_flag("--no-normalize", f->no_normalize, "Apply theta to raw depth differences");
    sub->add_option("-o,--output", f->output, "Output 3D trajectory JSON")->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const Trajectory3D t = lift(load_trajectory2d(f->traj), load_depth(f->depth), f->frames,
                                  SmoothingConfig{f->theta, !f->no_normalize});
      save_json(to_json(t), f->output);
      ctx.report({{"command", "lift"}, {"output", f->output}, {"trajectory", to_json(t)}},
                 "wrote " + std::to_string(t.points.size()) + "-point trajectory to " + f->output);
    });
  }

  // poses -------------------------------------------------------------------
  {
    struct Flags {
      std::string traj;
      std::string output;
      IntrinsicsFlags intrinsics;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("poses", "Convert a 3D trajectory to per-frame camera poses");
    sub->add_option("--traj", f->traj, "3D trajectory JSON")->required();
    f->intrinsics.attach(sub);
    sub->add_option("-o,--output", f->output, "Output pose JSON")->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const PoseSequence poses = trajectory_to_poses(load_trajectory3d(f->traj), f->intrinsics.resolve());
      save_json(to_json(poses), f->output);
      ctx.report({{"command", "poses"}, {"output", f->output}, {"poses", to_json(poses)}},
                 "wrote " + std::to_string(poses.size()) + " poses to " + f->output);
    });
  }

  // plucker -----------------------------------------------------------------
  {
    struct Flags {
      std::string poses_path;
      std::string output;
      int width{};
      int height{};
      bool no_translation = false;
      bool normalize = false;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("plucker", "Write the [N,6,H,W] Plücker volume of a pose file");
    sub->add_option("--poses", f->poses_path, "Pose JSON")->required();
    sub->add_option("--width", f->width, "Volume width")->required()->check(CLI::PositiveNumber);
    sub->add_option("--height", f->height, "Volume height")->required()->check(CLI::PositiveNumber);
    sub->add_flag("--no-translation", f->no_translation, "Do not add t to the ray direction");
    sub->add_flag("--normalize", f->normalize, "Unit-normalize ray directions");
    sub->add_option("-o,--output", f->output, "Output OTSR file")->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const Tensor volume = plucker_volume(load_poses(f->poses_path), f->width, f->height,
                                           PluckerOptions{!f->no_translation, f->normalize});
      save_tensor(volume, f->output);
      ctx.report({{"command", "plucker"}, {"output", f->output}, {"shape", volume.shape()}},
                 "wrote Plücker volume to " + f->output);
    });
  }

  // warp-f->mask ---------------------------------------------------------------
  {
    struct Flags {
      std::string mask;
      std::string depth;
      std::string poses_path;
      std::string output;
      int threshold = kDefaultMaskThreshold;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("warp-mask", "Warp the object mask to every pose");
    sub->add_option("--mask", f->mask, "Object mask PNG (8-bit gray)")->required();
    sub->add_option("--depth", f->depth, "Depth map")->required();
    sub->add_option("--poses", f->poses_path, "Pose JSON")->required();
    sub->add_option("--threshold", f->threshold, "Mask ingest threshold")->check(CLI::Range(0, 255));
    sub->add_option("-o,--output", f->output, "Output directory")->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const auto masks = warp_mask_sequence(load_mask(f->mask, f->threshold), load_depth(f->depth),
                                            load_poses(f->poses_path));
      fs::create_directories(f->output);
      json files = json::array();
      json areas = json::array();
      for (std::size_t i = 0; i < masks.size(); ++i) {
        save_mask(masks[i], fs::path(f->output) / frame_png(i));
        files.push_back(frame_png(i));
        areas.push_back(masks[i].count());
      }
      ctx.report({{"command", "warp-mask"}, {"output", f->output}, {"files", files}, {"areas", areas}},
                 "wrote " + std::to_string(masks.size()) + " warped masks to " + f->output);
    });
  }

  // pyramid -----------------------------------------------------------------
  {
    struct Flags {
      std::vector<std::string> masks;
      std::string output;
      int levels = kDefaultPyramidLevels;
      int kernel = kDefaultDilationKernel;
      int threshold = kDefaultMaskThreshold;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("pyramid", "Union warped masks and build the scale-wise dilated pyramid");
    sub->add_option("--masks", f->masks, "Mask PNGs or a directory of them")->required();
    sub->add_option("--levels", f->levels, "Number of scales")->check(CLI::PositiveNumber);
    sub->add_option("--kernel", f->kernel, "Odd square dilation kernel size")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", f->threshold, "Mask ingest threshold")->check(CLI::Range(0, 255));
    sub->add_option("-o,--output", f->output, "Output directory")->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const auto loaded = load_masks(f->masks, f->threshold);
      const MaskPyramid pyramid = mask_pyramid(union_mask(loaded), f->levels, f->kernel);
      save_pyramid(pyramid, f->output);
      json areas = json::array();
      for (const auto &level : pyramid.levels) areas.push_back(level.count());
      ctx.report({{"command", "pyramid"},
                  {"output", f->output},
                  {"manifest", (fs::path(f->output) / "pyramid.json").string()},
                  {"areas", areas}},
                 "wrote " + std::to_string(pyramid.levels.size()) + "-level pyramid to " + f->output);
    });
  }

  // fuse --------------------------------------------------------------------
  {
    struct Flags {
      std::string obj;
      std::string bg;
      std::string mask;
      std::string poses_path;
      std::string pyramid_path;
      std::string bg_mode = "static";
      std::string output;
      int threshold = kDefaultMaskThreshold;
      int width = 0;
      int height = 0;
      bool no_translation = false;
      bool normalize = false;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command(
        "fuse", "Mask-select object vs background volumes, or build per-scale control volumes");
    auto *obj_opt = sub->add_option("--obj", f->obj, "Object feature volume (OTSR [N,C,h,w])");
    auto *bg_opt = sub->add_option("--bg", f->bg, "Background feature volume (OTSR [N,C,h,w])");
    auto *mask_opt = sub->add_option("--mask", f->mask, "Fusion mask PNG at the volume's h x w");
    auto *poses_opt = sub->add_option("--poses", f->poses_path, "Object pose JSON (control-volume mode)");
    auto *pyr_opt = sub->add_option("--pyramid", f->pyramid_path, "pyramid.json (control-volume mode)");
    sub->add_option("--bg-mode", f->bg_mode, "Background poses: static, reversed or none")
        ->check(CLI::IsMember({"static", "reversed", "none"}));
    sub->add_option("--width", f->width, "Full-resolution width (control-volume mode)");
    sub->add_option("--height", f->height, "Full-resolution height (control-volume mode)");
    sub->add_option("--threshold", f->threshold, "Mask ingest threshold")->check(CLI::Range(0, 255));
    sub->add_flag("--no-translation", f->no_translation, "Do not add t to the ray direction");
    sub->add_flag("--normalize", f->normalize, "Unit-normalize ray directions");
    sub->add_option("-o,--output", f->output, "Output OTSR (tensor mode) or directory")->required();
    obj_opt->needs(bg_opt, mask_opt)->excludes(poses_opt, pyr_opt);
    poses_opt->needs(pyr_opt);
    commands.emplace_back(sub, [f](Context &ctx) {
      if (!f->obj.empty()) {
        const Tensor fused = fuse_volumes(load_tensor(f->obj), load_tensor(f->bg), load_mask(f->mask, f->threshold));
        save_tensor(fused, f->output);
        ctx.report({{"command", "fuse"}, {"output", f->output}, {"shape", fused.shape()}},
                   "wrote fused volume to " + f->output);
        return;
      }
      require(!f->poses_path.empty(), ErrorCode::kUsage, "fuse needs --obj/--bg/--mask or --poses/--pyramid");
      const MaskPyramid pyramid = load_pyramid(f->pyramid_path);
      const int w = f->width > 0 ? f->width : pyramid.levels.front().width();
      const int h = f->height > 0 ? f->height : pyramid.levels.front().height();
      const auto volumes = build_control_volume(load_poses(f->poses_path), parse_background_mode(f->bg_mode),
                                                pyramid, w, h, PluckerOptions{!f->no_translation, f->normalize});
      fs::create_directories(f->output);
      json files = json::array();
      for (std::size_t s = 0; s < volumes.size(); ++s) {
        const std::string name = "scale_" + std::to_string(s) + ".otsr";
        save_tensor(volumes[s], fs::path(f->output) / name);
        files.push_back(name);
      }
      ctx.report({{"command", "fuse"}, {"output", f->output}, {"files", files}},
                 "wrote " + std::to_string(volumes.size()) + " fused control volumes to " + f->output);
    });
  }

  // swl ---------------------------------------------------------------------
  {
    struct Flags {
      std::vector<std::string> masks;
      std::string depth;
      std::string poses_path;
      std::string output;
      std::uint64_t seed = 0;
      std::size_t channels = kDefaultLatentChannels;
      int downsample = kDefaultLatentDownsample;
      int threshold = kDefaultMaskThreshold;
      double d0 = kDefaultLowpassCutoff;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("swl", "Build the shared warping latent from seed, depth, poses, masks");
    sub->add_option("--seed", f->seed, "Noise seed");
    sub->add_option("--depth", f->depth, "Depth map at image resolution")->required();
    sub->add_option("--poses", f->poses_path, "Object pose JSON (image-resolution intrinsics)")->required();
    sub->add_option("--masks", f->masks, "Warped mask PNGs or a directory of them")->required();
    sub->add_option("--channels", f->channels, "Latent channels")->check(CLI::PositiveNumber);
    sub->add_option("--downsample", f->downsample, "Image-to-latent factor")->check(CLI::PositiveNumber);
    sub->add_option("--d0", f->d0, "Gaussian low-pass cutoff (normalized frequency)");
    sub->add_option("--threshold", f->threshold, "Mask ingest threshold")->check(CLI::Range(0, 255));
    sub->add_option("-o,--output", f->output, "Output OTSR file; a .json manifest is written beside it")
        ->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const DepthMap depth_map = load_depth(f->depth);
      const PoseSequence poses = load_poses(f->poses_path);
      const auto mask_files = expand_masks(f->masks);
      std::vector<Mask> loaded;
      json mask_names = json::array();
      for (const auto &p : mask_files) {
        loaded.push_back(load_mask(p, f->threshold));
        mask_names.push_back(p.string());
      }
      SwlConfig config;
      config.seed = f->seed;
      config.downsample = f->downsample;
      config.cutoff = f->d0;
      config.shape = {poses.size(), f->channels,
                      static_cast<std::size_t>((depth_map.height() + f->downsample - 1) / f->downsample),
                      static_cast<std::size_t>((depth_map.width() + f->downsample - 1) / f->downsample)};
      const LatentVolume z = make_swl(config, depth_map, poses, loaded);
      save_tensor(z.values, f->output);
      fs::path manifest = f->output;
      manifest.replace_extension(".json");
      const json record = {{"seed", f->seed}, {"d0", f->d0}, {"downsample", f->downsample},
                           {"shape", z.values.shape()}, {"poses", f->poses_path},
                           {"masks", mask_names}};
      save_json(record, manifest);
      ctx.report({{"command", "swl"}, {"output", f->output}, {"manifest", manifest.string()},
                  {"shape", z.values.shape()}},
                 "wrote shared warping latent to " + f->output);
    });
  }

  // preset ------------------------------------------------------------------
  {
    struct Flags {
      std::string kind;
      std::string output;
      double mag = 0.0;
      double pivot_depth = 1.0;
      std::size_t frames = kDefaultFrameCount;
      IntrinsicsFlags intrinsics;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("preset", "Generate zoom/pan/orbit camera poses");
    sub->add_option("--kind", f->kind, "zoom_in, zoom_out, pan_left, pan_right or orbit")
        ->required()
        ->check(CLI::IsMember({"zoom_in", "zoom_out", "pan_left", "pan_right", "orbit"}));
    sub->add_option("--mag", f->mag, "Magnitude (scene units; degrees for orbit)");
    sub->add_option("--frames", f->frames, "Frame count")->check(CLI::Range(2, 100000));
    sub->add_option("--pivot-depth", f->pivot_depth, "Orbit pivot depth");
    f->intrinsics.attach(sub);
    sub->add_option("-o,--output", f->output, "Output pose JSON")->required();
    commands.emplace_back(sub, [f](Context &ctx) {
      const PresetSpec spec{parse_preset_kind(f->kind), f->mag, f->frames, f->pivot_depth};
      const PoseSequence poses = preset_poses(spec, f->intrinsics.resolve());
      save_json(to_json(poses), f->output);
      ctx.report({{"command", "preset"}, {"output", f->output}, {"poses", to_json(poses)}},
                 "wrote " + std::to_string(poses.size()) + " " + f->kind + " poses to " + f->output);
    });
  }

  // objmc -------------------------------------------------------------------
  {
    struct Flags {
      std::string target;
      std::string tracked;
      std::string pairs;
      std::string output;
      bool resample_tracked = false;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("objmc", "Mean per-frame pixel distance between trajectories");
    auto *target_opt = sub->add_option("--target", f->target, "Target trajectory JSON");
    auto *tracked_opt = sub->add_option("--tracked", f->tracked, "Tracked trajectory JSON");
    auto *pairs_opt = sub->add_option("--pairs", f->pairs,
                                      "JSON list of {\"target\", \"tracked\"} path pairs");
    sub->add_flag("--resample", f->resample_tracked, "Resample tracked to the target length");
    sub->add_option("-o,--output", f->output, "Write the report JSON here");
    target_opt->needs(tracked_opt)->excludes(pairs_opt);
    tracked_opt->needs(target_opt);
    commands.emplace_back(sub, [f](Context &ctx) {
      std::vector<TrajectoryPair> list;
      if (!f->pairs.empty()) {
        const json doc = load_json(f->pairs);
        require(doc.is_array(), ErrorCode::kFormat, "--pairs must hold a JSON array");
        const fs::path base = fs::path(f->pairs).parent_path();
        for (const auto &p : doc) {
          require(p.is_object() && p.contains("target") && p.contains("tracked"), ErrorCode::kFormat,
                  "each pair needs \"target\" and \"tracked\"");
          auto resolve = [&](const std::string &s) {
            fs::path q(s);
            return q.is_absolute() ? q : base / q;
          };
          list.push_back({resolve(p["target"].get<std::string>()),
                          resolve(p["tracked"].get<std::string>())});
        }
      } else {
        require(!f->target.empty(), ErrorCode::kUsage, "objmc needs --target/--tracked or --pairs");
        list.push_back({f->target, f->tracked});
      }

      json doc;
      std::string summary;
      if (f->pairs.empty()) {
        const Trajectory2D a = load_trajectory2d(list[0].target);
        const Trajectory2D b = load_trajectory2d(list[0].tracked);
        const ObjMCReport report = f->resample_tracked ? objmc_resampled(a, b) : objmc(a, b);
        doc = {{"pairs", json::array({{{"target", f->target}, {"tracked", f->tracked},
                                       {"report", to_json(report)}}})},
               {"mean", report.mean}};
        summary = "ObjMC mean " + json(report.mean).dump() + " px over " +
                  std::to_string(report.frames_compared) + " frames";
      } else {
        const BatchReport batch = objmc_batch(list, f->resample_tracked);
        doc = to_json(batch);
        summary = "ObjMC mean " + doc["mean"].dump() + " px over " +
                  std::to_string(batch.items.size()) + " pairs";
      }
      if (!f->output.empty()) save_json(doc, f->output);
      json envelope = doc;
      envelope["command"] = "objmc";
      ctx.report(envelope, summary);
    });
  }

  // run ---------------------------------------------------------------------
  {
    struct Flags {
      std::string image;
      std::string depth;
      std::string mask;
      std::string traj2d;
      std::string traj3d;
      std::string poses_path;
      std::string preset_kind;
      std::string manifest;
      std::string output;
      std::string bg_mode = "static";
      double mag = 0.0;
      double pivot_depth = 1.0;
      double theta = kDefaultSmoothingTheta;
      double d0 = kDefaultLowpassCutoff;
      std::size_t frames = kDefaultFrameCount;
      std::size_t preset_frames = kDefaultFrameCount;
      std::size_t channels = kDefaultLatentChannels;
      int levels = kDefaultPyramidLevels;
      int kernel = kDefaultDilationKernel;
      int downsample = kDefaultLatentDownsample;
      int threshold = kDefaultMaskThreshold;
      bool swl = false;
      bool no_normalize = false;
      bool no_translation = false;
      bool normalize = false;
      std::uint64_t seed = 0;
      IntrinsicsFlags intrinsics;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("run", "Full pipeline: image, depth, mask and guidance to a control bundle");

    auto *manifest_opt = sub->add_option("--manifest", f->manifest, "Regenerate from a bundle manifest");
    auto *image_opt = sub->add_option("--image", f->image, "Conditioning image PNG");
    auto *depth_opt = sub->add_option("--depth", f->depth, "Depth map");
    auto *mask_opt = sub->add_option("--mask", f->mask, "Object mask PNG");
    auto *t2 = sub->add_option("--traj2d", f->traj2d, "Guidance: 2D stroke JSON");
    auto *t3 = sub->add_option("--traj3d", f->traj3d, "Guidance: 3D trajectory JSON");
    auto *pp = sub->add_option("--poses", f->poses_path, "Guidance: pose JSON");
    auto *pk = sub->add_option("--preset-kind", f->preset_kind, "Guidance: camera preset kind")
                   ->check(CLI::IsMember({"zoom_in", "zoom_out", "pan_left", "pan_right", "orbit"}));
    sub->add_option("--mag", f->mag, "Preset magnitude");
    sub->add_option("--pivot-depth", f->pivot_depth, "Orbit pivot depth");
    sub->add_option("--preset-frames", f->preset_frames, "Preset frame count")->check(CLI::Range(2, 100000));
    sub->add_option("--frames", f->frames, "Frames for 2D strokes")->check(CLI::Range(2, 100000));
    sub->add_option("--theta", f->theta, "Depth smoothing threshold");
    sub->add_flag("--no-normalize", f->no_normalize, "Apply theta to raw depth differences");
    sub->add_option("--levels", f->levels, "Pyramid scales")->check(CLI::PositiveNumber);
    sub->add_option("--kernel", f->kernel, "Dilation kernel size")->check(CLI::PositiveNumber);
    sub->add_option("--bg-mode", f->bg_mode, "static, reversed or none")
        ->check(CLI::IsMember({"static", "reversed", "none"}));
    sub->add_flag("--no-translation", f->no_translation, "Do not add t to the ray direction");
    sub->add_flag("--normalize", f->normalize, "Unit-normalize ray directions");
    sub->add_flag("--swl", f->swl, "Also build the shared warping latent");
    sub->add_option("--seed", f->seed, "SWL noise seed");
    sub->add_option("--d0", f->d0, "SWL low-pass cutoff");
    sub->add_option("--downsample", f->downsample, "SWL latent downsample")->check(CLI::PositiveNumber);
    sub->add_option("--channels", f->channels, "SWL latent channels")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", f->threshold, "Mask ingest threshold")->check(CLI::Range(0, 255));
    sub->add_option("--fx", f->intrinsics.fx, "Focal length x");
    sub->add_option("--fy", f->intrinsics.fy, "Focal length y");
    sub->add_option("--cx", f->intrinsics.cx, "Principal point x");
    sub->add_option("--cy", f->intrinsics.cy, "Principal point y");
    sub->add_option("-o,--output", f->output, "Output bundle directory")->required();
    manifest_opt->excludes(image_opt, depth_opt, mask_opt, t2, t3, pp, pk);

    commands.emplace_back(sub, [f](Context &ctx) {
      ControlBundle bundle;
      if (!f->manifest.empty()) {
        bundle = run_from_manifest(f->manifest, f->output);
      } else {
        require(!f->image.empty() && !f->depth.empty() && !f->mask.empty(), ErrorCode::kUsage,
                "run needs --image, --depth and --mask (or --manifest)");
        const int sources = !f->traj2d.empty() + !f->traj3d.empty() + !f->poses_path.empty() + !f->preset_kind.empty();
        require(sources == 1, ErrorCode::kUsage,
                "run needs exactly one of --traj2d, --traj3d, --poses, --preset-kind");
        RunInputs inputs{f->image, f->depth, f->mask, {}};
        if (!f->traj2d.empty()) {
          inputs.guidance = {GuidanceInput::Kind::kTrajectory2D, f->traj2d, {}};
        } else if (!f->traj3d.empty()) {
          inputs.guidance = {GuidanceInput::Kind::kTrajectory3D, f->traj3d, {}};
        } else if (!f->poses_path.empty()) {
          inputs.guidance = {GuidanceInput::Kind::kPoses, f->poses_path, {}};
        } else {
          inputs.guidance.kind = GuidanceInput::Kind::kPreset;
          inputs.guidance.preset = {parse_preset_kind(f->preset_kind), f->mag, f->preset_frames, f->pivot_depth};
          validate(inputs.guidance.preset);
        }
        RunOptions options;
        options.frames = f->frames;
        options.smoothing = {f->theta, !f->no_normalize};
        options.pyramid_levels = f->levels;
        options.kernel = f->kernel;
        options.background = parse_background_mode(f->bg_mode);
        options.plucker = {!f->no_translation, f->normalize};
        if (f->intrinsics.any_explicit()) options.intrinsics = f->intrinsics.resolve();
        options.swl = f->swl;
        options.seed = f->seed;
        options.cutoff = f->d0;
        options.latent_downsample = f->downsample;
        options.latent_channels = f->channels;
        options.mask_threshold = f->threshold;
        bundle = run(inputs, options, f->output);
      }
      ctx.report({{"command", "run"},
                  {"output", f->output},
                  {"manifest", (fs::path(f->output) / "manifest.json").string()},
                  {"frames", bundle.poses_obj.size()},
                  {"scales", bundle.plucker_fused.size()},
                  {"swl", bundle.swl.has_value()}},
                 "wrote control bundle to " + f->output);
    });
  }

  // serve -------------------------------------------------------------------
  {
    struct Flags {
      std::string host = "127.0.0.1";
      std::string ui_dir;
      int port = 8080;
    };
    auto f = std::make_shared<Flags>();
    auto *sub = add_command("serve", "Run the local preview HTTP service");
    sub->add_option("--host", f->host, "Bind address");
    sub->add_option("--port", f->port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    sub->add_option("--ui-dir", f->ui_dir, "Directory with the built authoring UI");
    commands.emplace_back(sub, [f](Context &ctx) {
      PreviewService service;
      HttpServer server(service, ServeOptions{f->host, f->port, f->ui_dir});
      ctx.report({{"command", "serve"}, {"host", f->host}, {"port", server.port()}},
                 "serving on http://" + f->host + ":" + std::to_string(server.port()));
      ctx.out.flush();
      server.wait();
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  Context ctx{out, json_mode};
  try {
    for (auto &[sub, handler] : commands) {
      if (sub->parsed()) handler(ctx);
    }
  } catch (const Error &e) {
    if (json_mode) {
      out << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
    }
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace objctrl::cli
