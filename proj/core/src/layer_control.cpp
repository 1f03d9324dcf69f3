// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/layer_control.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "objctrl/error.hpp"
#include "objctrl/parallel.hpp"
#include "objctrl/tensor_io.hpp"

namespace objctrl {

namespace fs = std::filesystem;

std::string to_string(BackgroundMode mode) {
  switch (mode) {
    case BackgroundMode::kStatic: return "static";
    case BackgroundMode::kReversed: return "reversed";
    case BackgroundMode::kNone: return "none";
  }
  return "static";
}

BackgroundMode parse_background_mode(const std::string &name) {
  if (name == "static") return BackgroundMode::kStatic;
  if (name == "reversed") return BackgroundMode::kReversed;
  if (name == "none") return BackgroundMode::kNone;
  fail(ErrorCode::kValidation, "unknown background mode '" + name + "'");
}

Mask union_mask(std::span<const Mask> masks) {
  require(!masks.empty(), ErrorCode::kValidation, "union needs at least one mask");
  std::vector<std::uint8_t> bits(masks.front().bits().begin(), masks.front().bits().end());
  for (const auto &m : masks.subspan(1)) {
    require(m.same_size(masks.front()), ErrorCode::kShape, "union masks differ in size");
    const auto other = m.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] |= other[i];
  }
  return Mask(masks.front().width(), masks.front().height(), std::move(bits));
}

Mask dilate(const Mask &mask, int kernel) {
  require(kernel >= 1 && kernel % 2 == 1, ErrorCode::kValidation,
          "dilation kernel must be a positive odd size");
  const int r = kernel / 2;
  const int w = mask.width();
  const int h = mask.height();
  // Separable: a square structuring element is a row pass then a column pass.
  Mask rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dx = std::max(0, x - r); dx <= std::min(w - 1, x + r) && !hit; ++dx) {
        hit = mask.at(dx, y);
      }
      rows.set(x, y, hit);
    }
  }
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = std::max(0, y - r); dy <= std::min(h - 1, y + r) && !hit; ++dy) {
        hit = rows.at(x, dy);
      }
      out.set(x, y, hit);
    }
  }
  return out;
}

Mask max_pool(const Mask &mask, int factor) {
  require(factor >= 1, ErrorCode::kValidation, "pooling factor must be >= 1");
  const int w = (mask.width() + factor - 1) / factor;
  const int h = (mask.height() + factor - 1) / factor;
  Mask out(w, h);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) out.set(x / factor, y / factor, true);
    }
  }
  return out;
}

Mask max_pool2(const Mask &mask) { return max_pool(mask, 2); }

MaskPyramid mask_pyramid(const Mask &union_mask, int levels, int kernel) {
  require(levels >= 1, ErrorCode::kValidation, "pyramid needs at least one level");
  MaskPyramid pyramid{{}, kernel};
  pyramid.levels.reserve(static_cast<std::size_t>(levels));
  pyramid.levels.push_back(dilate(union_mask, kernel));
  for (int s = 1; s < levels; ++s) {
    pyramid.levels.push_back(dilate(max_pool2(pyramid.levels.back()), kernel));
  }
  return pyramid;
}

Tensor fuse_volumes(const Tensor &object, const Tensor &background, const Mask &mask) {
  require(object.rank() == 4, ErrorCode::kShape, "feature volume must be [N, C, h, w]");
  require(object.shape() == background.shape(), ErrorCode::kShape,
          "object and background volumes differ in shape");
  require(object.dim(2) == static_cast<std::size_t>(mask.height()) &&
              object.dim(3) == static_cast<std::size_t>(mask.width()),
          ErrorCode::kShape, "fusion mask does not match the volume's spatial dims");
  Tensor out(object.shape());
  const std::size_t plane = mask.bits().size();
  const std::size_t slices = object.dim(0) * object.dim(1);
  auto dst = out.data();
  auto obj = object.data();
  auto bg = background.data();
  const auto bits = mask.bits();
  for (std::size_t s = 0; s < slices; ++s) {
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t at = s * plane + i;
      dst[at] = bits[i] ? obj[at] : bg[at];
    }
  }
  return out;
}

std::optional<PoseSequence> background_poses(BackgroundMode mode, const PoseSequence &object) {
  switch (mode) {
    case BackgroundMode::kStatic:
      return PoseSequence{object.intrinsics,
                          std::vector<CameraPose>(object.frames.size(), CameraPose::identity())};
    case BackgroundMode::kReversed: {
      PoseSequence out{object.intrinsics, {}};
      out.frames.reserve(object.frames.size());
      for (const auto &pose : object.frames) {
        require(pose.has_identity_rotation(), ErrorCode::kValidation,
                "reversed background needs rotation-free object poses");
        CameraPose reversed;
        reversed.translation = Eigen::Vector3d::Zero() - pose.translation;
        out.frames.push_back(reversed);
      }
      return out;
    }
    case BackgroundMode::kNone:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Tensor> build_control_volume(const PoseSequence &object, BackgroundMode mode,
                                         const MaskPyramid &pyramid, int width, int height,
                                         const PluckerOptions &options) {
  validate(object);
  require(!pyramid.levels.empty(), ErrorCode::kValidation, "mask pyramid is empty");
  require(pyramid.levels.front().width() == width && pyramid.levels.front().height() == height,
          ErrorCode::kShape, "pyramid level 0 does not match the output size");
  const std::optional<PoseSequence> background = background_poses(mode, object);

  std::vector<Tensor> out(pyramid.levels.size());
  parallel_for(out.size(), [&](std::size_t s) {
    const Mask &level = pyramid.levels[s];
    const double factor = static_cast<double>(std::size_t{1} << s);
    PoseSequence obj_scaled = object;
    obj_scaled.intrinsics = object.intrinsics.downscaled(factor);
    Tensor obj_volume = plucker_volume(obj_scaled, level.width(), level.height(), options);
    Tensor bg_volume(obj_volume.shape(), 0.0f);
    if (background) {
      PoseSequence bg_scaled = *background;
      bg_scaled.intrinsics = background->intrinsics.downscaled(factor);
      bg_volume = plucker_volume(bg_scaled, level.width(), level.height(), options);
    }
    out[s] = fuse_volumes(obj_volume, bg_volume, level);
  });
  return out;
}

std::string pyramid_level_filename(std::size_t level) {
  char name[32];
  std::snprintf(name, sizeof(name), "level_%zu.png", level);
  return name;
}

std::string pyramid_manifest_json(const MaskPyramid &pyramid) {
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t s = 0; s < pyramid.levels.size(); ++s) files.push_back(pyramid_level_filename(s));
  nlohmann::json doc = {{"levels", pyramid.levels.size()},
                        {"kernel", pyramid.kernel_size},
                        {"files", files}};
  return doc.dump(2) + "\n";
}

void save_pyramid(const MaskPyramid &pyramid, const fs::path &dir) {
  fs::create_directories(dir);
  for (std::size_t s = 0; s < pyramid.levels.size(); ++s) {
    save_mask(pyramid.levels[s], dir / pyramid_level_filename(s));
  }
  write_file(dir / "pyramid.json", pyramid_manifest_json(pyramid));
}

MaskPyramid load_pyramid(const fs::path &manifest) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::kFormat, "pyramid manifest is not valid JSON: " + std::string(e.what()));
  }
  require(doc.contains("files") && doc["files"].is_array() && doc.contains("kernel"),
          ErrorCode::kFormat, "pyramid manifest needs \"files\" and \"kernel\"");
  MaskPyramid pyramid{{}, doc["kernel"].get<int>()};
  for (const auto &f : doc["files"]) {
    pyramid.levels.push_back(load_mask(manifest.parent_path() / f.get<std::string>()));
  }
  require(!doc.contains("levels") || doc["levels"].get<std::size_t>() == pyramid.levels.size(),
          ErrorCode::kFormat, "pyramid manifest level count does not match its file list");
  return pyramid;
}

}  // namespace objctrl
