// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/tensor.hpp"
#include "objctrl/trajectory_lift.hpp"

namespace objctrl::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

Trajectory3D random_trajectory3d(Rng &rng, std::size_t n, int width, int height, double dmin,
                                  double dmax);
CameraPose random_pose(Rng &rng);
Mask random_mask(Rng &rng, int width, int height, double density);
Mask disk_mask(int width, int height, double cx, double cy, double radius);
DepthMap random_smooth_depth(Rng &rng, int width, int height, double dmin, double dmax);
Tensor random_tensor(Rng &rng, const Tensor::Shape &shape);
Image gradient_image(int width, int height);
PoseSequence identity_poses(std::size_t n, const Intrinsics &k);

/// image.png, depth.otsr, mask.png and stroke.json for a small scene.
struct SceneFiles {
  std::filesystem::path image, depth, mask, stroke;
};
SceneFiles write_scene(const std::filesystem::path &dir, Rng &rng, int width, int height);

/// Runs the objctrl binary with the given arguments. stdout is captured;
/// returns the exit status.
int run_cli(const std::vector<std::string> &args, std::string *stdout_text = nullptr,
            const std::vector<std::pair<std::string, std::string>> &env = {});

std::string cli_path();

/// Minimal independent PNG writer: filter 0 rows, zlib stream, no ancillary
/// chunks. color_type 0 = gray, 2 = RGB; samples are row-major per channel.
std::string raw_png(int width, int height, int bit_depth, int color_type,
                    const std::vector<std::uint16_t> &samples);

}  // namespace objctrl::testing
