// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <sys/wait.h>
#include <zlib.h>

#include <Eigen/Geometry>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "objctrl/json_formats.hpp"
#include "objctrl/tensor_io.hpp"

namespace objctrl::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "objctrl-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Trajectory3D random_trajectory3d(Rng &rng, std::size_t n, int width, int height, double dmin,
                                  double dmax) {
  Trajectory3D t;
  for (std::size_t i = 0; i < n; ++i) {
    t.points.push_back({rng.uniform(0.0, width - 1.0), rng.uniform(0.0, height - 1.0),
                        rng.uniform(dmin, dmax)});
  }
  return t;
}

CameraPose random_pose(Rng &rng) {
  // Normalized Gaussian quaternion gives a uniform rotation.
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng.engine()), g(rng.engine()), g(rng.engine()), g(rng.engine()));
  q.normalize();
  CameraPose pose;
  pose.rotation = q.toRotationMatrix();
  pose.translation = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
  return pose;
}

Mask random_mask(Rng &rng, int width, int height, double density) {
  Mask m(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) m.set(x, y, rng.coin(density));
  return m;
}

Mask disk_mask(int width, int height, double cx, double cy, double radius) {
  Mask m(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      m.set(x, y, (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius);
  return m;
}

DepthMap random_smooth_depth(Rng &rng, int width, int height, double dmin, double dmax) {
  const double ax = rng.uniform(0.5, 3.0), ay = rng.uniform(0.5, 3.0);
  const double px = rng.uniform(0, 6.3), py = rng.uniform(0, 6.3);
  std::vector<float> data(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double s = 0.5 + 0.25 * std::sin(ax * x / width * 6.283 + px) +
                       0.25 * std::cos(ay * y / height * 6.283 + py);
      data[static_cast<std::size_t>(y) * width + x] = static_cast<float>(dmin + s * (dmax - dmin));
    }
  return DepthMap(width, height, std::move(data));
}

Tensor random_tensor(Rng &rng, const Tensor::Shape &shape) {
  Tensor t(shape);
  std::normal_distribution<float> g;
  for (float &v : t.data()) v = g(rng.engine());
  return t;
}

Image gradient_image(int width, int height) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      auto *px = &data[(static_cast<std::size_t>(y) * width + x) * 3];
      px[0] = static_cast<std::uint8_t>(x * 255 / std::max(1, width - 1));
      px[1] = static_cast<std::uint8_t>(y * 255 / std::max(1, height - 1));
      px[2] = 128;
    }
  return Image(width, height, 3, std::move(data));
}

PoseSequence identity_poses(std::size_t n, const Intrinsics &k) {
  return {k, std::vector<CameraPose>(n)};
}

SceneFiles write_scene(const fs::path &dir, Rng &rng, int width, int height) {
  SceneFiles files{dir / "image.png", dir / "depth.otsr", dir / "mask.png", dir / "stroke.json"};
  write_file(files.image, encode_image(gradient_image(width, height)));
  save_depth(random_smooth_depth(rng, width, height, 1.0, 3.0), files.depth);
  const double cx = rng.uniform(width * 0.3, width * 0.5);
  const double cy = rng.uniform(height * 0.3, height * 0.7);
  save_mask(disk_mask(width, height, cx, cy, std::min(width, height) * 0.12), files.mask);
  Trajectory2D stroke;
  stroke.points.push_back({std::round(cx), std::round(cy)});
  stroke.points.push_back({rng.uniform(cx, width - 1.0), rng.uniform(0.0, height - 1.0)});
  save_json(to_json(stroke), files.stroke);
  return files;
}

std::string cli_path() {
#ifdef OBJCTRL_CLI_PATH
  return OBJCTRL_CLI_PATH;
#else
  const char *env = std::getenv("OBJCTRL_CLI");
  return env ? env : "objctrl";
#endif
}

namespace {

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::string *stdout_text,
            const std::vector<std::pair<std::string, std::string>> &env) {
  std::string cmd;
  for (const auto &[k, v] : env) cmd += k + "=" + shell_quote(v) + " ";
  cmd += shell_quote(cli_path());
  for (const auto &a : args) cmd += " " + shell_quote(a);
  cmd += " 2>/dev/null";
  FILE *pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  std::string captured;
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) captured.append(buffer, got);
  const int status = pclose(pipe);
  if (stdout_text) *stdout_text = captured;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

namespace {

void put_u32(std::string &out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

void put_chunk(std::string &out, const char *type, const std::string &payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body = std::string(type, 4) + payload;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(
                   crc32(0, reinterpret_cast<const Bytef *>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string raw_png(int width, int height, int bit_depth, int color_type,
                    const std::vector<std::uint16_t> &samples) {
  const int channels = color_type == 2 ? 3 : 1;
  std::string rows;
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    rows.push_back(0);
    for (int x = 0; x < width * channels; ++x, ++i) {
      if (bit_depth == 16) rows.push_back(static_cast<char>(samples[i] >> 8));
      rows.push_back(static_cast<char>(samples[i] & 0xFF));
    }
  }
  uLongf size = compressBound(static_cast<uLong>(rows.size()));
  std::string packed(size, '\0');
  compress(reinterpret_cast<Bytef *>(packed.data()), &size,
           reinterpret_cast<const Bytef *>(rows.data()), static_cast<uLong>(rows.size()));
  packed.resize(size);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(static_cast<char>(bit_depth));
  ihdr.push_back(static_cast<char>(color_type));
  ihdr.append(3, '\0');
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", packed);
  put_chunk(png, "IEND", "");
  return png;
}

}  // namespace objctrl::testing
