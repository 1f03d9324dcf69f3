// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails or overruns its time budget.

#include <Eigen/Geometry>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "objctrl/camera_geometry.hpp"
#include "objctrl/json_formats.hpp"
#include "objctrl/layer_control.hpp"
#include "objctrl/metrics.hpp"
#include "objctrl/pipeline.hpp"
#include "objctrl/shared_warp_latent.hpp"
#include "objctrl/tensor_io.hpp"
#include "objctrl/trajectory_lift.hpp"
#include "objctrl/warp_engine.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace objctrl;
using testing::Rng;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string &what) {
  if (!ok) throw Failure(what);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr int kW = 576;
constexpr int kH = 320;

// ---------------------------------------------------------------------------

std::string trajectory_to_poses_oracle() {
  Rng rng(101);
  const Intrinsics k = default_intrinsics(kW, kH);
  double max_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Trajectory3D traj = testing::random_trajectory3d(rng, 14, kW, kH, 0.5, 5.0);
    const PoseSequence poses = trajectory_to_poses(traj, k);
    const auto expected = testing::solve_translations(traj, k);
    check(poses.frames.size() == 14, "frame count");
    for (std::size_t i = 0; i < 14; ++i) {
      const auto &pose = poses.frames[i];
      check(pose.rotation == Eigen::Matrix3d::Identity(), "rotation is not exactly identity");
      for (int a = 0; a < 3; ++a)
        max_err = std::max(max_err, std::abs(pose.translation[a] - expected[i][static_cast<std::size_t>(a)]));
    }
    check(poses.frames[0].translation == Eigen::Vector3d::Zero(), "first translation is not exactly 0");
  }
  check(max_err == 0.0, "max abs error " + fmt(max_err));
  return "1000 trajectories, max_err=0, t0=0";
}

bool pixel_near(const Mask &m, double x, double y) {
  for (int py = static_cast<int>(std::floor(y)) - 1; py <= static_cast<int>(std::ceil(y)) + 1; ++py)
    for (int px = static_cast<int>(std::floor(x)) - 1; px <= static_cast<int>(std::ceil(x)) + 1; ++px) {
      if (px < 0 || py < 0 || px >= m.width() || py >= m.height()) continue;
      if (m.at(px, py) && std::hypot(px - x, py - y) <= 1.0) return true;
    }
  return false;
}

std::string trajectory_consistency() {
  Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int x0 = rng.integer(40, kW - 41), y0 = rng.integer(40, kH - 41);
    Trajectory2D stroke{{{static_cast<double>(x0), static_cast<double>(y0)}}};
    const int extra = rng.integer(1, 4);
    for (int j = 0; j < extra; ++j)
      stroke.points.push_back({rng.uniform(0, kW - 1), rng.uniform(0, kH - 1)});
    const DepthMap depth = (trial % 2 == 0)
                               ? DepthMap(kW, kH, static_cast<float>(rng.uniform(1.0, 4.0)))
                               : testing::random_smooth_depth(rng, kW, kH, 1.0, 4.0);
    const Mask object = testing::disk_mask(kW, kH, x0, y0, rng.uniform(8, 20));
    Mask start(kW, kH);
    start.set(x0, y0, true);

    const ObjectMotion motion = derive_motion(stroke, depth, RunOptions{});
    const auto &traj = *motion.trajectory;
    const auto masks = warp_mask_sequence(object, depth, motion.poses);
    const auto single = warp_mask_sequence(start, depth, motion.poses);
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      const double x = traj.points[i].x, y = traj.points[i].y;
      check(pixel_near(masks[i], x, y),
            "fixture " + std::to_string(trial) + " frame " + std::to_string(i) + ": object mask misses trajectory point");
      check(single[i].count() == 1, "start pixel lost at fixture " + std::to_string(trial));
      for (int py = 0; py < kH; ++py)
        for (int px = 0; px < kW; ++px)
          if (single[i].at(px, py)) worst = std::max(worst, std::hypot(px - x, py - y));
    }
  }
  check(worst <= 1.0, "start point off by " + fmt(worst) + " px");
  return "200 fixtures at 320x576, worst start-point offset " + fmt(worst) + " px";
}

std::string plucker_checks() {
  const Intrinsics k = default_intrinsics(kW, kH);
  const auto ray = plucker_ray(CameraPose{}, k, k.cx, k.cy, {});
  Eigen::Matrix<double, 6, 1> expect;
  expect << 0, 0, 0, 0, 0, 1;
  const double ex = (ray - expect).cwiseAbs().maxCoeff();
  check(ex <= 1e-12, "principal ray off by " + fmt(ex));
  const PoseSequence one{k, {CameraPose{}}};
  const Tensor vol = plucker_volume(one, kW, kH, {});
  for (std::size_t c = 0; c < 6; ++c)
    check(vol.at({0, c, static_cast<std::size_t>(k.cy), static_cast<std::size_t>(k.cx)}) == (c == 5 ? 1.0f : 0.0f),
          "volume principal pixel");

  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const CameraPose pose = testing::random_pose(rng);
    const Intrinsics kk{rng.uniform(100, 1000), rng.uniform(100, 1000), rng.uniform(0, kW), rng.uniform(0, kH)};
    const double x = rng.uniform(0, kW), y = rng.uniform(0, kH);
    const auto r = plucker_ray(pose, kk, x, y, {});
    Eigen::Vector3d pixel((x - kk.cx) / kk.fx, (y - kk.cy) / kk.fy, 1.0);
    Eigen::Vector3d rotated = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) rotated[i] += pose.rotation(i, j) * pixel[j];
    const Eigen::Vector3d moment = pose.translation.cross(rotated);
    worst = std::max(worst, (r.head<3>() - moment).cwiseAbs().maxCoeff());
  }
  check(worst <= 1e-9, "moment identity error " + fmt(worst));
  return "principal ray err " + fmt(ex) + ", moment identity max err " + fmt(worst) + " over 10000";
}

double max_abs_diff(const Tensor &a, const Tensor &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a.data()[i]) - b.data()[i]));
  return m;
}

std::string fft_blend() {
  Rng rng(404);
  std::ostringstream detail;
  {
    const Tensor low = testing::random_tensor(rng, {14, 4, 40, 72});
    const Tensor base = testing::random_tensor(rng, {14, 4, 40, 72});
    const double e1 = max_abs_diff(lowpass_blend(low, base, Tensor({14, 1, 40, 72}, 1.0f)), low);
    const double e0 = max_abs_diff(lowpass_blend(low, base, Tensor({14, 1, 40, 72}, 0.0f)), base);
    check(e1 <= 1e-5 && e0 <= 1e-5, "H=1 err " + fmt(e1) + ", H=0 err " + fmt(e0));
    detail << "H=1/H=0 err " << fmt(std::max(e0, e1));
  }

  // Spectral exactness on a binary filter, plus the per-bin blend identity
  // and the low-band leakage of the default Gaussian.
  const std::size_t n = 14, h = 40, w = 72;
  const Tensor low = testing::random_tensor(rng, {n, 1, h, w});
  const Tensor base = testing::random_tensor(rng, {n, 1, h, w});
  const auto sl = testing::spectrum(low, 0), sb = testing::spectrum(base, 0);
  double scale = 0.0;
  for (std::size_t i = 0; i < sl.size(); ++i) scale = std::max({scale, std::abs(sl[i]), std::abs(sb[i])});

  struct Errors {
    double band = 0.0, identity = 0.0;
  };
  auto measure = [&](const Tensor &filter) {
    const auto out = testing::spectrum(lowpass_blend(low, base, filter), 0);
    Errors e;
    for (std::size_t f = 0; f < n; ++f)
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
          const std::size_t i = (f * h + r) * w + c;
          const double hv = testing::filter_at_bin(filter, f, r, c);
          e.identity = std::max(e.identity, std::abs(out[i] - (hv * sl[i] + (1.0 - hv) * sb[i])));
          if (hv > 0.99) e.band = std::max(e.band, std::abs(out[i] - sl[i]));
          if (hv < 0.01) e.band = std::max(e.band, std::abs(out[i] - sb[i]));
        }
    e.band /= scale;
    e.identity /= scale;
    return e;
  };
  const Errors ideal = measure(ideal_lowpass(n, h, w, kDefaultLowpassCutoff));
  check(ideal.band <= 1e-4, "binary-filter band error " + fmt(ideal.band));
  const Errors gauss = measure(gaussian_lowpass(n, h, w, kDefaultLowpassCutoff));
  check(gauss.identity <= 1e-4, "gaussian per-bin identity error " + fmt(gauss.identity));
  detail << ", binary band err " << fmt(ideal.band) << ", gaussian per-bin err " << fmt(gauss.identity)
         << " (gaussian H>0.99/H<0.01 band deviation " << fmt(gauss.band) << ")";

  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = testing::random_tensor(rng, {4, 1, 8, 8});
    const Tensor b = testing::random_tensor(rng, {4, 1, 8, 8});
    // Random but Hermitian-symmetric: H(f) == H(-f) in centered coordinates.
    Tensor filter({4, 1, 8, 8});
    for (auto &v : filter.data()) v = static_cast<float>(rng.uniform(0, 1));
    Tensor mirrored = filter;
    for (std::size_t f = 0; f < 4; ++f)
      for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c)
          mirrored.at({f, 0, r, c}) = 0.5f * (filter.at({f, 0, r, c}) + filter.at({(4 - f) % 4, 0, (8 - r) % 8, (8 - c) % 8}));
    filter = mirrored;
    worst = std::max(worst, max_abs_diff(lowpass_blend(a, b, filter), testing::dft_blend_direct(a, b, filter)));
  }
  check(worst <= 1e-6, "direct DFT mismatch " + fmt(worst));
  detail << ", direct DFT err " << fmt(worst);
  return detail.str();
}

std::string depth_smoothing() {
  const std::vector<double> edge{0.2, 0.8, 0.2, 0.9};
  const auto reset = smooth_depths(edge, SmoothingConfig{0.2, true});
  check(reset == std::vector<double>(4, 0.2), "edge-crossing list was not reset");
  check(smooth_depths(edge, SmoothingConfig{0.2, false}) == std::vector<double>(4, 0.2),
        "edge-crossing list was not reset without normalization");
  const std::vector<double> flat{1.0, 1.01, 1.02, 1.0, 0.99};
  check(smooth_depths(flat, SmoothingConfig{0.2, true}) == flat, "flat list changed");
  Rng rng(505);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> ds(static_cast<std::size_t>(rng.integer(2, 30)));
    for (auto &d : ds) d = rng.uniform(0.1, 5.0);
    const SmoothingConfig cfg{rng.uniform(0.01, 0.5), rng.coin()};
    const auto once = smooth_depths(ds, cfg);
    check(smooth_depths(once, cfg) == once, "not idempotent at trial " + std::to_string(trial));
  }
  return "edge list reset (gradient std " + fmt(gradient_std(edge)) + "), flat list kept, 1000 idempotent";
}

bool covers(const Mask &outer, const Mask &inner) {
  if (!outer.same_size(inner)) return false;
  for (std::size_t i = 0; i < inner.bits().size(); ++i)
    if (inner.bits()[i] && !outer.bits()[i]) return false;
  return true;
}

std::string mask_pyramid_checks() {
  Rng rng(606);
  for (int trial = 0; trial < 500; ++trial) {
    const Mask u = testing::random_mask(rng, rng.integer(1, 160), rng.integer(1, 96), rng.uniform(0.0, 0.2));
    const auto p = mask_pyramid(u, 4, kDefaultDilationKernel);
    check(p.levels.size() == 4, "level count");
    check(covers(p.levels[0], u), "level 0 does not cover the union");
    for (std::size_t s = 1; s < 4; ++s)
      check(covers(p.levels[s], testing::pool2_naive(p.levels[s - 1])),
            "coverage lost at level " + std::to_string(s) + ", trial " + std::to_string(trial));
  }
  for (auto [w, h] : {std::pair{72, 40}, std::pair{13, 9}, std::pair{1, 1}}) {
    const Mask ones(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h), 1));
    for (const auto &l : mask_pyramid(ones, 4).levels) check(l.count() == l.bits().size(), "all-ones not saturated");
    for (const auto &l : mask_pyramid(Mask(w, h), 4).levels) check(l.empty(), "empty mask grew");
  }
  return "500 random masks monotone at S=4, all-ones and empty saturate";
}

Trajectory2D shifted(const Trajectory2D &t, double dx, double dy) {
  Trajectory2D out = t;
  for (auto &p : out.points) p = {p.x + dx, p.y + dy};
  return out;
}

std::string objmc_checks() {
  Rng rng(707);
  Trajectory2D a;
  for (int i = 0; i < 14; ++i) a.points.push_back({rng.uniform(0, kW), rng.uniform(0, kH)});
  check(objmc(a, a).mean == 0.0, "identical trajectories not 0");
  const double off = objmc(a, shifted(a, 3, 4)).mean;
  check(off == 5.0, "(3,4) offset gives " + fmt(off));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Trajectory2D p, q;
    const int n = rng.integer(1, 30);
    for (int i = 0; i < n; ++i) {
      p.points.push_back({rng.uniform(-500, 500), rng.uniform(-500, 500)});
      q.points.push_back({rng.uniform(-500, 500), rng.uniform(-500, 500)});
    }
    const double m = objmc(p, q).mean;
    check(objmc(q, p).mean == m, "not symmetric");
    const double dx = rng.uniform(-100, 100), dy = rng.uniform(-100, 100);
    worst = std::max(worst, std::abs(objmc(shifted(p, dx, dy), shifted(q, dx, dy)).mean - m) / std::max(1.0, m));
  }
  check(worst <= 1e-9, "translation covariance error " + fmt(worst));
  return "0 and 5.0 exact; 200 random pairs symmetric, shift error " + fmt(worst);
}

std::map<std::string, std::string> slurp(const fs::path &root) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

std::string reproducibility() {
  testing::TempDir dir;
  Rng rng(808);
  const auto scene = testing::write_scene(dir.path(), rng, 288, 160);
  int code = testing::run_cli({"run", "--image", scene.image.string(), "--depth", scene.depth.string(), "--mask",
                               scene.mask.string(), "--traj2d", scene.stroke.string(), "--swl", "--seed", "42",
                               "-o", (dir / "first").string()});
  check(code == 0, "initial run exited " + std::to_string(code));
  const std::string manifest = (dir / "first" / "manifest.json").string();
  const auto first = slurp(dir / "first");
  std::size_t bytes = 0;
  for (const auto &[k, v] : first) bytes += v.size();
  for (const char *threads : {"1", "8"}) {
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / ("t" + std::string(threads) + "_" + std::to_string(rep));
      code = testing::run_cli({"run", "--manifest", manifest, "-o", out.string()}, nullptr,
                              {{"OBJCTRL_THREADS", threads}});
      check(code == 0, "manifest run exited " + std::to_string(code));
      const auto again = slurp(out);
      check(again.size() == first.size(), "file set differs");
      for (const auto &[name, data] : first)
        check(again.count(name) && again.at(name) == data,
              name + " differs (OBJCTRL_THREADS=" + threads + ")");
    }
  }
  return std::to_string(first.size()) + " files (" + std::to_string(bytes) +
         " bytes) identical over 4 manifest runs at 1 and 8 threads";
}

std::string frame_name(std::size_t i) { return fs::path(warped_mask_filename(i)).filename().string(); }

std::string cli_parity() {
  testing::TempDir dir;
  Rng rng(909);
  const std::pair<int, int> sizes[] = {{96, 64}, {144, 80}, {200, 120}};
  int fixture = 0;
  for (const auto &[w, h] : sizes) {
    const auto sub = dir / ("f" + std::to_string(fixture++));
    fs::create_directories(sub);
    const auto scene = testing::write_scene(sub, rng, w, h);
    const auto path = [&](const std::string &name) { return (sub / name).string(); };

    check(testing::run_cli({"lift", "--traj", scene.stroke.string(), "--depth", scene.depth.string(), "-o",
                            path("t3.json")}) == 0, "lift failed");
    const DepthMap depth = load_depth(scene.depth);
    const Trajectory3D t3 = lift(load_trajectory2d(scene.stroke), depth);
    check(read_file(path("t3.json")) == serialize(to_json(t3)), "lift bytes differ");

    check(testing::run_cli({"poses", "--traj", path("t3.json"), "--width", std::to_string(w), "--height",
                            std::to_string(h), "-o", path("poses.json")}) == 0, "poses failed");
    const PoseSequence poses = trajectory_to_poses(t3, default_intrinsics(w, h));
    check(read_file(path("poses.json")) == serialize(to_json(poses)), "poses bytes differ");

    const auto masks = warp_mask_sequence(load_mask(scene.mask), depth, poses);
    fs::create_directories(sub / "masks");
    for (std::size_t i = 0; i < masks.size(); ++i) save_mask(masks[i], sub / "masks" / frame_name(i));
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(fixture);
    check(testing::run_cli({"swl", "--seed", std::to_string(seed), "--depth", scene.depth.string(), "--poses",
                            path("poses.json"), "--masks", path("masks"), "-o", path("swl.otsr")}) == 0,
          "swl failed");
    SwlConfig config;
    config.seed = seed;
    config.shape = {poses.size(), kDefaultLatentChannels,
                    static_cast<std::size_t>((h + kDefaultLatentDownsample - 1) / kDefaultLatentDownsample),
                    static_cast<std::size_t>((w + kDefaultLatentDownsample - 1) / kDefaultLatentDownsample)};
    std::vector<Mask> reloaded;
    for (std::size_t i = 0; i < masks.size(); ++i) reloaded.push_back(load_mask(sub / "masks" / frame_name(i)));
    check(read_file(path("swl.otsr")) == encode_tensor(make_swl(config, depth, poses, reloaded).values),
          "swl bytes differ");
  }
  return "lift, poses and swl byte-identical on 3 fixtures";
}

struct Criterion {
  std::string name;
  double budget_seconds;  // 0 = unbounded
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"trajectory-to-poses oracle", 5.0, trajectory_to_poses_oracle},
      {"trajectory consistency round trip", 60.0, trajectory_consistency},
      {"plucker identity and moment", 0.0, plucker_checks},
      {"fft blend", 10.0, fft_blend},
      {"depth smoothing", 0.0, depth_smoothing},
      {"mask pyramid", 0.0, mask_pyramid_checks},
      {"objmc", 0.0, objmc_checks},
      {"reproducibility", 0.0, reproducibility},
      {"cli parity", 0.0, cli_parity},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception &e) {
      ok = false;
      detail = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.budget_seconds > 0 && secs > c.budget_seconds) {
      ok = false;
      detail += "; over budget of " + fmt(c.budget_seconds) + " s";
    }
    failed += ok ? 0 : 1;
    std::printf("%s  %-34s %8.2f s  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), secs, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
