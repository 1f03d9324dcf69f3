// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/camera_presets.hpp"
#include "objctrl/shared_warp_latent.hpp"
#include "objctrl/trajectory_lift.hpp"
#include "objctrl/warp_engine.hpp"

namespace {

using namespace objctrl;

constexpr int kW = 576;
constexpr int kH = 320;

PoseSequence zoom_poses(std::size_t frames) {
  return preset_poses(PresetSpec{PresetKind::kZoomIn, 0.3, frames, 1.0}, default_intrinsics(kW, kH));
}

Mask disk(int w, int h, int r) {
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, (x - w / 2) * (x - w / 2) + (y - h / 2) * (y - h / 2) <= r * r);
  return m;
}

void BM_TrajectoryToPoses(benchmark::State &state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(0, kW), uy(0, kH), ud(0.5, 5.0);
  Trajectory3D t;
  for (int i = 0; i < 14; ++i) t.points.push_back({ux(rng), uy(rng), ud(rng)});
  const Intrinsics k = default_intrinsics(kW, kH);
  for (auto _ : state) benchmark::DoNotOptimize(trajectory_to_poses(t, k));
}
BENCHMARK(BM_TrajectoryToPoses);

void BM_PluckerVolume(benchmark::State &state) {
  const auto poses = zoom_poses(14);
  const int scale = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(plucker_volume(poses, kW / scale, kH / scale, {}));
}
BENCHMARK(BM_PluckerVolume)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ForwardWarp(benchmark::State &state) {
  const auto poses = zoom_poses(2);
  const DepthMap depth(kW, kH, 2.0f);
  const Tensor grid({3, static_cast<std::size_t>(kH), static_cast<std::size_t>(kW)}, 1.0f);
  for (auto _ : state) benchmark::DoNotOptimize(forward_warp(grid, depth, poses.frames[0], poses.frames[1], poses.intrinsics));
}
BENCHMARK(BM_ForwardWarp)->Unit(benchmark::kMillisecond);

void BM_WarpMaskSequence(benchmark::State &state) {
  const auto poses = zoom_poses(14);
  const DepthMap depth(kW, kH, 2.0f);
  const Mask mask = disk(kW, kH, 60);
  for (auto _ : state) benchmark::DoNotOptimize(warp_mask_sequence(mask, depth, poses));
}
BENCHMARK(BM_WarpMaskSequence)->Unit(benchmark::kMillisecond);

void BM_LowpassBlend(benchmark::State &state) {
  const LatentShape shape;
  const Tensor a = seeded_noise(1, shape).values;
  const Tensor b = seeded_noise(2, shape).values;
  const Tensor h = gaussian_lowpass(shape.frames, shape.height, shape.width, kDefaultLowpassCutoff);
  for (auto _ : state) benchmark::DoNotOptimize(lowpass_blend(a, b, h));
}
BENCHMARK(BM_LowpassBlend)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
