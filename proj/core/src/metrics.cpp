// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/metrics.hpp"

#include <cmath>

#include "objctrl/error.hpp"
#include "objctrl/json_formats.hpp"
#include "objctrl/parallel.hpp"

namespace objctrl {

ObjMCReport objmc(const Trajectory2D &target, const Trajectory2D &tracked) {
  require(!target.points.empty(), ErrorCode::kValidation, "target trajectory is empty");
  require(target.points.size() == tracked.points.size(), ErrorCode::kValidation,
          "trajectory lengths differ (" + std::to_string(target.points.size()) + " vs " +
              std::to_string(tracked.points.size()) + ")");
  ObjMCReport report;
  report.frames_compared = target.points.size();
  report.per_frame.reserve(report.frames_compared);
  double sum = 0.0;
  for (std::size_t i = 0; i < report.frames_compared; ++i) {
    const double d = std::hypot(target.points[i].x - tracked.points[i].x,
                                target.points[i].y - tracked.points[i].y);
    report.per_frame.push_back(d);
    sum += d;
  }
  report.mean = sum / static_cast<double>(report.frames_compared);
  return report;
}

ObjMCReport objmc_resampled(const Trajectory2D &target, const Trajectory2D &tracked) {
  if (target.points.size() == tracked.points.size() || target.points.size() < 2 ||
      tracked.points.size() < 2) {
    return objmc(target, tracked);
  }
  return objmc(target, resample(tracked, target.points.size()));
}

BatchReport objmc_batch(std::span<const TrajectoryPair> pairs, bool resample_tracked) {
  require(!pairs.empty(), ErrorCode::kValidation, "objmc batch needs at least one pair");
  BatchReport batch;
  batch.items.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    BatchItem &item = batch.items[i];
    item.pair = pairs[i];
    try {
      const Trajectory2D target = load_trajectory2d(pairs[i].target);
      const Trajectory2D tracked = load_trajectory2d(pairs[i].tracked);
      item.report = resample_tracked ? objmc_resampled(target, tracked) : objmc(target, tracked);
    } catch (const Error &e) {
      item.error = e.what();
    }
  });

  double sum = 0.0;
  std::size_t ok = 0;
  for (const auto &item : batch.items) {
    if (!item.report) continue;
    sum += item.report->mean;
    ++ok;
  }
  if (ok > 0) batch.mean = sum / static_cast<double>(ok);
  return batch;
}

}  // namespace objctrl
