// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "objctrl/trajectory_lift.hpp"

namespace objctrl {

/// Object-motion-control alignment: per-frame Euclidean pixel distances
/// between a target and a tracked trajectory, and their mean.
struct ObjMCReport {
  std::vector<double> per_frame;
  double mean = 0.0;
  std::size_t frames_compared = 0;
};

/// Lengths must match; see objmc_resampled for strokes of different length.
ObjMCReport objmc(const Trajectory2D &target, const Trajectory2D &tracked);

/// Resamples `tracked` to the target's length first when they differ.
ObjMCReport objmc_resampled(const Trajectory2D &target, const Trajectory2D &tracked);

struct TrajectoryPair {
  std::filesystem::path target;
  std::filesystem::path tracked;
};

struct BatchItem {
  TrajectoryPair pair;
  std::optional<ObjMCReport> report;
  std::string error;  // set when report is empty
};

struct BatchReport {
  std::vector<BatchItem> items;
  std::optional<double> mean;  // unweighted mean of successful pair means
};

/// Unreadable or invalid pairs are recorded per item; an empty list is a
/// validation error.
BatchReport objmc_batch(std::span<const TrajectoryPair> pairs, bool resample_tracked = false);

}  // namespace objctrl
