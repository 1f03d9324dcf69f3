// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/trajectory_lift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "objctrl/error.hpp"

namespace objctrl {

Trajectory2D resample(const Trajectory2D &trajectory, std::size_t n) {
  const auto &pts = trajectory.points;
  require(n >= 2, ErrorCode::kValidation, "resample needs n >= 2");
  require(pts.size() >= 2, ErrorCode::kValidation, "stroke needs at least 2 points");
  for (const auto &p : pts) {
    require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::kValidation,
            "stroke contains non-finite coordinates");
  }

  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
  }
  const double total = cumulative.back();

  Trajectory2D out;
  out.points.reserve(n);
  if (total == 0.0) {
    out.points.assign(n, pts.front());
    return out;
  }

  out.points.push_back(pts.front());
  std::size_t segment = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (segment + 1 < pts.size() && cumulative[segment] < target) ++segment;
    const double start = cumulative[segment - 1];
    const double length = cumulative[segment] - start;
    const double u = length > 0.0 ? std::clamp((target - start) / length, 0.0, 1.0) : 0.0;
    const auto &a = pts[segment - 1];
    const auto &b = pts[segment];
    out.points.push_back({a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u});
  }
  out.points.push_back(pts.back());
  return out;
}

std::vector<double> sample_depth(const Trajectory2D &trajectory, const DepthMap &depth) {
  std::vector<double> out;
  out.reserve(trajectory.points.size());
  for (const auto &p : trajectory.points) {
    const bool inside = p.x >= 0.0 && p.y >= 0.0 && p.x < depth.width() && p.y < depth.height();
    require(inside, ErrorCode::kDomain,
            "trajectory point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                ") is outside the depth map");
    // Round half up; a point within half a pixel of the right/bottom edge
    // still belongs to the last pixel.
    const int x = std::min(static_cast<int>(std::floor(p.x + 0.5)), depth.width() - 1);
    const int y = std::min(static_cast<int>(std::floor(p.y + 0.5)), depth.height() - 1);
    out.push_back(static_cast<double>(depth.at(x, y)));
  }
  return out;
}

double gradient_std(std::span<const double> depths, double scale) {
  if (depths.size() < 2) return 0.0;
  const std::size_t m = depths.size() - 1;
  std::vector<double> grads(m);
  for (std::size_t i = 0; i < m; ++i) grads[i] = (depths[i + 1] - depths[i]) / scale;
  double mean = 0.0;
  for (double g : grads) mean += g;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double g : grads) var += (g - mean) * (g - mean);
  return std::sqrt(var / static_cast<double>(m));
}

std::vector<double> smooth_depths(std::span<const double> depths, const SmoothingConfig &cfg,
                                  std::optional<double> depth_scale) {
  require(cfg.theta > 0.0, ErrorCode::kValidation, "smoothing theta must be positive");
  require(depths.size() >= 2, ErrorCode::kValidation, "need at least 2 depths to smooth");
  for (double d : depths) {
    require(std::isfinite(d) && d > 0.0, ErrorCode::kDomain, "depths must be positive");
  }

  double scale = 1.0;
  if (cfg.normalize) {
    scale = depth_scale.value_or(*std::max_element(depths.begin(), depths.end()));
    require(scale > 0.0, ErrorCode::kDomain, "depth normalization scale must be positive");
  }

  std::vector<double> out(depths.begin(), depths.end());
  if (gradient_std(depths, scale) > cfg.theta) std::fill(out.begin(), out.end(), depths.front());
  return out;
}

Trajectory3D lift(const Trajectory2D &trajectory, const DepthMap &depth, std::size_t n,
                  const SmoothingConfig &cfg) {
  const Trajectory2D stroke = resample(trajectory, n);
  const std::vector<double> raw = sample_depth(stroke, depth);
  const std::vector<double> smoothed =
      smooth_depths(raw, cfg, static_cast<double>(depth.max_value()));

  Trajectory3D out;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.points.push_back({stroke.points[i].x, stroke.points[i].y, smoothed[i]});
  }
  return out;
}

}  // namespace objctrl
