// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/shared_warp_latent.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "objctrl/error.hpp"
#include "objctrl/layer_control.hpp"
#include "objctrl/parallel.hpp"
#include "objctrl/warp_engine.hpp"

namespace objctrl {

namespace {

constexpr double kImaginaryResidueLimit = 1e-6;

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex *p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer allocate(std::size_t n) {
  auto *p = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

class Fft3 {
 public:
  Fft3(std::size_t n0, std::size_t n1, std::size_t n2, int sign)
      : size_(n0 * n1 * n2), in_(allocate(size_)), out_(allocate(size_)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_3d(static_cast<int>(n0), static_cast<int>(n1), static_cast<int>(n2),
                             in_.get(), out_.get(), sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) fail(ErrorCode::kValidation, "FFTW could not build a plan");
  }
  ~Fft3() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Fft3(const Fft3 &) = delete;
  Fft3 &operator=(const Fft3 &) = delete;

  fftw_complex *input() { return in_.get(); }
  const fftw_complex *output() const { return out_.get(); }
  void run() { fftw_execute(plan_); }

 private:
  std::size_t size_;
  FftwBuffer in_;
  FftwBuffer out_;
  fftw_plan plan_ = nullptr;
};

void check_latent(const Tensor &t, const char *what) {
  require(t.rank() == 4, ErrorCode::kShape, std::string(what) + " must be [N, C, h, w]");
}

}  // namespace

LatentVolume seeded_noise(std::uint64_t seed, const LatentShape &shape) {
  require(shape.frames >= 1 && shape.channels >= 1 && shape.height >= 1 && shape.width >= 1,
          ErrorCode::kValidation, "latent dimensions must be >= 1");
  Tensor values({shape.frames, shape.channels, shape.height, shape.width});
  std::mt19937_64 engine(seed);
  auto uniform = [&engine] {
    // (0, 1]: never zero, so the log below is finite.
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  };
  auto data = values.data();
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    data[i] = static_cast<float>(radius * std::cos(angle));
    if (i + 1 < data.size()) data[i + 1] = static_cast<float>(radius * std::sin(angle));
  }
  return {std::move(values), seed};
}

WarpedNoise warp_noise(const Tensor &frame0, const DepthMap &depth, const PoseSequence &poses) {
  require(frame0.rank() == 3, ErrorCode::kShape, "frame-0 noise must be [C, h, w]");
  validate(poses);
  const std::size_t c = frame0.dim(0);
  const std::size_t h = frame0.dim(1);
  const std::size_t w = frame0.dim(2);
  require(h == static_cast<std::size_t>(depth.height()) && w == static_cast<std::size_t>(depth.width()),
          ErrorCode::kShape, "latent depth does not match the noise grid");

  const std::size_t n = poses.frames.size();
  WarpedNoise out{Tensor({n, c, h, w}), std::vector<Mask>(n)};
  const std::size_t frame_size = c * h * w;
  parallel_for(n, [&](std::size_t i) {
    WarpResult r = forward_warp(frame0, depth, poses.frames.front(), poses.frames[i],
                                poses.intrinsics);
    std::copy(r.warped.data().begin(), r.warped.data().end(),
              out.frames.data().begin() + static_cast<std::ptrdiff_t>(i * frame_size));
    out.validity[i] = std::move(r.validity);
  });
  return out;
}

Tensor blend_masked(const Tensor &z, const Tensor &warped, std::span<const Mask> masks,
                    std::span<const Mask> validity) {
  check_latent(z, "noise volume");
  require(z.shape() == warped.shape(), ErrorCode::kShape, "noise and warped noise differ in shape");
  const std::size_t n = z.dim(0);
  const std::size_t c = z.dim(1);
  const std::size_t h = z.dim(2);
  const std::size_t w = z.dim(3);
  require(masks.size() == n, ErrorCode::kShape, "need one blend mask per frame");
  require(validity.empty() || validity.size() == n, ErrorCode::kShape,
          "need one validity mask per frame");
  for (std::size_t i = 0; i < n; ++i) {
    require(masks[i].width() == static_cast<int>(w) && masks[i].height() == static_cast<int>(h),
            ErrorCode::kShape, "blend mask does not match the latent grid");
    if (!validity.empty()) {
      require(validity[i].same_size(masks[i]), ErrorCode::kShape,
              "validity mask does not match the latent grid");
    }
  }

  Tensor out = z;
  auto dst = out.data();
  auto src = warped.data();
  const std::size_t plane = h * w;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = masks[i].bits();
    for (std::size_t p = 0; p < plane; ++p) {
      if (!m[p] || (!validity.empty() && !validity[i].bits()[p])) continue;
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t at = (i * c + ch) * plane + p;
        dst[at] = src[at];
      }
    }
  }
  return out;
}

double centered_frequency(std::size_t j, std::size_t length) {
  if (length <= 1) return 0.0;
  return (static_cast<double>(j) - static_cast<double>(length / 2)) /
         (static_cast<double>(length) / 2.0);
}

namespace {

template <typename Fn>
Tensor radial_filter(std::size_t frames, std::size_t height, std::size_t width, Fn &&value_of) {
  require(frames >= 1 && height >= 1 && width >= 1, ErrorCode::kValidation,
          "filter dimensions must be >= 1");
  Tensor filter({frames, 1, height, width});
  for (std::size_t t = 0; t < frames; ++t) {
    const double ft = centered_frequency(t, frames);
    for (std::size_t y = 0; y < height; ++y) {
      const double fy = centered_frequency(y, height);
      for (std::size_t x = 0; x < width; ++x) {
        const double fx = centered_frequency(x, width);
        filter.at({t, 0, y, x}) = static_cast<float>(value_of(ft * ft + fy * fy + fx * fx));
      }
    }
  }
  return filter;
}

}  // namespace

Tensor gaussian_lowpass(std::size_t frames, std::size_t height, std::size_t width, double d0) {
  require(d0 > 0.0, ErrorCode::kValidation, "low-pass cutoff must be positive");
  return radial_filter(frames, height, width,
                       [d0](double r2) { return std::exp(-r2 / (2.0 * d0 * d0)); });
}

Tensor ideal_lowpass(std::size_t frames, std::size_t height, std::size_t width, double cutoff) {
  require(cutoff > 0.0, ErrorCode::kValidation, "low-pass cutoff must be positive");
  return radial_filter(frames, height, width,
                       [cutoff](double r2) { return r2 <= cutoff * cutoff ? 1.0 : 0.0; });
}

Tensor lowpass_blend(const Tensor &blended, const Tensor &z, const Tensor &filter) {
  check_latent(blended, "blended latent");
  require(blended.shape() == z.shape(), ErrorCode::kShape, "latent volumes differ in shape");
  const std::size_t n = z.dim(0);
  const std::size_t c = z.dim(1);
  const std::size_t h = z.dim(2);
  const std::size_t w = z.dim(3);
  require(filter.shape() == Tensor::Shape{n, 1, h, w}, ErrorCode::kShape,
          "filter must be [N, 1, h, w] matching the latent");
  for (float v : filter.data()) {
    require(v >= 0.0f && v <= 1.0f, ErrorCode::kValidation, "filter values must lie in [0, 1]");
  }

  // Mixing a volume with itself is the identity whatever H is.
  if (blended == z) return z;

  // Filter re-indexed into FFT order (ifftshift).
  const std::size_t volume = n * h * w;
  std::vector<double> gain(volume);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t ct = (t + n / 2) % n;
    for (std::size_t y = 0; y < h; ++y) {
      const std::size_t cy = (y + h / 2) % h;
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t cx = (x + w / 2) % w;
        gain[(t * h + y) * w + x] = filter.at({ct, 0, cy, cx});
      }
    }
  }

  Tensor out(z.shape());
  const std::size_t plane = h * w;
  parallel_for(c, [&](std::size_t ch) {
    Fft3 fwd_low(n, h, w, FFTW_FORWARD);
    Fft3 fwd_base(n, h, w, FFTW_FORWARD);
    Fft3 inverse(n, h, w, FFTW_BACKWARD);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t p = 0; p < plane; ++p) {
        const std::size_t src = (t * c + ch) * plane + p;
        const std::size_t dst = t * plane + p;
        fwd_low.input()[dst][0] = blended.data()[src];
        fwd_low.input()[dst][1] = 0.0;
        fwd_base.input()[dst][0] = z.data()[src];
        fwd_base.input()[dst][1] = 0.0;
      }
    }
    fwd_low.run();
    fwd_base.run();
    for (std::size_t k = 0; k < volume; ++k) {
      const double g = gain[k];
      for (int part = 0; part < 2; ++part) {
        inverse.input()[k][part] =
            fwd_low.output()[k][part] * g + fwd_base.output()[k][part] * (1.0 - g);
      }
    }
    inverse.run();
    const double scale = 1.0 / static_cast<double>(volume);
    double residue = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t p = 0; p < plane; ++p) {
        const std::size_t k = t * plane + p;
        residue = std::max(residue, std::abs(inverse.output()[k][1] * scale));
        out.data()[(t * c + ch) * plane + p] = static_cast<float>(inverse.output()[k][0] * scale);
      }
    }
    require(residue <= kImaginaryResidueLimit, ErrorCode::kValidation,
            "low-pass blend left an imaginary residue; filter is not Hermitian-symmetric");
  });
  return out;
}

DepthMap average_pool(const DepthMap &depth, int factor) {
  require(factor >= 1, ErrorCode::kValidation, "pooling factor must be >= 1");
  const int w = (depth.width() + factor - 1) / factor;
  const int h = (depth.height() + factor - 1) / factor;
  std::vector<double> sums(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<int> counts(sums.size(), 0);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const std::size_t cell = static_cast<std::size_t>(y / factor) * w + x / factor;
      sums[cell] += depth.at(x, y);
      ++counts[cell];
    }
  }
  std::vector<float> pooled(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    pooled[i] = static_cast<float>(sums[i] / counts[i]);
  }
  return DepthMap(w, h, std::move(pooled));
}

LatentVolume make_swl(const SwlConfig &config, const DepthMap &depth, const PoseSequence &poses,
                      std::span<const Mask> masks) {
  validate(poses);
  require(config.downsample >= 1, ErrorCode::kValidation, "latent downsample must be >= 1");
  require(masks.size() == poses.frames.size(), ErrorCode::kShape, "need one mask per pose");
  const DepthMap latent_depth = average_pool(depth, config.downsample);
  const LatentShape &shape = config.shape;
  require(shape.frames == poses.frames.size() &&
              shape.height == static_cast<std::size_t>(latent_depth.height()) &&
              shape.width == static_cast<std::size_t>(latent_depth.width()),
          ErrorCode::kShape, "latent shape does not match poses and pooled depth");

  std::vector<Mask> latent_masks;
  latent_masks.reserve(masks.size());
  for (const auto &m : masks) {
    require(m.width() == depth.width() && m.height() == depth.height(), ErrorCode::kShape,
            "mask does not match the depth map");
    latent_masks.push_back(max_pool(m, config.downsample));
  }

  PoseSequence latent_poses = poses;
  latent_poses.intrinsics = poses.intrinsics.downscaled(config.downsample);

  LatentVolume z = seeded_noise(config.seed, shape);
  const std::size_t frame_size = shape.channels * shape.height * shape.width;
  Tensor frame0({shape.channels, shape.height, shape.width},
                std::vector<float>(z.values.data().begin(),
                                   z.values.data().begin() + static_cast<std::ptrdiff_t>(frame_size)));
  const WarpedNoise warped = warp_noise(frame0, latent_depth, latent_poses);
  const Tensor blended = blend_masked(z.values, warped.frames, latent_masks, warped.validity);
  const Tensor filter = gaussian_lowpass(shape.frames, shape.height, shape.width, config.cutoff);
  return {lowpass_blend(blended, z.values, filter), config.seed};
}

}  // namespace objctrl
