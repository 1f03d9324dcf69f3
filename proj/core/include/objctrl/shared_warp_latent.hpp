// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "objctrl/camera_geometry.hpp"
#include "objctrl/tensor.hpp"

namespace objctrl {

inline constexpr double kDefaultLowpassCutoff = 0.25;
inline constexpr int kDefaultLatentDownsample = 8;
inline constexpr std::size_t kDefaultLatentChannels = 4;

/// [N, C, h, w] noise volume and the seed that produced it.
struct LatentVolume {
  Tensor values;
  std::uint64_t seed = 0;
};

struct LatentShape {
  std::size_t frames = 14;
  std::size_t channels = kDefaultLatentChannels;
  std::size_t height = 40;
  std::size_t width = 72;
};

/// Standard normal samples: mt19937_64 draws mapped to 53-bit uniforms and
/// paired through Box-Muller, filled in row-major order. Bitwise stable for a
/// given seed.
LatentVolume seeded_noise(std::uint64_t seed, const LatentShape &shape);

struct WarpedNoise {
  Tensor frames;               // [N, C, h, w]
  std::vector<Mask> validity;  // one per frame
};

/// Frame-0 noise [C, h, w] warped to every pose. `poses` must already
/// carry latent-scale intrinsics and `depth` must be at latent resolution.
WarpedNoise warp_noise(const Tensor &frame0, const DepthMap &depth, const PoseSequence &poses);

/// Takes `warped` where mask and validity are both set, `z` elsewhere. An
/// empty `validity` span means every warped pixel is valid.
Tensor blend_masked(const Tensor &z, const Tensor &warped, std::span<const Mask> masks,
                    std::span<const Mask> validity = {});

/// DC-centered Gaussian H(f) = exp(-|f|^2 / (2 d0^2)) over (frame, row, col)
/// with each axis index j mapped to f = (j - floor(L/2)) / (L/2). [N, 1, h, w].
Tensor gaussian_lowpass(std::size_t frames, std::size_t height, std::size_t width, double d0);

/// DC-centered binary filter: 1 where |f| <= cutoff, else 0.
Tensor ideal_lowpass(std::size_t frames, std::size_t height, std::size_t width, double cutoff);

/// Normalized frequency of centered index j on an axis of length L.
double centered_frequency(std::size_t j, std::size_t length);

/// Real part of IFFT3(H * FFT3(blended) + (1 - H) * FFT3(z)), per channel
/// over (frame, row, col). H must be Hermitian-symmetric; an imaginary residue
/// above 1e-6 raises kValidation.
Tensor lowpass_blend(const Tensor &blended, const Tensor &z, const Tensor &filter);

/// Average pooling by an integer factor (ceiling division; partial cells
/// average the pixels they cover).
DepthMap average_pool(const DepthMap &depth, int factor);

struct SwlConfig {
  std::uint64_t seed = 0;
  LatentShape shape;
  int downsample = kDefaultLatentDownsample;
  double cutoff = kDefaultLowpassCutoff;
};

/// seeded_noise -> warp_noise -> blend_masked -> lowpass_blend. `depth`,
/// `poses` and `masks` are at image resolution; they are pooled (depth by
/// average, masks by max) and intrinsics divided by `downsample` here.
LatentVolume make_swl(const SwlConfig &config, const DepthMap &depth, const PoseSequence &poses,
                      std::span<const Mask> masks);

}  // namespace objctrl
