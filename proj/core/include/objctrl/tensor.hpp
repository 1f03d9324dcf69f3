// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace objctrl {

/// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const Image &) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel scene depth, row-major. Values are finite and nonnegative.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, float fill);
  DepthMap(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const float> data() const { return data_; }
  float max_value() const;

  bool operator==(const DepthMap &) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Binary raster; every stored value is exactly 0 or 1.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height);
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool value) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool same_size(const Mask &other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Mask &) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Dense row-major float32 tensor of arbitrary rank.
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  /// Row-major offset of a full index; bounds are the caller's responsibility.
  std::size_t offset(std::initializer_list<std::size_t> index) const;
  float &at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
  float at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

  bool all_finite() const;
  bool operator==(const Tensor &) const = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

std::size_t shape_volume(const Tensor::Shape &shape);

}  // namespace objctrl
