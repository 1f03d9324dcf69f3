// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "objctrl/error.hpp"

namespace objctrl {

namespace {

std::size_t raster_size(int width, int height, int channels, const char *what) {
  require(width >= 1 && height >= 1, ErrorCode::kShape,
          std::string(what) + " dimensions must be at least 1x1");
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
         static_cast<std::size_t>(channels);
}

}  // namespace

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  require(channels == 1 || channels == 3, ErrorCode::kValidation,
          "image must have 1 or 3 channels");
  require(data_.size() == raster_size(width, height, channels, "image"), ErrorCode::kShape,
          "image data length does not match width*height*channels");
}

DepthMap::DepthMap(int width, int height, float fill)
    : DepthMap(width, height,
               std::vector<float>(raster_size(width, height, 1, "depth map"), fill)) {}

DepthMap::DepthMap(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require(data_.size() == raster_size(width, height, 1, "depth map"), ErrorCode::kShape,
          "depth data length does not match width*height");
  for (float v : data_) {
    require(std::isfinite(v) && v >= 0.0f, ErrorCode::kValidation,
            "depth values must be finite and nonnegative");
  }
}

float DepthMap::max_value() const {
  return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

Mask::Mask(int width, int height)
    : width_(width), height_(height), bits_(raster_size(width, height, 1, "mask"), 0) {}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  require(bits_.size() == raster_size(width, height, 1, "mask"), ErrorCode::kShape,
          "mask data length does not match width*height");
  for (auto b : bits_) {
    require(b <= 1, ErrorCode::kValidation, "mask values must be 0 or 1");
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t shape_volume(const Tensor::Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), data_(shape_volume(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  require(data_.size() == shape_volume(shape_), ErrorCode::kShape,
          "tensor data length does not match product(shape)");
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  std::size_t off = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) off = off * shape_[axis++] + i;
  return off;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace objctrl
