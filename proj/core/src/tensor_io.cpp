// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/tensor_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "objctrl/error.hpp"

namespace objctrl {

namespace fs = std::filesystem;

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read error on '" + path.string() + "'");
  return bytes;
}

void write_file(const fs::path &path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "write error on '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

// ---------------------------------------------------------------------------
// OTSR

namespace {

constexpr std::array<char, 4> kMagic = {'O', 'T', 'S', 'R'};
constexpr std::array<char, 4> kVersion = {0, 0, 0, 1};

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

bool looks_like_tensor(std::string_view bytes) {
  return bytes.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), bytes.begin());
}

std::string encode_tensor(const Tensor &tensor) {
  require(tensor.rank() <= 255, ErrorCode::kValidation, "tensor rank exceeds 255");
  require(tensor.all_finite(), ErrorCode::kValidation, "tensor contains non-finite values");
  std::string out;
  out.reserve(10 + 4 * tensor.rank() + 4 * tensor.size());
  out.append(kMagic.data(), kMagic.size());
  out.append(kVersion.data(), kVersion.size());
  out.push_back(static_cast<char>(kOtsrDtypeFloat32));
  out.push_back(static_cast<char>(tensor.rank()));
  for (std::size_t d : tensor.shape()) {
    require(d <= 0xFFFFFFFFu, ErrorCode::kValidation, "tensor dimension exceeds u32");
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (float v : tensor.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::string_view bytes) {
  require(bytes.size() >= 10, ErrorCode::kFormat, "OTSR file truncated in header");
  require(std::equal(kMagic.begin(), kMagic.end(), bytes.begin()), ErrorCode::kFormat,
          "bad OTSR magic");
  require(std::equal(kVersion.begin(), kVersion.end(), bytes.begin() + 4), ErrorCode::kFormat,
          "unsupported OTSR version");
  require(static_cast<std::uint8_t>(bytes[8]) == kOtsrDtypeFloat32, ErrorCode::kFormat,
          "unsupported OTSR dtype code " + std::to_string(static_cast<unsigned char>(bytes[8])));
  const std::size_t rank = static_cast<unsigned char>(bytes[9]);
  std::size_t pos = 10;
  require(bytes.size() >= pos + 4 * rank, ErrorCode::kFormat, "OTSR file truncated in shape");

  Tensor::Shape shape(rank);
  for (std::size_t i = 0; i < rank; ++i, pos += 4) shape[i] = get_u32(bytes, pos);
  const std::size_t count = shape_volume(shape);
  require(bytes.size() - pos == 4 * count, ErrorCode::kFormat,
          "OTSR payload length does not match shape");

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i, pos += 4) {
    data[i] = std::bit_cast<float>(get_u32(bytes, pos));
  }
  Tensor tensor(std::move(shape), std::move(data));
  require(tensor.all_finite(), ErrorCode::kFormat, "OTSR payload contains non-finite values");
  return tensor;
}

void save_tensor(const Tensor &tensor, const fs::path &path) {
  write_file(path, encode_tensor(tensor));
}

Tensor load_tensor(const fs::path &path) { return decode_tensor(read_file(path)); }

// ---------------------------------------------------------------------------
// PNG

namespace {

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;   // after palette expansion; alpha included
  int bit_depth = 0;  // 8 or 16
  bool has_color = false;
  std::vector<std::uint16_t> samples;
};

struct ReadCursor {
  std::string_view bytes;
  std::size_t pos = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto *cursor = static_cast<ReadCursor *>(png_get_io_ptr(png));
  if (cursor->pos + length > cursor->bytes.size()) png_error(png, "truncated PNG data");
  std::memcpy(out, cursor->bytes.data() + cursor->pos, length);
  cursor->pos += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto *out = static_cast<std::string *>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char *>(data), length);
}

void flush_callback(png_structp) {}

void error_callback(png_structp png, png_const_charp message) {
  auto *buffer = static_cast<std::string *>(png_get_error_ptr(png));
  if (buffer != nullptr) *buffer = message;
  png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

RawPng decode_png(std::string_view bytes) {
  require(bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0,
          ErrorCode::kFormat, "not a PNG file");

  std::string error_message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error_message,
                                           error_callback, warning_callback);
  if (png == nullptr) fail(ErrorCode::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes, 0};
  RawPng raw;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kFormat, "PNG decode failed: " + error_message);
  }

  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // native little-endian uint16
  png_read_update_info(png, info);

  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.channels = png_get_channels(png, info);
  raw.bit_depth = png_get_bit_depth(png, info);
  raw.has_color = (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) != 0;

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * static_cast<std::size_t>(raw.height));
  rows.resize(static_cast<std::size_t>(raw.height));
  for (int y = 0; y < raw.height; ++y) rows[y] = buffer.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count =
      static_cast<std::size_t>(raw.width) * raw.height * static_cast<std::size_t>(raw.channels);
  raw.samples.resize(count);
  if (raw.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      raw.samples[i] = v;
    }
  } else {
    std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(count),
              raw.samples.begin());
  }
  return raw;
}

// Fixed compression parameters and no time chunk keep output byte-stable.
std::string encode_png(int width, int height, int channels, int bit_depth,
                       std::span<const std::uint16_t> samples) {
  std::string error_message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error_message,
                                            error_callback, warning_callback);
  if (png == nullptr) fail(ErrorCode::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::string out;
  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * bytes_per_sample;
  std::vector<std::uint8_t> row(rowbytes);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, "PNG encode failed: " + error_message);
  }

  png_set_write_fn(png, &out, write_callback, flush_callback);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
  png_write_info(png, info);
  const std::size_t row_samples = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    const auto *src = samples.data() + row_samples * y;
    for (std::size_t i = 0; i < row_samples; ++i) {
      if (bit_depth == 16) {
        row[2 * i] = static_cast<std::uint8_t>(src[i] >> 8);  // PNG is big-endian
        row[2 * i + 1] = static_cast<std::uint8_t>(src[i] & 0xFF);
      } else {
        row[i] = static_cast<std::uint8_t>(src[i]);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

Image decode_image(std::string_view png_bytes) {
  RawPng raw = decode_png(png_bytes);
  require(raw.bit_depth == 8, ErrorCode::kFormat, "conditioning image must be 8-bit");
  const int out_channels = raw.has_color ? 3 : 1;
  const std::size_t pixels = static_cast<std::size_t>(raw.width) * raw.height;
  std::vector<std::uint8_t> data(pixels * out_channels);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int c = 0; c < out_channels; ++c) {
      data[p * out_channels + c] = static_cast<std::uint8_t>(raw.samples[p * raw.channels + c]);
    }
  }
  return Image(raw.width, raw.height, out_channels, std::move(data));
}

Image load_image(const fs::path &path) { return decode_image(read_file(path)); }

std::string encode_image(const Image &image) {
  std::vector<std::uint16_t> samples(image.data().begin(), image.data().end());
  return encode_png(image.width(), image.height(), image.channels(), 8, samples);
}

Mask decode_mask(std::string_view png_bytes, int threshold) {
  require(threshold >= 0 && threshold <= 255, ErrorCode::kValidation,
          "mask threshold must be in [0, 255]");
  RawPng raw = decode_png(png_bytes);
  require(!raw.has_color && raw.channels == 1, ErrorCode::kFormat,
          "mask must be a single-channel grayscale PNG");
  require(raw.bit_depth == 8, ErrorCode::kFormat, "mask must be 8-bit");
  std::vector<std::uint8_t> bits(raw.samples.size());
  std::transform(raw.samples.begin(), raw.samples.end(), bits.begin(),
                 [threshold](std::uint16_t s) { return static_cast<std::uint8_t>(s >= threshold); });
  return Mask(raw.width, raw.height, std::move(bits));
}

Mask load_mask(const fs::path &path, int threshold) {
  return decode_mask(read_file(path), threshold);
}

std::string encode_mask(const Mask &mask) {
  std::vector<std::uint16_t> samples(mask.bits().size());
  std::transform(mask.bits().begin(), mask.bits().end(), samples.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint16_t>(b ? 255 : 0); });
  return encode_png(mask.width(), mask.height(), 1, 8, samples);
}

void save_mask(const Mask &mask, const fs::path &path) { write_file(path, encode_mask(mask)); }

DepthMap decode_depth_png(std::string_view png_bytes, const DepthRange &range) {
  require(std::isfinite(range.min) && std::isfinite(range.max) && range.max >= range.min,
          ErrorCode::kValidation, "depth range must satisfy min <= max");
  require(range.min >= 0.0, ErrorCode::kValidation, "depth range must be nonnegative");
  RawPng raw = decode_png(png_bytes);
  require(!raw.has_color && raw.channels == 1 && raw.bit_depth == 16, ErrorCode::kFormat,
          "depth PNG must be 16-bit single-channel grayscale");
  std::vector<float> data(raw.samples.size());
  const double span = range.max - range.min;
  std::transform(raw.samples.begin(), raw.samples.end(), data.begin(), [&](std::uint16_t s) {
    return static_cast<float>(range.min + (static_cast<double>(s) / 65535.0) * span);
  });
  return DepthMap(raw.width, raw.height, std::move(data));
}

std::string encode_depth_png(const DepthMap &depth, const DepthRange &range) {
  require(range.max >= range.min, ErrorCode::kValidation, "depth range must satisfy min <= max");
  const double span = range.max - range.min;
  std::vector<std::uint16_t> samples(depth.data().size());
  std::transform(depth.data().begin(), depth.data().end(), samples.begin(), [&](float v) {
    if (span <= 0.0) return std::uint16_t{0};
    const double s = std::round((static_cast<double>(v) - range.min) / span * 65535.0);
    return static_cast<std::uint16_t>(std::clamp(s, 0.0, 65535.0));
  });
  return encode_png(depth.width(), depth.height(), 1, 16, samples);
}

Tensor depth_to_tensor(const DepthMap &depth) {
  return Tensor({static_cast<std::size_t>(depth.height()), static_cast<std::size_t>(depth.width())},
                std::vector<float>(depth.data().begin(), depth.data().end()));
}

DepthMap tensor_to_depth(const Tensor &tensor) {
  require(tensor.rank() == 2, ErrorCode::kShape,
          "depth tensor must have rank 2, got rank " + std::to_string(tensor.rank()));
  return DepthMap(static_cast<int>(tensor.dim(1)), static_cast<int>(tensor.dim(0)),
                  std::vector<float>(tensor.data().begin(), tensor.data().end()));
}

DepthMap decode_depth(std::string_view bytes, const std::optional<DepthRange> &range) {
  if (looks_like_tensor(bytes)) return tensor_to_depth(decode_tensor(bytes));
  require(range.has_value(), ErrorCode::kValidation,
          "16-bit depth PNG requires a {min, max} range");
  return decode_depth_png(bytes, *range);
}

fs::path depth_sidecar_path(const fs::path &png_path) {
  fs::path appended = png_path;
  appended += ".json";
  if (fs::exists(appended)) return appended;
  fs::path replaced = png_path;
  replaced.replace_extension(".json");
  return replaced;
}

DepthRange load_depth_range(const fs::path &sidecar) {
  if (!fs::exists(sidecar)) {
    fail(ErrorCode::kValidation, "missing depth sidecar '" + sidecar.string() + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(sidecar));
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::kFormat, "depth sidecar is not valid JSON: " + std::string(e.what()));
  }
  require(doc.is_object() && doc.contains("min") && doc.contains("max") &&
              doc["min"].is_number() && doc["max"].is_number(),
          ErrorCode::kFormat, "depth sidecar must contain numeric \"min\" and \"max\"");
  return DepthRange{doc["min"].get<double>(), doc["max"].get<double>()};
}

DepthMap load_depth(const fs::path &path) {
  const std::string bytes = read_file(path);
  if (looks_like_tensor(bytes)) return tensor_to_depth(decode_tensor(bytes));
  return decode_depth_png(bytes, load_depth_range(depth_sidecar_path(path)));
}

void save_depth(const DepthMap &depth, const fs::path &path) {
  save_tensor(depth_to_tensor(depth), path);
}

void save_depth_png(const DepthMap &depth, const DepthRange &range, const fs::path &png_path) {
  write_file(png_path, encode_depth_png(depth, range));
  fs::path sidecar = png_path;
  sidecar += ".json";
  nlohmann::json doc = {{"min", range.min}, {"max", range.max}};
  write_file(sidecar, doc.dump() + "\n");
}

}  // namespace objctrl
