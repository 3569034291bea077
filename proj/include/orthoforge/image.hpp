// Copyright 2026 The OrthoForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace orthoforge {

/// Planar floating-point image: channel c occupies the contiguous block
/// [c*width*height, (c+1)*width*height), rows top to bottom. Values are kept
/// unquantized; 8-bit conversion happens only when writing files.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return pixel_count() == 0; }
  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  double& at(int c, int x, int y) noexcept { return data_[index(c, x, y)]; }
  double at(int c, int x, int y) const noexcept { return data_[index(c, x, y)]; }

  std::span<double> plane(int c) noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<const double> plane(int c) const noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<double> row(int c, int y) noexcept {
    return plane(c).subspan(static_cast<std::size_t>(y) * width_, width_);
  }
  std::span<const double> row(int c, int y) const noexcept {
    return plane(c).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Image& other) const = default;

 private:
  std::size_t index(int c, int x, int y) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Per-pixel boolean raster, row-major, 1 = set.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> flags;

  Mask() = default;
  Mask(int w, int h, bool value = false)
      : width(w), height(h),
        flags(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), value ? 1 : 0) {}

  bool at(int x, int y) const noexcept {
    return flags[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool value) noexcept {
    flags[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0;
  }
  std::size_t count() const noexcept;
  bool operator==(const Mask& other) const = default;
};

/// Luminance (0.299, 0.587, 0.114) of a 3-channel image; 1-channel images are
/// copied.
Image to_gray(const Image& img);

/// Transposes every channel.
Image transpose(const Image& img);

// PNG I/O (8-bit). Reading converts any PNG to the requested layout.
Image read_png_rgb(const std::filesystem::path& path);
Image read_png_gray(const std::filesystem::path& path);
/// Pixels >= 128 become set.
Mask read_png_mask(const std::filesystem::path& path);

/// Values are rounded and clamped to [0, 255]. 1- and 3-channel images only.
void write_png(const Image& img, const std::filesystem::path& path);
/// Set pixels are written as 255.
void write_png(const Mask& mask, const std::filesystem::path& path);

}  // namespace orthoforge
