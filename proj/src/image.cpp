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

#include "orthoforge/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "orthoforge/error.hpp"

namespace orthoforge {

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 0) {
    throw DomainError("image dimensions must be nonnegative");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

Image to_gray(const Image& img) {
  if (img.channels() == 1) return img;
  if (img.channels() < 3) throw DomainError("grayscale conversion needs 1 or 3 channels");
  Image gray(img.width(), img.height(), 1);
  auto r = img.plane(0);
  auto g = img.plane(1);
  auto b = img.plane(2);
  auto out = gray.plane(0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  }
  return gray;
}

Image transpose(const Image& img) {
  Image out(img.height(), img.width(), img.channels());
  constexpr int kBlock = 32;
  for (int c = 0; c < img.channels(); ++c) {
    for (int y0 = 0; y0 < img.height(); y0 += kBlock) {
      for (int x0 = 0; x0 < img.width(); x0 += kBlock) {
        const int y1 = std::min(y0 + kBlock, img.height());
        const int x1 = std::min(x0 + kBlock, img.width());
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) out.at(c, y, x) = img.at(c, x, y);
        }
      }
    }
  }
  return out;
}

namespace {

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

std::vector<std::uint8_t> read_png_raw(const std::filesystem::path& path,
                                       png_uint_32 format, int& width,
                                       int& height) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.string().c_str()) == 0) {
    const std::string why = image.message;
    if (!std::filesystem::exists(path)) {
      throw IoError("cannot open " + path.string() + ": no such file");
    }
    throw FormatError("cannot decode PNG " + path.string() + ": " + why);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string why = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + why);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return buffer;
}

void write_png_raw(const std::filesystem::path& path, png_uint_32 format,
                   int width, int height, const std::uint8_t* pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (png_image_write_to_file(&image, path.string().c_str(), 0, pixels, 0, nullptr) == 0) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

}  // namespace

Image read_png_rgb(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  const auto raw = read_png_raw(path, PNG_FORMAT_RGB, w, h);
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = (static_cast<std::size_t>(y) * w + x) * 3;
      for (int c = 0; c < 3; ++c) img.at(c, x, y) = raw[p + c];
    }
  }
  return img;
}

Image read_png_gray(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  const auto raw = read_png_raw(path, PNG_FORMAT_GRAY, w, h);
  Image img(w, h, 1);
  std::copy(raw.begin(), raw.end(), img.plane(0).begin());
  return img;
}

Mask read_png_mask(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  const auto raw = read_png_raw(path, PNG_FORMAT_GRAY, w, h);
  Mask mask(w, h);
  for (std::size_t i = 0; i < raw.size(); ++i) mask.flags[i] = raw[i] >= 128 ? 1 : 0;
  return mask;
}

void write_png(const Image& img, const std::filesystem::path& path) {
  const int w = img.width();
  const int h = img.height();
  if (img.channels() == 1) {
    std::vector<std::uint8_t> raw(img.pixel_count());
    auto plane = img.plane(0);
    std::transform(plane.begin(), plane.end(), raw.begin(), quantize);
    write_png_raw(path, PNG_FORMAT_GRAY, w, h, raw.data());
    return;
  }
  if (img.channels() != 3) throw DomainError("PNG output supports 1 or 3 channels");
  std::vector<std::uint8_t> raw(img.pixel_count() * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = (static_cast<std::size_t>(y) * w + x) * 3;
      for (int c = 0; c < 3; ++c) raw[p + c] = quantize(img.at(c, x, y));
    }
  }
  write_png_raw(path, PNG_FORMAT_RGB, w, h, raw.data());
}

void write_png(const Mask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> raw(mask.flags.size());
  std::transform(mask.flags.begin(), mask.flags.end(), raw.begin(),
                 [](std::uint8_t f) { return static_cast<std::uint8_t>(f ? 255 : 0); });
  write_png_raw(path, PNG_FORMAT_GRAY, mask.width, mask.height, raw.data());
}

}  // namespace orthoforge
