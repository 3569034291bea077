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


#include "orthoforge/canny.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "orthoforge/error.hpp"

namespace orthoforge {

void CannyOptions::validate() const {
  if (!(sigma > 0.0)) throw DomainError("Canny sigma must be positive");
  if (!(low_frac > 0.0 && low_frac < high_frac && high_frac <= 1.0)) {
    throw DomainError("Canny thresholds need 0 < low_frac < high_frac <= 1");
  }
}

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

Image gaussian_blur(const Image& gray, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : kernel) v /= sum;
  const int w = gray.width();
  const int h = gray.height();
  Image tmp(w, h, 1);
  Image out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * gray.at(0, clamp_index(x + i, w), y);
      }
      tmp.at(0, x, y) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(0, x, clamp_index(y + i, h));
      }
      out.at(0, x, y) = acc;
    }
  }
  return out;
}

}  // namespace

Mask canny_edges(const Image& img, const CannyOptions& options) {
  options.validate();
  const int w = img.width();
  const int h = img.height();
  Mask edges(w, h);
  if (img.empty()) return edges;
  const Image smooth = gaussian_blur(to_gray(img), options.sigma);
  const auto px = [&](int x, int y) {
    return smooth.at(0, clamp_index(x, w), clamp_index(y, h));
  };

  const std::size_t n = img.pixel_count();
  std::vector<double> mag(n);
  std::vector<std::uint8_t> dir(n);  // 0: horizontal gradient, 1: 45, 2: vertical, 3: 135
  double max_mag = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mag[i] = std::hypot(gx, gy);
      max_mag = std::max(max_mag, mag[i]);
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      if (angle < 22.5 || angle >= 157.5) {
        dir[i] = 0;
      } else if (angle < 67.5) {
        dir[i] = 1;
      } else if (angle < 112.5) {
        dir[i] = 2;
      } else {
        dir[i] = 3;
      }
    }
  }
  if (!(max_mag > 0.0)) return edges;

  // Neighbor offsets along the gradient for each quantized direction.
  const int step[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  const auto mag_at = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return mag[static_cast<std::size_t>(y) * w + x];
  };
  std::vector<double> thin(n, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = mag[i];
      if (m == 0.0) continue;
      const auto& s = step[dir[i]];
      // Strict on one side and inclusive on the other so a plateau of two
      // equal maxima keeps exactly one pixel.
      if (m >= mag_at(x + s[0], y + s[1]) && m > mag_at(x - s[0], y - s[1])) thin[i] = m;
    }
  }

  const double high = options.high_frac * max_mag;
  const double low = options.low_frac * max_mag;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (thin[i] >= high && !edges.flags[i]) {
      edges.flags[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (!edges.flags[j] && thin[j] >= low) {
          edges.flags[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace orthoforge
