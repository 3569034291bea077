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


#include "orthoforge/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "orthoforge/error.hpp"

namespace orthoforge {

HoleMask HoleMask::from(const Mask& holes, int dilation) {
  if (dilation < 0) throw DomainError("mask dilation must be nonnegative");
  HoleMask out{holes, dilation};
  for (int step = 0; step < dilation; ++step) {
    const Mask prev = out.flags;
    for (int y = 0; y < prev.height; ++y) {
      for (int x = 0; x < prev.width; ++x) {
        if (prev.at(x, y)) continue;
        bool grow = false;
        for (int dy = -1; dy <= 1 && !grow; ++dy) {
          for (int dx = -1; dx <= 1 && !grow; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            grow = nx >= 0 && ny >= 0 && nx < prev.width && ny < prev.height && prev.at(nx, ny);
          }
        }
        if (grow) out.flags.set(x, y, true);
      }
    }
  }
  return out;
}

namespace {

enum class State : std::uint8_t { kKnown, kBand, kInside };

constexpr double kFar = 1.0e6;

/// Upwind solution of |grad T| = 1 from the two neighbors (i1, i2).
double solve_eikonal(double t1, bool known1, double t2, bool known2) {
  if (known1 && known2) {
    const double d = t1 - t2;
    if (std::fabs(d) < 1.0) {
      return (t1 + t2 + std::sqrt(2.0 - d * d)) / 2.0;
    }
    return 1.0 + std::min(t1, t2);
  }
  if (known1) return 1.0 + t1;
  if (known2) return 1.0 + t2;
  return kFar;
}

}  // namespace

Image inpaint(const Image& img, const HoleMask& mask, int radius) {
  const int w = img.width();
  const int h = img.height();
  if (mask.flags.width != w || mask.flags.height != h) {
    throw DomainError("hole mask is " + std::to_string(mask.flags.width) + "x" +
                      std::to_string(mask.flags.height) + " but the image is " +
                      std::to_string(w) + "x" + std::to_string(h));
  }
  if (radius < 1) throw DomainError("inpainting radius must be at least 1");
  const std::size_t n = img.pixel_count();
  const std::size_t holes = mask.flags.count();
  Image out = img;
  if (holes == 0) return out;
  if (holes == n) throw DomainError("every pixel is a hole; nothing to inpaint from");

  std::vector<State> state(n, State::kKnown);
  std::vector<double> dist(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.flags.flags[i] != 0) {
      state[i] = State::kInside;
      dist[i] = kFar;
    }
  }

  using Entry = std::tuple<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> front;
  const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  const int offsets[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

  // Known pixels touching the hole seed the front.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (state[idx(x, y)] != State::kKnown) continue;
      for (const auto& o : offsets) {
        const int nx = x + o[0];
        const int ny = y + o[1];
        if (nx >= 0 && ny >= 0 && nx < w && ny < h && state[idx(nx, ny)] == State::kInside) {
          front.emplace(0.0, idx(x, y));
          break;
        }
      }
    }
  }

  const auto known_dist = [&](int x, int y, double& t) {
    if (x < 0 || y < 0 || x >= w || y >= h) return false;
    const std::size_t i = idx(x, y);
    t = dist[i];
    return state[i] == State::kKnown;
  };

  const int channels = img.channels();
  std::vector<double> acc(static_cast<std::size_t>(channels));
  const int r2 = radius * radius;
  const auto fill = [&](int x, int y) {
    const double t_here = dist[idx(x, y)];
    std::fill(acc.begin(), acc.end(), 0.0);
    double total = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
      const int ny = y + dy;
      if (ny < 0 || ny >= h) continue;
      for (int dx = -radius; dx <= radius; ++dx) {
        const int nx = x + dx;
        const int d2 = dx * dx + dy * dy;
        if (nx < 0 || nx >= w || d2 == 0 || d2 > r2) continue;
        const std::size_t j = idx(nx, ny);
        if (state[j] != State::kKnown) continue;
        const double len = std::sqrt(static_cast<double>(d2));
        const double weight =
            (1.0 / len) * (1.0 / d2) * (1.0 / (1.0 + std::fabs(dist[j] - t_here)));
        for (int c = 0; c < channels; ++c) acc[c] += weight * out.at(c, nx, ny);
        total += weight;
      }
    }
    for (int c = 0; c < channels; ++c) out.at(c, x, y) = acc[c] / total;
  };

  while (!front.empty()) {
    const auto [t, i] = front.top();
    front.pop();
    if (state[i] == State::kKnown && t > dist[i]) continue;
    state[i] = State::kKnown;
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (const auto& o : offsets) {
      const int nx = x + o[0];
      const int ny = y + o[1];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const std::size_t j = idx(nx, ny);
      if (state[j] != State::kInside) continue;
      double tl = 0, tr = 0, tu = 0, td = 0;
      const bool kl = known_dist(nx - 1, ny, tl);
      const bool kr = known_dist(nx + 1, ny, tr);
      const bool ku = known_dist(nx, ny - 1, tu);
      const bool kd = known_dist(nx, ny + 1, td);
      dist[j] = std::min({solve_eikonal(tl, kl, tu, ku), solve_eikonal(tr, kr, tu, ku),
                          solve_eikonal(tl, kl, td, kd), solve_eikonal(tr, kr, td, kd)});
      state[j] = State::kBand;
      fill(nx, ny);
      front.emplace(dist[j], j);
    }
  }
  return out;
}

OrthoImage inpaint(const OrthoImage& img, int radius, int dilation) {
  OrthoImage out;
  out.rgb = inpaint(img.rgb, HoleMask::from(img.holes, dilation), radius);
  out.holes = Mask(img.width(), img.height());
  out.georef = img.georef;
  return out;
}

namespace {

struct ChannelStats {
  double mean = 0.0;
  double stddev = 0.0;
};

std::vector<ChannelStats> channel_stats(const OrthoImage& img) {
  std::vector<ChannelStats> stats(static_cast<std::size_t>(img.rgb.channels()));
  const bool has_mask = img.holes.width == img.width() && img.holes.height == img.height();
  for (int c = 0; c < img.rgb.channels(); ++c) {
    const auto plane = img.rgb.plane(c);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (has_mask && img.holes.flags[i]) continue;
      sum += plane[i];
      ++count;
    }
    if (count == 0) throw DomainError("cannot harmonize an image made only of holes");
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (has_mask && img.holes.flags[i]) continue;
      ss += (plane[i] - mean) * (plane[i] - mean);
    }
    stats[static_cast<std::size_t>(c)] = {mean, std::sqrt(ss / static_cast<double>(count))};
  }
  return stats;
}

}  // namespace

OrthoImage harmonize(const OrthoImage& img, const OrthoImage* reference,
                     std::vector<std::string>* warnings) {
  if (reference == nullptr) return img;
  if (img.rgb.empty() || reference->rgb.empty()) {
    throw DomainError("harmonization needs nonempty images");
  }
  if (img.rgb.channels() != reference->rgb.channels()) {
    throw DomainError("harmonization needs matching channel counts");
  }
  const auto src = channel_stats(img);
  const auto ref = channel_stats(*reference);
  OrthoImage out = img;
  const bool has_mask = img.holes.width == img.width() && img.holes.height == img.height();
  for (int c = 0; c < img.rgb.channels(); ++c) {
    const auto& s = src[static_cast<std::size_t>(c)];
    const auto& r = ref[static_cast<std::size_t>(c)];
    double gain = 1.0;
    if (s.stddev > 1e-12) {
      gain = r.stddev / s.stddev;
    } else if (warnings != nullptr) {
      warnings->push_back("channel " + std::to_string(c) +
                          " has zero variance; only its mean was matched");
    }
    auto plane = out.rgb.plane(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (has_mask && img.holes.flags[i]) continue;
      plane[i] = std::clamp((plane[i] - s.mean) * gain + r.mean, 0.0, 255.0);
    }
  }
  return out;
}

}  // namespace orthoforge
