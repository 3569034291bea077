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


#include "orthoforge/fixtures.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "orthoforge/error.hpp"
#include "orthoforge/rng.hpp"

namespace orthoforge {

bool Box::covers(double x, double y) const noexcept {
  return std::fabs(x - center_x) <= width / 2.0 && std::fabs(y - center_y) <= depth / 2.0;
}

void BoxCityScene::validate() const {
  if (!(ground_width > 0.0 && ground_depth > 0.0)) throw DomainError("ground extent must be positive");
  if (!(density > 0.0)) throw DomainError("sampling density must be positive");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be nonnegative");
  if (pattern == GroundPattern::kCheckerboard && !(cell > 0.0)) {
    throw DomainError("checkerboard cell must be positive");
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    const std::string name = "box " + std::to_string(i);
    if (!(b.width > 0.0 && b.depth > 0.0 && b.height > 0.0)) {
      throw DomainError(name + " needs positive width, depth and height");
    }
    if (b.center_x - b.width / 2.0 < 0.0 || b.center_x + b.width / 2.0 > ground_width ||
        b.center_y - b.depth / 2.0 < 0.0 || b.center_y + b.depth / 2.0 > ground_depth) {
      throw DomainError(name + " leaves the ground extent");
    }
  }
}

std::optional<std::size_t> BoxCityScene::box_at(double x, double y) const noexcept {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].covers(x, y) && (!best || boxes[i].height > boxes[*best].height)) best = i;
  }
  return best;
}

Rgb8 BoxCityScene::ground_color(double x, double y) const noexcept {
  if (pattern == GroundPattern::kUniform) return ground;
  const auto cx = static_cast<long>(std::floor(x / cell));
  const auto cy = static_cast<long>(std::floor(y / cell));
  return ((cx + cy) % 2 == 0) ? ground : ground_alt;
}

Rgb8 BoxCityScene::nadir_color(double x, double y) const noexcept {
  if (const auto b = box_at(x, y)) return boxes[*b].roof;
  return ground_color(x, y);
}

BoxCityScene standard_box_city(std::uint64_t seed) {
  BoxCityScene s;
  s.ground_width = 184.0;
  s.ground_depth = 184.0;
  s.ground = {70, 140, 60};
  s.seed = seed;
  s.boxes = {
      {50.0, 50.0, 40.0, 40.0, 8.0, {200, 40, 40}, {0, 255, 255}},
      {134.0, 50.0, 40.0, 40.0, 10.0, {40, 60, 200}, {255, 160, 0}},
      {50.0, 134.0, 40.0, 40.0, 12.0, {230, 200, 60}, {255, 0, 255}},
      {134.0, 134.0, 40.0, 40.0, 14.0, {235, 235, 235}, {60, 0, 120}},
  };
  return s;
}

namespace {

std::size_t sample_count(double density, double area) {
  return static_cast<std::size_t>(std::llround(density * area));
}

}  // namespace

BoxCity generate_box_city(const BoxCityScene& scene, double truth_pixel_scale) {
  scene.validate();
  if (!(truth_pixel_scale > 0.0)) throw DomainError("truth pixel scale must be positive");
  BoxCity city;
  auto& cloud = city.cloud;

  RandomStream noise_rng(scene.seed, streams::kFixtureNoise);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigma = scene.noise_sigma;
  const auto emit = [&](double x, double y, double z, Rgb8 c) {
    if (sigma > 0.0) {
      x += sigma * noise(noise_rng);
      y += sigma * noise(noise_rng);
      z += sigma * noise(noise_rng);
    }
    cloud.push_back(Vec3(x, y, z), c);
  };

  // Ground: uniform candidates over the whole rectangle, footprints rejected.
  RandomStream ground_rng(scene.seed, streams::kFixtureGround);
  const std::size_t ground_candidates =
      sample_count(scene.density, scene.ground_width * scene.ground_depth);
  cloud.reserve(ground_candidates * 3 / 2);
  for (std::size_t i = 0; i < ground_candidates; ++i) {
    const double x = ground_rng.uniform() * scene.ground_width;
    const double y = ground_rng.uniform() * scene.ground_depth;
    if (scene.box_at(x, y)) continue;
    emit(x, y, 0.0, scene.ground_color(x, y));
  }

  const RandomStream box_root(scene.seed, streams::kFixtureBoxes);
  for (std::size_t bi = 0; bi < scene.boxes.size(); ++bi) {
    const Box& b = scene.boxes[bi];
    RandomStream rng = box_root.split(bi);
    const double x0 = b.center_x - b.width / 2.0;
    const double y0 = b.center_y - b.depth / 2.0;
    const std::size_t roof = sample_count(scene.density, b.width * b.depth);
    for (std::size_t i = 0; i < roof; ++i) {
      emit(x0 + rng.uniform() * b.width, y0 + rng.uniform() * b.depth, b.height, b.roof);
    }
    // Walls at y = y0, y = y0 + depth, x = x0, x = x0 + width.
    const std::size_t wx = sample_count(scene.density, b.width * b.height);
    const std::size_t wy = sample_count(scene.density, b.depth * b.height);
    for (const double y : {y0, y0 + b.depth}) {
      for (std::size_t i = 0; i < wx; ++i) {
        emit(x0 + rng.uniform() * b.width, y, rng.uniform() * b.height, b.wall);
      }
    }
    for (const double x : {x0, x0 + b.width}) {
      for (std::size_t i = 0; i < wy; ++i) {
        emit(x, y0 + rng.uniform() * b.depth, rng.uniform() * b.height, b.wall);
      }
    }
  }

  const int w = std::max(1, static_cast<int>(std::lround(scene.ground_width / truth_pixel_scale)));
  const int h = std::max(1, static_cast<int>(std::lround(scene.ground_depth / truth_pixel_scale)));
  OrthoImage& truth = city.truth;
  truth.rgb = Image(w, h, 3);
  truth.holes = Mask(w, h);
  truth.georef = Georef{0.0, scene.ground_depth - h * truth_pixel_scale, truth_pixel_scale, w, h,
                        0, 0};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector2d c = truth.georef.pixel_center(x, y);
      const Rgb8 col = scene.nadir_color(c.x(), c.y());
      truth.rgb.at(0, x, y) = col.r;
      truth.rgb.at(1, x, y) = col.g;
      truth.rgb.at(2, x, y) = col.b;
    }
  }
  return city;
}

// ---------------------------------------------------------------------------

ImageComparison compare_images(const OrthoImage& a, const OrthoImage& b, bool exclude_holes) {
  if (!a.rgb.same_shape(b.rgb)) {
    throw DomainError("compared images differ in size: " + std::to_string(a.width()) + "x" +
                      std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                      std::to_string(b.height()));
  }
  const int w = a.width();
  const int h = a.height();
  const int channels = a.rgb.channels();
  const auto mask_ok = [](const OrthoImage& img) {
    return img.holes.width == img.width() && img.holes.height == img.height();
  };
  const bool use_a = exclude_holes && mask_ok(a);
  const bool use_b = exclude_holes && mask_ok(b);
  std::vector<std::uint8_t> skip(static_cast<std::size_t>(w) * h, 0);
  for (std::size_t i = 0; i < skip.size(); ++i) {
    skip[i] = (use_a && a.holes.flags[i]) || (use_b && b.holes.flags[i]);
  }

  ImageComparison out;
  std::size_t within = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (skip[static_cast<std::size_t>(y) * w + x]) continue;
      ++out.compared_pixels;
      double worst = 0.0;
      for (int c = 0; c < channels; ++c) {
        const double d = std::fabs(a.rgb.at(c, x, y) - b.rgb.at(c, x, y));
        if (c < 3) out.mean_abs_diff[c] += d;
        worst = std::max(worst, d);
      }
      if (worst <= 16.0) ++within;
    }
  }
  if (out.compared_pixels == 0) return out;
  for (auto& m : out.mean_abs_diff) m /= static_cast<double>(out.compared_pixels);
  out.fraction_within_16 = static_cast<double>(within) / static_cast<double>(out.compared_pixels);

  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  const int win_w = std::min(8, w);
  const int win_h = std::min(8, h);
  double ssim_sum = 0.0;
  std::size_t windows = 0;
  for (int c = 0; c < channels; ++c) {
    for (int y0 = 0; y0 + win_h <= h; ++y0) {
      for (int x0 = 0; x0 + win_w <= w; ++x0) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        bool hole = false;
        for (int y = y0; y < y0 + win_h && !hole; ++y) {
          for (int x = x0; x < x0 + win_w; ++x) {
            if (skip[static_cast<std::size_t>(y) * w + x]) {
              hole = true;
              break;
            }
            const double va = a.rgb.at(c, x, y);
            const double vb = b.rgb.at(c, x, y);
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
          }
        }
        if (hole) continue;
        const double n = static_cast<double>(win_w) * win_h;
        const double ma = sa / n;
        const double mb = sb / n;
        const double va = std::max(0.0, saa / n - ma * ma);
        const double vb = std::max(0.0, sbb / n - mb * mb);
        const double cov = sab / n - ma * mb;
        ssim_sum += ((2 * ma * mb + kC1) * (2 * cov + kC2)) /
                    ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
        ++windows;
      }
    }
  }
  out.ssim = windows > 0 ? ssim_sum / static_cast<double>(windows) : 0.0;
  return out;
}

PixelToWorld plane_pixel_to_world(const Georef& georef, const GroundPlane& plane) {
  return [georef, plane](int x, int y) {
    const Eigen::Vector2d uv = georef.pixel_center(x, y);
    const Vec3 world = from_plane_coords(Vec3(uv.x(), uv.y(), 0.0), plane);
    return Eigen::Vector2d(world.x(), world.y());
  };
}

PixelToWorld world_pixel_to_world(const Georef& georef) {
  return [georef](int x, int y) { return georef.pixel_center(x, y); };
}

double TruthComparison::fraction_within_16() const noexcept {
  return pixels == 0 ? 0.0 : static_cast<double>(within_16) / static_cast<double>(pixels);
}

double TruthComparison::roof_fraction_within_16() const noexcept {
  return roof_pixels == 0 ? 0.0
                          : static_cast<double>(roof_within_16) / static_cast<double>(roof_pixels);
}

TruthComparison compare_to_truth(const OrthoImage& img, const BoxCityScene& scene,
                                 const PixelToWorld& to_world, const Eigen::Vector4d& window) {
  TruthComparison out;
  const bool has_mask = img.holes.width == img.width() && img.holes.height == img.height();
  const auto max_diff = [&](int x, int y, Rgb8 c) {
    return std::max({std::fabs(img.rgb.at(0, x, y) - c.r), std::fabs(img.rgb.at(1, x, y) - c.g),
                     std::fabs(img.rgb.at(2, x, y) - c.b)});
  };
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Eigen::Vector2d p = to_world(x, y);
      if (p.x() < window[0] || p.x() > window[1] || p.y() < window[2] || p.y() > window[3]) {
        continue;
      }
      ++out.pixels;
      const bool roof = scene.box_at(p.x(), p.y()).has_value();
      if (roof) ++out.roof_pixels;
      if (has_mask && img.holes.at(x, y)) {
        ++out.holes;
        continue;
      }
      if (max_diff(x, y, scene.nadir_color(p.x(), p.y())) <= 16.0) {
        ++out.within_16;
        if (roof) ++out.roof_within_16;
      }
      for (const Box& b : scene.boxes) {
        if (max_diff(x, y, b.wall) <= 16.0) {
          ++out.wall_colored;
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct CameraFrame {
  Vec3 forward;
  Vec3 right;
  Vec3 down;
  double cx;
  double cy;
};

CameraFrame frame_of(const PinholeCamera& cam) {
  CameraFrame f;
  f.forward = (cam.look_at - cam.position).normalized();
  const Vec3 right = f.forward.cross(cam.up_hint);
  if (!(right.norm() > 1e-9)) throw DomainError("camera up hint is parallel to the view direction");
  f.right = right.normalized();
  f.down = f.forward.cross(f.right);
  f.cx = (cam.width - 1) / 2.0;
  f.cy = (cam.height - 1) / 2.0;
  return f;
}

/// Nearest intersection of a ray with the scene; false on a miss.
bool trace(const BoxCityScene& scene, const Vec3& o, const Vec3& d, Rgb8& color) {
  double best = std::numeric_limits<double>::infinity();
  if (d.z() < 0.0) {
    const double t = -o.z() / d.z();
    const Vec3 p = o + t * d;
    if (t > 0.0 && p.x() >= 0.0 && p.x() <= scene.ground_width && p.y() >= 0.0 &&
        p.y() <= scene.ground_depth) {
      best = t;
      color = scene.ground_color(p.x(), p.y());
    }
  }
  for (const Box& b : scene.boxes) {
    const Vec3 lo(b.center_x - b.width / 2.0, b.center_y - b.depth / 2.0, 0.0);
    const Vec3 hi(b.center_x + b.width / 2.0, b.center_y + b.depth / 2.0, b.height);
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int axis_near = -1;
    bool miss = false;
    for (int a = 0; a < 3; ++a) {
      if (d[a] == 0.0) {
        if (o[a] < lo[a] || o[a] > hi[a]) miss = true;
        continue;
      }
      double t0 = (lo[a] - o[a]) / d[a];
      double t1 = (hi[a] - o[a]) / d[a];
      if (t0 > t1) std::swap(t0, t1);
      if (t0 > t_near) {
        t_near = t0;
        axis_near = a;
      }
      t_far = std::min(t_far, t1);
    }
    if (miss || t_near > t_far || t_near <= 0.0 || t_near >= best) continue;
    best = t_near;
    color = axis_near == 2 ? b.roof : b.wall;
  }
  return std::isfinite(best);
}

}  // namespace

std::optional<Eigen::Vector2d> PinholeCamera::project(const Vec3& p) const {
  const CameraFrame f = frame_of(*this);
  const Vec3 d = p - position;
  const double z = d.dot(f.forward);
  if (!(z > 0.0)) return std::nullopt;
  return Eigen::Vector2d(f.cx + focal_px * d.dot(f.right) / z, f.cy + focal_px * d.dot(f.down) / z);
}

Image render_view(const BoxCityScene& scene, const PinholeCamera& camera) {
  scene.validate();
  if (camera.width < 1 || camera.height < 1 || !(camera.focal_px > 0.0)) {
    throw DomainError("camera needs a positive size and focal length");
  }
  const CameraFrame f = frame_of(camera);
  Image out(camera.width, camera.height, 3);
  constexpr double kSub[2] = {-0.25, 0.25};
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      double acc[3] = {0, 0, 0};
      for (const double sy : kSub) {
        for (const double sx : kSub) {
          const Vec3 dir = f.forward * camera.focal_px + f.right * (x + sx - f.cx) +
                           f.down * (y + sy - f.cy);
          Rgb8 c;
          if (trace(scene, camera.position, dir, c)) {
            acc[0] += c.r;
            acc[1] += c.g;
            acc[2] += c.b;
          }
        }
      }
      for (int ch = 0; ch < 3; ++ch) out.at(ch, x, y) = acc[ch] / 4.0;
    }
  }
  return out;
}

}  // namespace orthoforge
