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

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "orthoforge/image.hpp"
#include "orthoforge/ortho_raster.hpp"
#include "orthoforge/pointcloud.hpp"

namespace orthoforge {

// ---------------------------------------------------------------------------
// Box city: ground rectangle [0, ground_width] x [0, ground_depth] at z = 0
// with axis-aligned boxes standing on it.

struct Box {
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 1.0;   // along x
  double depth = 1.0;   // along y
  double height = 1.0;
  Rgb8 roof{200, 0, 0};
  Rgb8 wall{255, 0, 255};

  bool covers(double x, double y) const noexcept;
};

enum class GroundPattern { kUniform, kCheckerboard };

struct BoxCityScene {
  double ground_width = 100.0;
  double ground_depth = 100.0;
  GroundPattern pattern = GroundPattern::kUniform;
  Rgb8 ground{0, 120, 0};
  Rgb8 ground_alt{40, 160, 40};  // second checkerboard color
  double cell = 10.0;            // checkerboard cell size
  std::vector<Box> boxes;
  double density = 50.0;         // points per unit^2 on every surface
  double noise_sigma = 0.02;     // Gaussian position noise per axis
  std::uint64_t seed = 0;

  /// Throws DomainError when boxes leave the ground or sizes are invalid.
  void validate() const;

  /// Index of the tallest box whose footprint contains (x, y).
  std::optional<std::size_t> box_at(double x, double y) const noexcept;
  Rgb8 ground_color(double x, double y) const noexcept;
  /// Nadir color: the tallest covering roof, else the ground pattern.
  Rgb8 nadir_color(double x, double y) const noexcept;
};

/// Four boxes on a 184 x 184 ground, about two million points at the
/// default density.
BoxCityScene standard_box_city(std::uint64_t seed);

struct BoxCity {
  ColoredPointCloud cloud;
  /// Analytic nadir projection; pixel (x, y) covers
  /// [x r, (x + 1) r] x [ground_depth - (y + 1) r, ground_depth - y r].
  OrthoImage truth;
};

/// Samples the ground outside the footprints, every roof and every wall at
/// scene.density with Gaussian noise. The truth raster is sampled at pixel
/// centers with pixel scale `truth_pixel_scale`.
BoxCity generate_box_city(const BoxCityScene& scene, double truth_pixel_scale);

// ---------------------------------------------------------------------------
// Image comparison

struct ImageComparison {
  std::array<double, 3> mean_abs_diff{};  // per channel
  double fraction_within_16 = 0.0;        // max-channel difference <= 16
  double ssim = 0.0;                      // mean over channels and 8x8 windows
  std::size_t compared_pixels = 0;
};

/// With `exclude_holes`, pixels that are holes in either image are skipped
/// and 8x8 windows touching a hole do not enter the SSIM mean.
ImageComparison compare_images(const OrthoImage& a, const OrthoImage& b, bool exclude_holes);

/// Maps a pixel of a rendered image to world (x, y).
using PixelToWorld = std::function<Eigen::Vector2d(int x, int y)>;

/// World (x, y) for pixels of an image rendered in plane coordinates.
PixelToWorld plane_pixel_to_world(const Georef& georef, const GroundPlane& plane);
/// World (x, y) for pixels of an image whose georef is already in world units.
PixelToWorld world_pixel_to_world(const Georef& georef);

struct TruthComparison {
  std::size_t pixels = 0;             // evaluated (inside the window)
  std::size_t within_16 = 0;
  std::size_t roof_pixels = 0;        // truth pixel is a roof
  std::size_t roof_within_16 = 0;
  std::size_t holes = 0;
  std::size_t wall_colored = 0;       // within 16 of some wall color

  double fraction_within_16() const noexcept;
  double roof_fraction_within_16() const noexcept;
};

/// Compares every pixel whose world position lies in the window
/// [x0, x1] x [y0, y1] with the analytic nadir color. Hole pixels count as
/// mismatches.
TruthComparison compare_to_truth(const OrthoImage& img, const BoxCityScene& scene,
                                 const PixelToWorld& to_world, const Eigen::Vector4d& window);

// ---------------------------------------------------------------------------
// Perspective photographs of a box city

struct PinholeCamera {
  Vec3 position{50.0, -40.0, 120.0};
  Vec3 look_at{50.0, 50.0, 0.0};
  Vec3 up_hint{0.0, 0.0, 1.0};
  double focal_px = 800.0;
  int width = 800;
  int height = 600;

  /// Pixel coordinates (pixel centers at integers, y downwards) of a world
  /// point, or nullopt behind the camera.
  std::optional<Eigen::Vector2d> project(const Vec3& p) const;
};

/// Ray-cast photograph of the analytic scene with 2 x 2 rays per pixel.
/// Rays that hit nothing return black.
Image render_view(const BoxCityScene& scene, const PinholeCamera& camera);

}  // namespace orthoforge
