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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orthoforge/ground_plane.hpp"
#include "orthoforge/image.hpp"
#include "orthoforge/pointcloud.hpp"

namespace orthoforge {

/// Rasterization parameters. Heights are normalized (see HeightNormalization)
/// so ground_band and roof_band_frac are dimensionless.
struct RasterConfig {
  double rho = 4.0;             // target points per base pixel
  double r_min = 0.02;          // scene units per base pixel
  double r_max = 0.50;
  std::size_t p_max = 16'777'216;  // max base pixels (W*H)
  int ssaa = 2;
  double roof_band_frac = 0.02;  // Delta as a fraction of the p05..p95 height range
  double ground_band = 0.12;     // b
  int m_min = 3;
  double splat_radius_px = 2.0;  // supersampled pixels
  double crop_frac = 0.10;       // per side
  double w_sat = 1.0;            // roof weight sum that saturates occupancy
  int threads = 1;

  /// Throws DomainError on out-of-range fields.
  void validate() const;
};

/// Maps metric heights to the dimensionless scale used by the band tests.
struct HeightNormalization {
  double scale = 1.0;   // h_norm = h / scale
  double p05 = 0.0;     // of h_norm
  double p95 = 0.0;
  double delta = 0.0;   // roof band width in h_norm units
  double tau = 0.0;     // delta / 2

  double normalize(double h) const noexcept { return h / scale; }
};

/// scale = max(p98 of positive heights, min_scale); min_scale lets callers keep
/// the ground band at least as wide as the plane-fit inlier band.
HeightNormalization normalize_heights(const PlanePointSet& pts, const RasterConfig& cfg,
                                      double min_scale = 0.0);

/// Nearest-rank percentile, q in [0, 1]; `values` is reordered.
double percentile(std::vector<double>& values, double q);

/// Placement of a raster in plane coordinates. Row 0 is the top (largest v).
/// Cropping keeps the uncropped frame and records offsets so plane coordinates
/// of retained pixels never change.
struct Georef {
  double u_min = 0.0;
  double v_min = 0.0;
  double pixel_scale = 1.0;
  int full_width = 0;
  int full_height = 0;
  int crop_x = 0;
  int crop_y = 0;

  /// (u, v) of the center of pixel (x, y) of the (possibly cropped) raster.
  Eigen::Vector2d pixel_center(int x, int y) const noexcept {
    return {u_min + (crop_x + x + 0.5) * pixel_scale,
            v_min + (full_height - 1 - (crop_y + y) + 0.5) * pixel_scale};
  }
  /// Lower-left corner of a cropped raster of the given height.
  Eigen::Vector2d origin(int height) const noexcept {
    return {u_min + crop_x * pixel_scale,
            v_min + (full_height - crop_y - height) * pixel_scale};
  }
  /// Pixel containing plane coordinate (u, v); may be out of range.
  std::array<long, 2> pixel_of(double u, double v) const noexcept;
};

struct OrthoImage {
  Image rgb;     // 3 channels, [0, 255], unquantized
  Mask holes;    // hole pixels carry the (0, 0, 0) sentinel until inpainted
  Georef georef;

  int width() const noexcept { return rgb.width(); }
  int height() const noexcept { return rgb.height(); }
};

struct ResolutionChoice {
  double pixel_scale = 0.0;       // r, units per base pixel
  double unclamped_scale = 0.0;   // sqrt(A / (N / rho))
  int width = 0;                  // base pixels
  int height = 0;
  double u_min = 0.0;
  double v_min = 0.0;
  double ground_area = 0.0;       // A
  std::size_t ground_count = 0;   // N
  bool used_full_extent = false;  // ground band had zero area
  bool rescaled_for_p_max = false;
};

/// Pixel scale from ground area and count: clip(sqrt(A / (N / rho)), r_min,
/// r_max), then enlarged until floor(extent / r) + 1 pixels per axis fit in
/// p_max. Returns {r, unclamped r, width, height}.
struct ScaleSolution {
  double pixel_scale;
  double unclamped_scale;
  int width;
  int height;
  bool rescaled;
};
ScaleSolution solve_pixel_scale(double area, std::size_t count, double extent_u,
                                double extent_v, const RasterConfig& cfg);

ResolutionChoice choose_resolution(const PlanePointSet& pts, const RasterConfig& cfg,
                                   const HeightNormalization& heights);

/// Roof fusion weight exp((h - h_max) / tau).
inline double roof_weight(double h, double h_max, double tau) noexcept {
  return std::exp((h - h_max) / tau);
}

/// alpha * roof + (1 - alpha) * ground per channel.
std::array<double, 3> composite_pixel(double alpha, const std::array<double, 3>& roof,
                                      const std::array<double, 3>& ground) noexcept;

/// Layered accumulators on the supersampled grid (structure of arrays).
struct OrthoFrameBuffer {
  int width = 0;
  int height = 0;
  Georef georef;  // supersampled pixel scale
  double w_sat = 1.0;
  int m_min = 3;

  std::vector<double> roof_rgb;       // 3 per pixel, weighted sums
  std::vector<double> roof_weight;    // sum of kernel * w_i
  std::vector<std::uint32_t> roof_hits;
  std::vector<double> h_max;          // normalized, -inf where uncovered
  std::vector<double> ground_rgb;     // 3 per pixel, kernel-weighted sums
  std::vector<double> ground_weight;
  std::vector<std::uint32_t> ground_hits;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  /// Fused roof color, or nullopt when the roof layer is empty.
  std::optional<std::array<double, 3>> roof_color(std::size_t i) const;
  std::optional<std::array<double, 3>> ground_color(std::size_t i) const;
  double alpha(std::size_t i) const noexcept;
  bool hole(std::size_t i) const noexcept;
};

/// Two-pass splat rasterization: pass 1 finds h_max per pixel, pass 2 fuses
/// the roof band and averages the ground band. Pixels with fewer than m_min
/// roof hits have their roof layer cleared. Output is independent of
/// cfg.threads.
OrthoFrameBuffer rasterize_layers(const PlanePointSet& pts, const RasterConfig& cfg,
                                  const HeightNormalization& heights,
                                  const ResolutionChoice& resolution);

/// Supersampled composite; pixels without roof or ground support are holes.
OrthoImage composite(const OrthoFrameBuffer& buf);

/// Lanczos-3 separable resampling by an integer factor with hole-aware
/// normalization; the hole mask is reduced by majority vote.
OrthoImage downsample_lanczos(const OrthoImage& img, int ssaa);

/// Removes floor(frac * W) columns and floor(frac * H) rows from each side.
OrthoImage center_crop(const OrthoImage& img, double crop_frac);

// ---------------------------------------------------------------------------
// Perspective fallback

struct Correspondence {
  double sx = 0.0;  // source pixel column (pixel centers at integers)
  double sy = 0.0;  // source pixel row, downwards
  double tu = 0.0;  // target plane coordinates, v upwards
  double tv = 0.0;
};

using Homography = Eigen::Matrix3d;

/// Direct linear solution of the homography mapping `from` onto `to` for four
/// pairs. Throws DomainError if any three points of either side are collinear.
Homography solve_homography(std::span<const Eigen::Vector2d, 4> from,
                            std::span<const Eigen::Vector2d, 4> to);

Eigen::Vector2d apply_homography(const Homography& h, const Eigen::Vector2d& p) noexcept;

struct WarpOptions {
  /// Output units per pixel; non-positive derives it from the quad area ratio.
  double pixel_scale = 0.0;
};

/// Orthorectifies a photo onto the target plane through the four
/// correspondences. The output grid puts the extreme target coordinates on
/// pixel centers; pixels that map outside the photo are holes.
OrthoImage perspective_fallback(const Image& photo, std::span<const Correspondence, 4> corr,
                                const WarpOptions& options = {});

/// Reads "sx,sy,tu,tv" rows (an optional header line is skipped).
std::array<Correspondence, 4> read_correspondences(const std::string& path);

// ---------------------------------------------------------------------------
// End-to-end

struct RenderOptions {
  RasterConfig raster;
  RansacOptions ransac;
  bool keep_framebuffer = false;
};

struct RenderResult {
  OrthoImage image;        // base resolution, cropped
  OrthoImage uncropped;    // base resolution before crop
  GroundPlane plane;       // oriented, with frame
  HeightNormalization heights;
  ResolutionChoice resolution;
  std::optional<OrthoFrameBuffer> framebuffer;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// fit -> frame -> plane coordinates -> orientation -> resolution ->
/// rasterize -> composite -> downsample -> crop.
RenderResult render_orthophoto(const ColoredPointCloud& cloud, const RenderOptions& options);

}  // namespace orthoforge
