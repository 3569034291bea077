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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace orthoforge {

using Vec3 = Eigen::Vector3d;

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// Positions and per-point colors as produced by dense reconstruction.
/// Coordinates are held in double precision; files store float32.
struct ColoredPointCloud {
  std::vector<Vec3> points;
  std::vector<Rgb8> colors;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  void reserve(std::size_t n) {
    points.reserve(n);
    colors.reserve(n);
  }
  void push_back(const Vec3& p, Rgb8 c) {
    points.push_back(p);
    colors.push_back(c);
  }

  /// Throws DomainError if lengths differ or any coordinate is non-finite.
  void validate() const;

  bool operator==(const ColoredPointCloud& other) const {
    return points == other.points && colors == other.colors;
  }
};

struct Aabb {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();
  double diagonal = 0.0;
};

struct PlyLoadResult {
  ColoredPointCloud cloud;
  std::size_t declared_vertices = 0;
  /// Vertices discarded because a coordinate was NaN or infinite.
  std::size_t dropped_nonfinite = 0;
};

/// Reads an ascii or binary_little_endian PLY with a "vertex" element carrying
/// float/double x, y, z and uchar red, green, blue. Other properties and
/// elements are skipped.
PlyLoadResult load_ply(const std::filesystem::path& path);

/// Writes binary_little_endian with float32 coordinates.
void save_ply(const ColoredPointCloud& cloud, const std::filesystem::path& path);

/// Throws DomainError for an empty cloud.
Aabb bounding_box(const ColoredPointCloud& cloud);

}  // namespace orthoforge
