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
#include <utility>
#include <vector>

#include "orthoforge/pointcloud.hpp"

namespace orthoforge {

/// Ground plane n.x + offset = 0 with a right-handed in-plane frame
/// {basis_u, basis_v, normal} anchored at the inlier centroid.
struct GroundPlane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  Vec3 basis_u = Vec3::Zero();
  Vec3 basis_v = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  double inlier_fraction = 0.0;
  std::size_t inlier_count = 0;
  /// Absolute inlier distance used for the fit; reused as the orientation band.
  double threshold = 0.0;

  double signed_distance(const Vec3& p) const noexcept { return normal.dot(p) + offset; }
};

struct RansacOptions {
  /// Absolute inlier distance. Non-positive selects 0.01 x bounding-box diagonal.
  double threshold = 0.0;
  int iterations = 1024;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Consensus below this fraction raises NoPlaneError.
  double min_inlier_fraction = 0.10;
};

inline constexpr double kDefaultThresholdFraction = 0.01;

/// RANSAC over minimal 3-point samples followed by least-squares refinement
/// (smallest eigenvector of the inlier covariance), repeated on the points
/// within the threshold of the refined plane until that set is stable. Iteration i
/// draws from its own random stream, so the result does not depend on the
/// thread count; equal consensus goes to the lowest iteration index. The
/// returned plane has no frame yet (see build_frame).
GroundPlane fit_plane_ransac(const ColoredPointCloud& cloud, const RansacOptions& options);

/// basis_u is world axis e_k (k = argmin |n_k|, lowest index on ties)
/// projected onto the plane and normalized; basis_v = n x basis_u.
GroundPlane build_frame(const GroundPlane& plane);

/// Plane coordinates (u, v, h) of each point relative to the centroid.
struct PlanePointSet {
  std::vector<Vec3> coords;
  std::vector<Rgb8> colors;

  std::size_t size() const noexcept { return coords.size(); }
};

PlanePointSet to_plane_coords(const ColoredPointCloud& cloud, const GroundPlane& plane);

/// Inverse of to_plane_coords for a single coordinate triple.
Vec3 from_plane_coords(const Vec3& uvh, const GroundPlane& plane);

/// Makes "up" positive: if fewer points sit above the plane (h > threshold)
/// than below (h < -threshold), negates normal, offset, basis_v, and every
/// v and h. Idempotent.
std::pair<PlanePointSet, GroundPlane> fix_orientation(PlanePointSet pts, GroundPlane plane);

}  // namespace orthoforge
