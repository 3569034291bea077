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

#include "orthoforge/ground_plane.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "orthoforge/error.hpp"
#include "orthoforge/parallel.hpp"
#include "orthoforge/rng.hpp"
#include "orthoforge/simd/kernels.hpp"

namespace orthoforge {
namespace {

struct Moments {
  Vec3 mean = Vec3::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
};

template <typename Select>
Moments moments_of(const std::vector<Vec3>& points, Select&& selected) {
  Moments m;
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!selected(i)) continue;
    m.mean += points[i];
    ++n;
  }
  if (n == 0) return m;
  m.mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!selected(i)) continue;
    const Vec3 d = points[i] - m.mean;
    m.covariance += d * d.transpose();
  }
  m.covariance /= static_cast<double>(n);
  return m;
}

/// Largest-magnitude component positive, so the sign is a pure function of
/// the plane.
Vec3 canonical_sign(const Vec3& n) {
  Eigen::Index k = 0;
  n.cwiseAbs().maxCoeff(&k);
  return n[k] < 0.0 ? Vec3(-n) : n;
}

struct Hypothesis {
  Vec3 normal;
  double offset = 0.0;  // in the centered frame
  bool valid = false;
};

Hypothesis sample_hypothesis(const std::vector<Vec3>& centered, RandomStream rng, double scale) {
  const std::uint64_t n = centered.size();
  std::uint64_t idx[3];
  idx[0] = rng.below(n);
  do {
    idx[1] = rng.below(n);
  } while (idx[1] == idx[0]);
  do {
    idx[2] = rng.below(n);
  } while (idx[2] == idx[0] || idx[2] == idx[1]);
  const Vec3& a = centered[idx[0]];
  const Vec3 cross = (centered[idx[1]] - a).cross(centered[idx[2]] - a);
  const double len = cross.norm();
  Hypothesis h;
  if (!(len > 1e-12 * scale * scale)) return h;
  h.normal = cross / len;
  h.offset = -h.normal.dot(a);
  h.valid = true;
  return h;
}

}  // namespace

constexpr int kMaxRefinePasses = 16;

GroundPlane fit_plane_ransac(const ColoredPointCloud& cloud, const RansacOptions& options) {
  const std::size_t n = cloud.size();
  if (n < 3) {
    throw GeometryError("plane fit needs at least 3 points, got " + std::to_string(n));
  }
  if (options.iterations < 1) throw DomainError("RANSAC iterations must be positive");
  const Aabb box = bounding_box(cloud);
  const double threshold =
      options.threshold > 0.0 ? options.threshold : kDefaultThresholdFraction * box.diagonal;
  if (!(threshold > 0.0)) throw GeometryError("all points coincide; no plane is defined");

  const Moments all = moments_of(cloud.points, [](std::size_t) { return true; });
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(all.covariance);
    const auto& ev = solver.eigenvalues();  // ascending
    if (!(ev[2] > 0.0) || ev[1] <= 1e-12 * ev[2]) {
      throw GeometryError("points are collinear; no plane is defined");
    }
  }

  // Hypotheses are scored in float32 on centered coordinates.
  std::vector<Vec3> centered(n);
  std::vector<float> xs(n), ys(n), zs(n);
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = cloud.points[i] - all.mean;
    xs[i] = static_cast<float>(centered[i].x());
    ys[i] = static_cast<float>(centered[i].y());
    zs[i] = static_cast<float>(centered[i].z());
  }

  const auto iterations = static_cast<std::size_t>(options.iterations);
  std::vector<Hypothesis> hypotheses(iterations);
  std::vector<std::size_t> scores(iterations, 0);
  const RandomStream root(options.seed, streams::kRansac);
  const auto& kernels = simd::active();
  const auto thr_f = static_cast<float>(threshold);
  parallel_for(iterations, options.threads, [&](std::size_t it) {
    Hypothesis h = sample_hypothesis(centered, root.split(it), box.diagonal);
    hypotheses[it] = h;
    if (!h.valid) return;
    const float plane[4] = {static_cast<float>(h.normal.x()), static_cast<float>(h.normal.y()),
                            static_cast<float>(h.normal.z()), static_cast<float>(h.offset)};
    scores[it] = kernels.count_near_plane(xs.data(), ys.data(), zs.data(), n, plane, thr_f);
  });

  std::size_t best = iterations;
  for (std::size_t it = 0; it < iterations; ++it) {
    if (!hypotheses[it].valid) continue;
    if (best == iterations || scores[it] > scores[best]) best = it;
  }
  if (best == iterations) {
    throw GeometryError("every RANSAC sample was degenerate");
  }

  const Hypothesis& h = hypotheses[best];
  std::vector<std::uint8_t> inlier(n, 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(h.normal.dot(centered[i]) + h.offset) <= threshold) {
      inlier[i] = 1;
      ++count;
    }
  }
  const double fraction = static_cast<double>(count) / static_cast<double>(n);
  if (count < 3 || fraction < options.min_inlier_fraction) {
    throw NoPlaneError("no dominant plane: best consensus " + std::to_string(fraction) +
                       " is below " + std::to_string(options.min_inlier_fraction) +
                       "; use the perspective fallback");
  }

  // Least squares over the consensus set, then over the points within the
  // threshold of the refined plane until that set stops changing. A single
  // pass keeps part of the hypothesis tilt because the band it selects is
  // truncated around the hypothesis rather than the true plane.
  GroundPlane plane;
  plane.threshold = threshold;
  Moments refined;
  for (int pass = 0; pass < kMaxRefinePasses; ++pass) {
    refined = moments_of(cloud.points, [&](std::size_t i) { return inlier[i] != 0; });
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(refined.covariance);
    plane.normal = canonical_sign(solver.eigenvectors().col(0).normalized());
    plane.offset = -plane.normal.dot(refined.mean);
    bool changed = false;
    std::size_t next_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t in = std::fabs(plane.signed_distance(cloud.points[i])) <= threshold;
      changed |= in != inlier[i];
      inlier[i] = in;
      next_count += in;
    }
    if (!changed || next_count < 3) break;
  }

  std::size_t final_count = 0;
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(plane.signed_distance(cloud.points[i])) <= threshold) {
      sum += cloud.points[i];
      ++final_count;
    }
  }
  plane.inlier_count = final_count;
  plane.inlier_fraction = static_cast<double>(final_count) / static_cast<double>(n);
  plane.centroid = final_count > 0 ? Vec3(sum / static_cast<double>(final_count)) : refined.mean;
  return plane;
}

GroundPlane build_frame(const GroundPlane& plane) {
  GroundPlane out = plane;
  const Vec3 n = plane.normal;
  int k = 0;
  for (int axis = 1; axis < 3; ++axis) {
    if (std::fabs(n[axis]) < std::fabs(n[k])) k = axis;
  }
  const Vec3 axis = Vec3::Unit(k);
  out.basis_u = (axis - axis.dot(n) * n).normalized();
  out.basis_v = n.cross(out.basis_u);
  return out;
}

PlanePointSet to_plane_coords(const ColoredPointCloud& cloud, const GroundPlane& plane) {
  PlanePointSet pts;
  pts.coords.resize(cloud.size());
  pts.colors = cloud.colors;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 d = cloud.points[i] - plane.centroid;
    pts.coords[i] = Vec3(d.dot(plane.basis_u), d.dot(plane.basis_v), d.dot(plane.normal));
  }
  return pts;
}

Vec3 from_plane_coords(const Vec3& uvh, const GroundPlane& plane) {
  return plane.centroid + uvh.x() * plane.basis_u + uvh.y() * plane.basis_v +
         uvh.z() * plane.normal;
}

std::pair<PlanePointSet, GroundPlane> fix_orientation(PlanePointSet pts, GroundPlane plane) {
  const double eps = plane.threshold;
  std::size_t above = 0;
  std::size_t below = 0;
  for (const auto& c : pts.coords) {
    if (c.z() > eps) ++above;
    if (c.z() < -eps) ++below;
  }
  if (above < below) {
    plane.normal = -plane.normal;
    plane.offset = -plane.offset;
    plane.basis_v = -plane.basis_v;
    for (auto& c : pts.coords) {
      c.y() = -c.y();
      c.z() = -c.z();
    }
  }
  return {std::move(pts), std::move(plane)};
}

}  // namespace orthoforge
