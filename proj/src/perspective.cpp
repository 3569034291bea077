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

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "orthoforge/error.hpp"
#include "orthoforge/ortho_raster.hpp"

namespace orthoforge {
namespace {

using Eigen::Matrix3d;
using Eigen::Vector2d;

void require_general_position(std::span<const Vector2d, 4> pts, const char* side) {
  double extent2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) extent2 = std::max(extent2, (pts[i] - pts[j]).squaredNorm());
  }
  for (int skip = 0; skip < 4; ++skip) {
    Vector2d tri[3];
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) tri[k++] = pts[i];
    }
    const Vector2d a = tri[1] - tri[0];
    const Vector2d b = tri[2] - tri[0];
    const double area2 = std::fabs(a.x() * b.y() - a.y() * b.x());
    if (!(area2 > 1e-9 * extent2)) {
      throw DomainError(std::string("degenerate correspondences: three ") + side +
                        " points are collinear");
    }
  }
}

/// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
Matrix3d conditioning(std::span<const Vector2d, 4> pts) {
  Vector2d c = Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= 4.0;
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= 4.0;
  const double s = std::sqrt(2.0) / mean_dist;
  Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

Vector2d transform(const Matrix3d& t, const Vector2d& p) {
  const Eigen::Vector3d q = t * Eigen::Vector3d(p.x(), p.y(), 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

double polygon_area(std::array<Vector2d, 4> pts) {
  Vector2d c = Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= 4.0;
  std::sort(pts.begin(), pts.end(), [&](const Vector2d& a, const Vector2d& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  double twice = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % 4];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return std::fabs(twice) / 2.0;
}

}  // namespace

Homography solve_homography(std::span<const Vector2d, 4> from, std::span<const Vector2d, 4> to) {
  require_general_position(from, "source");
  require_general_position(to, "target");
  const Matrix3d tf = conditioning(from);
  const Matrix3d tt = conditioning(to);
  Eigen::Matrix<double, 8, 9> a = Eigen::Matrix<double, 8, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const Vector2d p = transform(tf, from[i]);
    const Vector2d q = transform(tt, to[i]);
    a.row(2 * i) << p.x(), p.y(), 1, 0, 0, 0, -q.x() * p.x(), -q.x() * p.y(), -q.x();
    a.row(2 * i + 1) << 0, 0, 0, p.x(), p.y(), 1, -q.y() * p.x(), -q.y() * p.y(), -q.y();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Matrix3d result = tt.inverse() * hn * tf;
  if (std::fabs(result(2, 2)) > 1e-12) result /= result(2, 2);
  return result;
}

Vector2d apply_homography(const Homography& h, const Vector2d& p) noexcept {
  return transform(h, p);
}

OrthoImage perspective_fallback(const Image& photo, std::span<const Correspondence, 4> corr,
                                const WarpOptions& options) {
  if (photo.channels() != 3) throw DomainError("perspective fallback expects an RGB photo");
  std::array<Vector2d, 4> src;
  std::array<Vector2d, 4> dst;
  for (int i = 0; i < 4; ++i) {
    src[i] = {corr[i].sx, corr[i].sy};
    dst[i] = {corr[i].tu, corr[i].tv};
  }
  // Maps target plane coordinates back into the photo.
  const Homography back = solve_homography(dst, src);

  double r = options.pixel_scale;
  if (!(r > 0.0)) r = std::sqrt(polygon_area(dst) / polygon_area(src));
  double umin = dst[0].x(), umax = umin, vmin = dst[0].y(), vmax = vmin;
  for (const auto& p : dst) {
    umin = std::min(umin, p.x());
    umax = std::max(umax, p.x());
    vmin = std::min(vmin, p.y());
    vmax = std::max(vmax, p.y());
  }
  const long w = std::lround((umax - umin) / r) + 1;
  const long h = std::lround((vmax - vmin) / r) + 1;
  if (w < 1 || h < 1 || static_cast<double>(w) * static_cast<double>(h) > 1.0e9) {
    throw DomainError("warp output size is unreasonable; check the pixel scale");
  }

  OrthoImage out;
  out.rgb = Image(static_cast<int>(w), static_cast<int>(h), 3);
  out.holes = Mask(static_cast<int>(w), static_cast<int>(h));
  out.georef = Georef{umin - r / 2.0, vmin - r / 2.0, r, static_cast<int>(w),
                      static_cast<int>(h), 0, 0};
  const double max_x = photo.width() - 1;
  const double max_y = photo.height() - 1;
  constexpr double kEdge = 1e-6;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      Vector2d s = apply_homography(back, out.georef.pixel_center(x, y));
      if (!(s.x() >= -kEdge && s.x() <= max_x + kEdge && s.y() >= -kEdge &&
            s.y() <= max_y + kEdge)) {
        out.holes.set(x, y, true);
        continue;
      }
      s.x() = std::clamp(s.x(), 0.0, max_x);
      s.y() = std::clamp(s.y(), 0.0, max_y);
      const int x0 = std::min(static_cast<int>(s.x()), photo.width() - 1);
      const int y0 = std::min(static_cast<int>(s.y()), photo.height() - 1);
      const int x1 = std::min(x0 + 1, photo.width() - 1);
      const int y1 = std::min(y0 + 1, photo.height() - 1);
      const double fx = s.x() - x0;
      const double fy = s.y() - y0;
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - fx) * photo.at(c, x0, y0) + fx * photo.at(c, x1, y0);
        const double bottom = (1.0 - fx) * photo.at(c, x0, y1) + fx * photo.at(c, x1, y1);
        out.rgb.at(c, x, y) = (1.0 - fy) * top + fy * bottom;
      }
    }
  }
  return out;
}

std::array<Correspondence, 4> read_correspondences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open correspondence file '" + path + "'");
  std::array<Correspondence, 4> out{};
  std::string line;
  int rows = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double v[4];
    if (!(fields >> v[0] >> v[1] >> v[2] >> v[3])) {
      if (rows == 0 && line_no == 1) continue;  // header
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected sx,sy,tu,tv");
    }
    std::string extra;
    if (fields >> extra) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": too many columns");
    }
    if (rows == 4) throw FormatError(path + ": more than 4 correspondences");
    out[rows++] = Correspondence{v[0], v[1], v[2], v[3]};
  }
  if (rows != 4) {
    throw FormatError(path + ": expected 4 correspondences, found " + std::to_string(rows));
  }
  return out;
}

}  // namespace orthoforge
