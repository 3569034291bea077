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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/LU>

#include "orthoforge/error.hpp"
#include "orthoforge/fixtures.hpp"
#include "orthoforge/ortho_raster.hpp"
#include "test_support.hpp"

namespace orthoforge {
namespace {

TEST(ChooseResolution, DensityFormula) {
  RasterConfig cfg;
  const auto s = solve_pixel_scale(100.0, 1'000'000, 10.0, 10.0, cfg);
  EXPECT_NEAR(s.unclamped_scale, 0.02, 1e-15);
  EXPECT_NEAR(s.pixel_scale, 0.02, 1e-15);
  EXPECT_FALSE(s.rescaled);
}

TEST(ChooseResolution, ClampsToRange) {
  RasterConfig cfg;
  // sqrt(A / (N / rho)) = 0.001
  const auto fine = solve_pixel_scale(1.0, 4'000'000, 1.0, 1.0, cfg);
  EXPECT_NEAR(fine.unclamped_scale, 0.001, 1e-15);
  EXPECT_EQ(fine.pixel_scale, cfg.r_min);
  const auto coarse = solve_pixel_scale(1e6, 4, 1000.0, 1000.0, cfg);
  EXPECT_EQ(coarse.pixel_scale, cfg.r_max);
}

TEST(ChooseResolution, RescalesToPixelBudget) {
  RasterConfig cfg;
  // 1000 x 1000 units at r = 0.02 would need 50,001^2 pixels.
  const auto s = solve_pixel_scale(1e6, 2'500'000'000ULL, 1000.0, 1000.0, cfg);
  EXPECT_TRUE(s.rescaled);
  const auto pixels = static_cast<std::size_t>(s.width) * static_cast<std::size_t>(s.height);
  EXPECT_LE(pixels, cfg.p_max);
  // Within one row and column of the budget.
  EXPECT_GT(static_cast<std::size_t>(s.width + 1) * static_cast<std::size_t>(s.height + 1),
            cfg.p_max);
  EXPECT_GE(s.pixel_scale, cfg.r_min);
}

TEST(ChooseResolution, SafetyOverRandomConfigs) {
  RandomStream rng(12, 0);
  for (int i = 0; i < 500; ++i) {
    RasterConfig cfg;
    cfg.r_min = 0.01 + rng.uniform() * 0.1;
    cfg.r_max = cfg.r_min + rng.uniform();
    cfg.p_max = 1 + rng.below(1'000'000);
    cfg.rho = 0.5 + 8 * rng.uniform();
    const double eu = 1 + rng.uniform() * 2000;
    const double ev = 1 + rng.uniform() * 2000;
    const auto s = solve_pixel_scale(eu * ev * rng.uniform() + 1e-3, 1 + rng.below(10'000'000),
                                     eu, ev, cfg);
    EXPECT_GE(s.pixel_scale, cfg.r_min);
    if (!s.rescaled) {
      EXPECT_LE(s.pixel_scale, cfg.r_max);
    }
    EXPECT_LE(static_cast<std::size_t>(s.width) * static_cast<std::size_t>(s.height), cfg.p_max);
  }
}

TEST(ChooseResolution, UsesGroundBandRectangle) {
  PlanePointSet pts;
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      pts.coords.emplace_back(i, j, 0.0);
      pts.colors.push_back(Rgb8{});
    }
  }
  // A tall point far away widens the extent but not the ground area.
  pts.coords.emplace_back(30.0, 0.0, 5.0);
  pts.colors.push_back(Rgb8{});
  HeightNormalization hn;
  RasterConfig cfg;
  const auto choice = choose_resolution(pts, cfg, hn);
  EXPECT_EQ(choice.ground_count, 121u);
  EXPECT_DOUBLE_EQ(choice.ground_area, 100.0);
  EXPECT_FALSE(choice.used_full_extent);
  EXPECT_EQ(choice.width, static_cast<int>(std::floor(30.0 / choice.pixel_scale)) + 1);
}

TEST(RoofWeight, BandTopAndBottom) {
  const double delta = 0.37;
  const double tau = delta / 2.0;
  EXPECT_EQ(roof_weight(4.2, 4.2, tau), 1.0);
  EXPECT_NEAR(roof_weight(4.2 - delta, 4.2, tau), std::exp(-2.0), 1e-12);
}

TEST(RoofWeight, BoundsOverTheBand) {
  RandomStream rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const double delta = 0.01 + rng.uniform();
    const double hmax = rng.uniform() * 10;
    const double h = hmax - rng.uniform() * delta;
    const double w = roof_weight(h, hmax, delta / 2.0);
    EXPECT_GT(w, 0.0);
    EXPECT_LE(w, 1.0);
    EXPECT_EQ(w == 1.0, h == hmax);
  }
}

TEST(Composite, PixelFormula) {
  const std::array<double, 3> roof{200, 0, 0};
  const std::array<double, 3> ground{0, 120, 0};
  EXPECT_EQ(composite_pixel(1.0, roof, ground), roof);
  EXPECT_EQ(composite_pixel(0.0, roof, ground), ground);
  EXPECT_EQ(composite_pixel(0.5, roof, ground), (std::array<double, 3>{100, 60, 0}));
}

/// 5 x 5 unit-pixel grid without supersampling.
struct TinyGrid {
  RasterConfig cfg;
  HeightNormalization heights;
  ResolutionChoice res;
  TinyGrid() {
    cfg.ssaa = 1;
    cfg.m_min = 1;
    heights.delta = 0.5;
    heights.tau = 0.25;
    res.pixel_scale = 1.0;
    res.width = 5;
    res.height = 5;
  }
};

void add(PlanePointSet& pts, double u, double v, double h, Rgb8 c) {
  pts.coords.emplace_back(u, v, h);
  pts.colors.push_back(c);
}

TEST(Rasterize, SampleAtBandTopHasUnitWeight) {
  TinyGrid g;
  PlanePointSet pts;
  add(pts, 2.5, 2.5, 1.0, Rgb8{200, 0, 0});
  const auto buf = rasterize_layers(pts, g.cfg, g.heights, g.res);
  const std::size_t center = 2 * 5 + 2;
  EXPECT_EQ(buf.h_max[center], 1.0);
  EXPECT_EQ(buf.roof_weight[center], 1.0);
  EXPECT_EQ(buf.roof_hits[center], 1u);

  add(pts, 2.5, 2.5, 1.0 - g.heights.delta, Rgb8{200, 0, 0});
  const auto two = rasterize_layers(pts, g.cfg, g.heights, g.res);
  EXPECT_NEAR(two.roof_weight[center], 1.0 + std::exp(-2.0), 1e-12);
}

TEST(Rasterize, SamplesBelowTheRoofBandAreIgnored) {
  TinyGrid g;
  PlanePointSet pts;
  add(pts, 2.5, 2.5, 1.0, Rgb8{200, 0, 0});
  add(pts, 2.5, 2.5, 0.4, Rgb8{0, 0, 255});  // h_max - 0.6 < h_max - delta
  const auto buf = rasterize_layers(pts, g.cfg, g.heights, g.res);
  const auto c = buf.roof_color(2 * 5 + 2);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, (std::array<double, 3>{200, 0, 0}));
}

TEST(Rasterize, FlatPlaneHasNoRoof) {
  TinyGrid g;
  PlanePointSet pts;
  RandomStream rng(3, 0);
  for (int i = 0; i < 400; ++i) {
    add(pts, rng.uniform() * 5, rng.uniform() * 5, (rng.uniform() - 0.5) * 0.2,
        Rgb8{static_cast<std::uint8_t>(rng.below(256)), 100, 20});
  }
  const auto buf = rasterize_layers(pts, g.cfg, g.heights, g.res);
  const auto img = composite(buf);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    EXPECT_EQ(buf.alpha(i), 0.0);
    EXPECT_FALSE(buf.roof_color(i).has_value());
    const auto ground = buf.ground_color(i);
    ASSERT_TRUE(ground.has_value());
    const int x = static_cast<int>(i % 5);
    const int y = static_cast<int>(i / 5);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(img.rgb.at(c, x, y), (*ground)[c]);
  }
}

TEST(Rasterize, RoofHitsBelowMinimumAreCleared) {
  TinyGrid g;
  g.cfg.m_min = 3;
  PlanePointSet pts;
  add(pts, 2.5, 2.5, 1.0, Rgb8{200, 0, 0});
  add(pts, 2.5, 2.5, 1.0, Rgb8{200, 0, 0});
  const auto buf = rasterize_layers(pts, g.cfg, g.heights, g.res);
  EXPECT_EQ(buf.roof_weight[12], 0.0);
  EXPECT_FALSE(buf.roof_color(12).has_value());
  EXPECT_TRUE(buf.hole(12));
}

TEST(Rasterize, CompositeIsConvexPerPixel) {
  RasterConfig cfg;
  cfg.ssaa = 1;
  cfg.m_min = 1;
  HeightNormalization hn;
  hn.delta = 0.3;
  hn.tau = 0.15;
  ResolutionChoice res;
  res.pixel_scale = 1.0;
  res.width = 12;
  res.height = 12;
  PlanePointSet pts;
  RandomStream rng(21, 0);
  for (int i = 0; i < 600; ++i) {
    const double h = rng.uniform() < 0.5 ? 0.0 : 0.5 + rng.uniform();
    add(pts, rng.uniform() * 12, rng.uniform() * 12, h,
        Rgb8{static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
             static_cast<std::uint8_t>(rng.below(256))});
  }
  const auto buf = rasterize_layers(pts, cfg, hn, res);
  const auto img = composite(buf);
  const double r2 = cfg.splat_radius_px * cfg.splat_radius_px;
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      if (img.holes.at(x, y)) continue;
      const double cu = x + 0.5;
      const double cv = 12 - y - 0.5;
      std::array<double, 3> lo{255, 255, 255};
      std::array<double, 3> hi{0, 0, 0};
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double du = pts.coords[i].x() - cu;
        const double dv = pts.coords[i].y() - cv;
        if (du * du + dv * dv > r2) continue;
        const double ch[3] = {double(pts.colors[i].r), double(pts.colors[i].g),
                              double(pts.colors[i].b)};
        for (int c = 0; c < 3; ++c) {
          lo[c] = std::min(lo[c], ch[c]);
          hi[c] = std::max(hi[c], ch[c]);
        }
      }
      for (int c = 0; c < 3; ++c) {
        EXPECT_GE(img.rgb.at(c, x, y), lo[c] - 1e-9);
        EXPECT_LE(img.rgb.at(c, x, y), hi[c] + 1e-9);
      }
    }
  }
}

TEST(Rasterize, RoofOccludesGround) {
  RasterConfig cfg;
  cfg.ssaa = 1;
  HeightNormalization hn;
  hn.delta = 0.2;
  hn.tau = 0.1;
  ResolutionChoice res;
  res.pixel_scale = 0.25;
  res.width = 80;
  res.height = 80;
  PlanePointSet pts;
  RandomStream rng(9, 0);
  for (int i = 0; i < 40000; ++i) {
    const double u = rng.uniform() * 20;
    const double v = rng.uniform() * 20;
    add(pts, u, v, 0.0, Rgb8{0, 120, 0});
    if (u > 5 && u < 15 && v > 5 && v < 15) add(pts, u, v, 1.0, Rgb8{200, 0, 0});
  }
  const auto buf = rasterize_layers(pts, cfg, hn, res);
  const auto img = composite(buf);
  // Footprint interior, one splat radius away from the edges.
  for (int y = 24; y < 56; ++y) {
    for (int x = 24; x < 56; ++x) {
      ASSERT_EQ(buf.alpha(static_cast<std::size_t>(y) * 80 + x), 1.0);
      EXPECT_NEAR(img.rgb.at(0, x, y), 200.0, 1e-9);
      EXPECT_NEAR(img.rgb.at(1, x, y), 0.0, 1e-9);
    }
  }
  EXPECT_NEAR(img.rgb.at(1, 2, 2), 120.0, 1e-9);
}

TEST(Rasterize, IndependentOfThreadCount) {
  const auto city = generate_box_city(
      [] {
        BoxCityScene s;
        s.boxes.push_back(Box{30, 30, 20, 10, 6});
        s.density = 8;
        return s;
      }(),
      0.5);
  RenderOptions opt;
  const auto one = render_orthophoto(city.cloud, opt);
  opt.raster.threads = 3;
  const auto three = render_orthophoto(city.cloud, opt);
  EXPECT_EQ(one.image.rgb, three.image.rgb);
  EXPECT_EQ(one.image.holes, three.image.holes);
  EXPECT_EQ(render_orthophoto(city.cloud, RenderOptions{}).image.rgb, one.image.rgb);
}

OrthoImage solid(int w, int h, double value) {
  OrthoImage img;
  img.rgb = Image(w, h, 3, value);
  img.holes = Mask(w, h);
  img.georef = Georef{0, 0, 0.5, w, h, 0, 0};
  return img;
}

TEST(Downsample, FactorOneIsIdentity) {
  OrthoImage img = solid(9, 7, 0);
  img.rgb = test::random_image(9, 7, 3, 4);
  img.holes.set(3, 3, true);
  const auto out = downsample_lanczos(img, 1);
  EXPECT_EQ(out.rgb, img.rgb);
  EXPECT_EQ(out.holes, img.holes);
}

TEST(Downsample, PreservesConstants) {
  for (int f = 2; f <= 4; ++f) {
    const auto out = downsample_lanczos(solid(12 * f, 10 * f, 137.25), f);
    ASSERT_EQ(out.width(), 12);
    ASSERT_EQ(out.height(), 10);
    EXPECT_DOUBLE_EQ(out.georef.pixel_scale, 0.5 * f);
    for (const double v : out.rgb.data()) EXPECT_NEAR(v, 137.25, 1e-9);
  }
}

double high_band_energy(const Image& img) {
  const int w = img.width();
  const int h = img.height();
  double energy = 0.0;
  for (int ky = 0; ky < h; ++ky) {
    for (int kx = 0; kx < w; ++kx) {
      const int fx = std::min(kx, w - kx);
      const int fy = std::min(ky, h - ky);
      if (std::max(4 * fx, 4 * fy) <= std::min(w, h)) continue;  // keep |f| > N/4
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double phase = -2.0 * std::numbers::pi * (double(kx * x) / w + double(ky * y) / h);
          acc += img.at(0, x, y) * std::polar(1.0, phase);
        }
      }
      energy += std::norm(acc);
    }
  }
  return energy;
}

TEST(Downsample, AttenuatesAliasingComparedToNearestNeighbor) {
  const int f = 3;
  OrthoImage board = solid(24 * f, 24 * f, 0);
  for (int y = 0; y < board.height(); ++y) {
    for (int x = 0; x < board.width(); ++x) {
      for (int c = 0; c < 3; ++c) board.rgb.at(c, x, y) = ((x + y) % 2) ? 255.0 : 0.0;
    }
  }
  const auto lanczos = downsample_lanczos(board, f);
  Image nearest(24, 24, 3);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 24; ++x) nearest.at(c, x, y) = board.rgb.at(c, x * f, y * f);
    }
  }
  const double e_lanczos = high_band_energy(lanczos.rgb);
  const double e_nearest = high_band_energy(nearest);
  EXPECT_GT(e_nearest, 0.0);
  EXPECT_LT(e_lanczos, e_nearest);
}

TEST(Downsample, MajorityHolesAndFallback) {
  OrthoImage img = solid(8, 8, 50);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) img.holes.set(x, y, true);  // full block
  }
  img.holes.set(4, 4, true);  // one of four
  const auto out = downsample_lanczos(img, 2);
  EXPECT_TRUE(out.holes.at(0, 0));
  EXPECT_FALSE(out.holes.at(2, 2));
  EXPECT_NEAR(out.rgb.at(0, 2, 2), 50.0, 1e-9);
  EXPECT_NEAR(out.rgb.at(0, 1, 0), 50.0, 1e-9);
}

TEST(CenterCrop, Sizes) {
  const auto a = center_crop(solid(100, 100, 1), 0.10);
  EXPECT_EQ(a.width(), 80);
  EXPECT_EQ(a.height(), 80);

  auto img = solid(13, 9, 0);
  img.rgb = test::random_image(13, 9, 3, 2);
  const auto same = center_crop(img, 0.0);
  EXPECT_EQ(same.rgb, img.rgb);
  EXPECT_EQ(same.georef.crop_x, 0);
}

TEST(CenterCrop, KeepsPlaneCoordinates) {
  auto img = solid(10, 10, 0);
  img.rgb = test::random_image(10, 10, 3, 8);
  img.georef = Georef{-3.0, 7.0, 0.25, 10, 10, 0, 0};
  const auto out = center_crop(img, 0.45);
  ASSERT_EQ(out.width(), 2);
  ASSERT_EQ(out.height(), 2);
  EXPECT_EQ(out.georef.crop_x, 4);
  EXPECT_EQ(out.georef.crop_y, 4);
  EXPECT_EQ(out.georef.pixel_center(0, 0), img.georef.pixel_center(4, 4));
  const Eigen::Vector2d shift = out.georef.origin(2) - img.georef.origin(10);
  EXPECT_DOUBLE_EQ(shift.x(), 4 * 0.25);
  EXPECT_DOUBLE_EQ(shift.y(), 4 * 0.25);
  EXPECT_EQ(out.rgb.at(1, 1, 1), img.rgb.at(1, 5, 5));
  const auto px = out.georef.pixel_of(out.georef.pixel_center(1, 0).x(),
                                      out.georef.pixel_center(1, 0).y());
  EXPECT_EQ(px[0], 1);
  EXPECT_EQ(px[1], 0);
}

TEST(Perspective, IdentityCorrespondences) {
  const Image photo = test::random_image(40, 30, 3, 6);
  // Plane v points up, so the pixel-grid identity maps row y to v = -y.
  const std::array<Correspondence, 4> corr{{{0, 0, 0, 0}, {39, 0, 39, 0}, {39, 29, 39, -29},
                                            {0, 29, 0, -29}}};
  const auto out = perspective_fallback(photo, corr);
  ASSERT_EQ(out.width(), 40);
  ASSERT_EQ(out.height(), 30);
  EXPECT_EQ(out.holes.count(), 0u);
  for (std::size_t i = 0; i < photo.data().size(); ++i) {
    EXPECT_NEAR(out.rgb.data()[i], photo.data()[i], 1e-6);
  }
}

TEST(Perspective, RecoversKnownHomography) {
  Homography h0;
  h0 << 1.2, 0.1, -4.0, -0.05, 0.9, 3.0, 1e-3, -5e-4, 1.0;
  std::array<Eigen::Vector2d, 4> src{{{10, 12}, {300, 20}, {280, 220}, {15, 240}}};
  std::array<Eigen::Vector2d, 4> dst;
  for (int i = 0; i < 4; ++i) dst[i] = apply_homography(h0, src[i]);
  const Homography back = solve_homography(dst, src);
  const Homography h0_inv = h0.inverse();
  double sq = 0.0;
  int n = 0;
  for (int y = 0; y <= 240; y += 20) {
    for (int x = 0; x <= 300; x += 20) {
      const Eigen::Vector2d t = apply_homography(h0, Eigen::Vector2d(x, y));
      sq += (apply_homography(back, t) - apply_homography(h0_inv, t)).squaredNorm();
      ++n;
    }
  }
  EXPECT_LT(std::sqrt(sq / n), 0.5);
  EXPECT_LT(std::sqrt(sq / n), 1e-6);
}

TEST(Perspective, CollinearPointsAreRejected) {
  const Image photo(10, 10, 3);
  const std::array<Correspondence, 4> corr{{{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 2}, {0, 5, 0, 5}}};
  EXPECT_THROW(perspective_fallback(photo, corr), DomainError);
}

TEST(Perspective, ReadsCorrespondenceCsv) {
  test::ScratchDir dir;
  test::write_text(dir / "c.csv", "sx,sy,tu,tv\n0,0,1,2\n1,0,3,4\n1,1,5,6\n0,1,7,8\n");
  const auto c = read_correspondences(dir / "c.csv");
  EXPECT_EQ(c[3].tv, 8.0);
  test::write_text(dir / "bad.csv", "0,0,1,2\n1,0,3,4\n");
  EXPECT_THROW(read_correspondences(dir / "bad.csv"), FormatError);
  EXPECT_THROW(read_correspondences(dir / "none.csv"), IoError);
}

TEST(RenderOrthophoto, FlatTexturedPlane) {
  BoxCityScene scene;
  scene.ground_width = 40;
  scene.ground_depth = 40;
  scene.pattern = GroundPattern::kCheckerboard;
  scene.cell = 8;
  scene.density = 40;
  const auto city = generate_box_city(scene, 0.5);
  const auto result = render_orthophoto(city.cloud, RenderOptions{});
  const auto to_world = plane_pixel_to_world(result.image.georef, result.plane);
  OrthoImage truth = result.image;
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      const auto w = to_world(x, y);
      const Rgb8 c = scene.nadir_color(w.x(), w.y());
      truth.rgb.at(0, x, y) = c.r;
      truth.rgb.at(1, x, y) = c.g;
      truth.rgb.at(2, x, y) = c.b;
    }
  }
  truth.holes = Mask(truth.width(), truth.height());
  EXPECT_EQ(result.image.holes.count(), 0u);
  EXPECT_GE(compare_images(result.image, truth, false).ssim, 0.8);
}

TEST(RenderOrthophoto, AnnulusLeavesFlaggedCentralHole) {
  RandomStream rng(4, 0);
  ColoredPointCloud cloud;
  while (cloud.size() < 60000) {
    const double x = (rng.uniform() - 0.5) * 40;
    const double y = (rng.uniform() - 0.5) * 40;
    const double r = std::hypot(x, y);
    if (r >= 10 && r <= 20) cloud.push_back(Vec3(x, y, 0.0), Rgb8{90, 90, 90});
  }
  const auto result = render_orthophoto(cloud, RenderOptions{});
  const auto& img = result.image;
  const auto center = img.georef.pixel_of(0.0 - result.plane.centroid.dot(result.plane.basis_u),
                                          0.0 - result.plane.centroid.dot(result.plane.basis_v));
  const int cx = static_cast<int>(center[0]);
  const int cy = static_cast<int>(center[1]);
  ASSERT_GE(cx, 0);
  ASSERT_LT(cx, img.width());
  for (int dy = -5; dy <= 5; ++dy) {
    for (int dx = -5; dx <= 5; ++dx) EXPECT_TRUE(img.holes.at(cx + dx, cy + dy));
  }
  // The ring itself is covered.
  EXPECT_LT(img.holes.count(), img.holes.flags.size() / 2);
}

TEST(RasterConfig, Validation) {
  RasterConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.ssaa = 5;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.r_min = 1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.crop_frac = 0.5;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.splat_radius_px = 0.1;
  EXPECT_THROW(bad.validate(), DomainError);
}

}  // namespace
}  // namespace orthoforge
