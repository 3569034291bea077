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


// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails. Every tolerance is a named constant below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Geometry>

#include "orthoforge/checksum.hpp"
#include "orthoforge/error.hpp"
#include "orthoforge/fixtures.hpp"
#include "orthoforge/ground_plane.hpp"
#include "orthoforge/inpaint.hpp"
#include "orthoforge/ortho_raster.hpp"
#include "orthoforge/pointcloud.hpp"
#include "orthoforge/retrieval.hpp"
#include "orthoforge/rng.hpp"
#include "orthoforge/wavelet.hpp"
#include "retrieval_oracle.hpp"

namespace of = orthoforge;

namespace {

// AC1
constexpr std::uint64_t kCitySeed = 7;
constexpr double kCityDensity = 50.0;
constexpr double kCityNoise = 0.02;
constexpr double kTruthScale = 0.25;
constexpr double kMinRoofWithin16 = 0.95;
constexpr double kMaxHoleFraction = 0.0;
constexpr std::size_t kMaxWallPixels = 0;
constexpr double kMaxSecondsSingle = 15.0;
constexpr double kMaxSecondsEight = 5.0;
constexpr int kEightThreads = 8;
// AC2
constexpr int kPlaneTrials = 20;
constexpr std::size_t kPlanePoints = 200000;
constexpr double kOutlierFraction = 0.30;
constexpr double kNoiseOfDiagonal = 0.01;
constexpr double kMaxAngleDeg = 0.1;
constexpr double kMaxRoundTripOfDiagonal = 1e-9;
// AC3
constexpr double kWeightTol = 1e-12;
// AC4
constexpr int kShifts = 100;
constexpr double kShiftTol = 1e-9;
constexpr double kInverseTol = 1e-6;
constexpr int kTriples = 1000;
constexpr int kDcTrials = 10;
constexpr int kSwtSize = 64;
constexpr int kSwtLevels = 3;
// AC5
constexpr double kMinRoofIou = 0.98;
constexpr double kRoofAlpha = 0.5;
// AC6
constexpr int kRetrievalInstances = 200;
constexpr int kScalings = 20;
// AC7
constexpr double kTotalTol = 1e-12;
constexpr double kGridStep = 1e-3;
// AC8
constexpr double kMinAblationGap = 0.10;
constexpr double kTallFactor = 3.0;
constexpr double kAblationDensity = 20.0;
// AC9
constexpr std::uint64_t kFixturePlyFnv = 0x164bb5f8a7b09375ULL;
constexpr std::uint64_t kFixturePackFnv = 0x5f881fa828194400ULL;
constexpr std::size_t kFixturePlyPoints = 917;
constexpr std::size_t kFixturePackSize = 12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

of::Image random_image(int w, int h, std::uint64_t seed) {
  of::RandomStream rng(seed, 3);
  of::Image img(w, h, 3);
  for (auto& v : img.data()) v = 255.0 * rng.uniform();
  return img;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------

struct CityRun {
  of::BoxCityScene scene;
  of::BoxCity city;
  of::RenderResult render;
};

CityRun& baseline_city() {
  static CityRun run = [] {
    CityRun r;
    r.scene = of::standard_box_city(kCitySeed);
    r.scene.density = kCityDensity;
    r.scene.noise_sigma = kCityNoise;
    r.city = of::generate_box_city(r.scene, kTruthScale);
    return r;
  }();
  return run;
}

of::RenderOptions city_options(int threads) {
  of::RenderOptions opt;
  opt.ransac.seed = kCitySeed;
  opt.raster.threads = threads;
  opt.ransac.threads = threads;
  opt.keep_framebuffer = true;
  return opt;
}

Outcome ac1() {
  auto& run = baseline_city();
  auto t0 = std::chrono::steady_clock::now();
  run.render = of::render_orthophoto(run.city.cloud, city_options(1));
  const auto img = of::inpaint(run.render.image);
  const double single = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto eight = of::render_orthophoto(run.city.cloud, city_options(kEightThreads));
  of::inpaint(eight.image);
  const double parallel = seconds_since(t0);

  const double side = run.scene.ground_width;
  const auto cmp = of::compare_to_truth(img, run.scene,
                                        of::plane_pixel_to_world(img.georef, run.render.plane),
                                        Eigen::Vector4d(0.0, side, 0.0, run.scene.ground_depth));
  const double hole_fraction =
      static_cast<double>(img.holes.count()) / static_cast<double>(img.holes.flags.size());
  const bool ok = cmp.roof_fraction_within_16() >= kMinRoofWithin16 &&
                  hole_fraction <= kMaxHoleFraction && cmp.wall_colored <= kMaxWallPixels &&
                  single < kMaxSecondsSingle && parallel < kMaxSecondsEight;
  return {ok, fmt("points=%zu roof_within16=%.4f (>= %.2f) holes=%.4f wall_pixels=%zu (<= %zu) "
                  "t1=%.2fs (< %.0f) t8=%.2fs (< %.0f, %u cores)",
                  run.city.cloud.size(), cmp.roof_fraction_within_16(), kMinRoofWithin16,
                  hole_fraction, cmp.wall_colored, kMaxWallPixels, single, kMaxSecondsSingle,
                  parallel, kMaxSecondsEight, std::thread::hardware_concurrency())};
}

// ---------------------------------------------------------------------------

Outcome ac2() {
  double worst_angle = 0.0;
  double worst_trip = 0.0;
  for (int trial = 0; trial < kPlaneTrials; ++trial) {
    of::RandomStream rng(1000 + trial, 0);
    std::normal_distribution<double> gauss;
    // A random orientation; the true plane is z = 5 before rotation.
    const Eigen::Quaterniond q =
        Eigen::Quaterniond(gauss(rng), gauss(rng), gauss(rng), gauss(rng)).normalized();
    const Eigen::Matrix3d rot = q.toRotationMatrix();
    // Noise relative to the diagonal of the noise-free rotated cube.
    of::ColoredPointCloud corners;
    for (int c = 0; c < 8; ++c) {
      corners.push_back(rot * of::Vec3(10.0 * (c & 1), 10.0 * ((c >> 1) & 1), 10.0 * ((c >> 2) & 1)),
                        {0, 0, 0});
    }
    const double sigma = kNoiseOfDiagonal * of::bounding_box(corners).diagonal;
    of::ColoredPointCloud cloud;
    const auto n_out = static_cast<std::size_t>(kOutlierFraction * kPlanePoints);
    for (std::size_t i = 0; i < kPlanePoints; ++i) {
      of::Vec3 p(10.0 * rng.uniform(), 10.0 * rng.uniform(), 10.0 * rng.uniform());
      if (i >= n_out) p.z() = 5.0 + sigma * gauss(rng);
      cloud.push_back(rot * p, {0, 0, 0});
    }
    of::RansacOptions opt;
    opt.seed = static_cast<std::uint64_t>(trial);
    const auto plane = of::build_frame(of::fit_plane_ransac(cloud, opt));
    const of::Vec3 truth = rot * of::Vec3::UnitZ();
    const double angle =
        std::acos(std::min(1.0, std::abs(plane.normal.dot(truth)))) * 180.0 / std::numbers::pi;
    worst_angle = std::max(worst_angle, angle);

    const double bbox_diag = of::bounding_box(cloud).diagonal;
    const auto coords = of::to_plane_coords(cloud, plane);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double err = (of::from_plane_coords(coords.coords[i], plane) - cloud.points[i]).norm();
      worst_trip = std::max(worst_trip, err / bbox_diag);
    }
  }
  return {worst_angle < kMaxAngleDeg && worst_trip < kMaxRoundTripOfDiagonal,
          fmt("trials=%d points=%zu max_angle=%.4f deg (< %.1f) max_roundtrip=%.2e diag (< %.0e)",
              kPlaneTrials, kPlanePoints, worst_angle, kMaxAngleDeg, worst_trip, kMaxRoundTripOfDiagonal)};
}

// ---------------------------------------------------------------------------

Outcome ac3() {
  const double delta = 0.0111;
  const double tau = delta / 2.0;
  const double h_max = 0.73;
  const double top = of::roof_weight(h_max, h_max, tau);
  const double bottom = of::roof_weight(h_max - delta, h_max, tau);

  // One-pixel frame buffer holding alpha = 0.5 over the two layer colors.
  of::OrthoFrameBuffer buf;
  buf.width = buf.height = 1;
  buf.w_sat = 1.0;
  buf.m_min = 1;
  buf.roof_weight = {0.5};
  buf.roof_rgb = {100.0, 0.0, 0.0};
  buf.roof_hits = {4};
  buf.h_max = {h_max};
  buf.ground_rgb = {0.0, 120.0, 0.0};
  buf.ground_weight = {1.0};
  buf.ground_hits = {4};
  const auto img = of::composite(buf);
  const double r = img.rgb.at(0, 0, 0);
  const double g = img.rgb.at(1, 0, 0);
  const double b = img.rgb.at(2, 0, 0);
  const auto direct = of::composite_pixel(0.5, {200.0, 0.0, 0.0}, {0.0, 120.0, 0.0});
  const bool ok = std::abs(top - 1.0) <= kWeightTol && std::abs(bottom - std::exp(-2.0)) <= kWeightTol &&
                  r == 100.0 && g == 60.0 && b == 0.0 &&
                  direct == std::array<double, 3>{100.0, 60.0, 0.0};
  return {ok, fmt("w(top)=%.15f w(bottom)-e^-2=%.1e composite=(%g,%g,%g)", top,
                  bottom - std::exp(-2.0), r, g, b)};
}

// ---------------------------------------------------------------------------

of::Image shifted(const of::Image& img, int dx, int dy) {
  of::Image out(img.width(), img.height(), img.channels());
  const int w = img.width();
  const int h = img.height();
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(c, (x + dx) % w, (y + dy) % h) = img.at(c, x, y);
    }
  }
  return out;
}

double max_abs_diff(const of::Image& a, const of::Image& b) {
  double m = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

Outcome ac4() {
  const of::WaveletFamily families[] = {of::WaveletFamily::kHaar, of::WaveletFamily::kDb2};
  double constant_detail = 0.0;
  double inverse_err = 0.0;
  double shift_err = 0.0;
  for (const auto family : families) {
    const of::Image flat(kSwtSize, kSwtSize, 3, 93.25);
    for (const auto& level : of::swt_forward(flat, kSwtLevels, family).levels) {
      for (const auto* band : {&level.horizontal, &level.vertical, &level.diagonal}) {
        for (const double v : band->data()) constant_detail = std::max(constant_detail, std::abs(v));
      }
    }
    const auto img = random_image(kSwtSize, kSwtSize, 11);
    inverse_err = std::max(inverse_err,
                           max_abs_diff(of::swt_inverse(of::swt_forward(img, kSwtLevels, family)), img));
  }
  of::RandomStream rng(4, 4);
  for (int s = 0; s < kShifts; ++s) {
    const auto family = families[s % 2];
    const auto img = random_image(kSwtSize, kSwtSize, 100 + s);
    const int dx = static_cast<int>(rng.below(kSwtSize));
    const int dy = static_cast<int>(rng.below(kSwtSize));
    const auto a = of::swt_forward(shifted(img, dx, dy), kSwtLevels, family);
    const auto b = of::swt_forward(img, kSwtLevels, family);
    for (std::size_t j = 0; j < a.levels.size(); ++j) {
      shift_err = std::max({shift_err,
                            max_abs_diff(a.levels[j].horizontal, shifted(b.levels[j].horizontal, dx, dy)),
                            max_abs_diff(a.levels[j].vertical, shifted(b.levels[j].vertical, dx, dy)),
                            max_abs_diff(a.levels[j].diagonal, shifted(b.levels[j].diagonal, dx, dy))});
    }
  }
  const of::LossWeights weights;
  int triangle_violations = 0;
  for (int t = 0; t < kTriples; ++t) {
    const auto a = random_image(16, 16, 5000 + 3 * t);
    const auto b = random_image(16, 16, 5001 + 3 * t);
    const auto c = random_image(16, 16, 5002 + 3 * t);
    const double ab = of::swt_loss(a, b, weights);
    const double bc = of::swt_loss(b, c, weights);
    const double ac = of::swt_loss(a, c, weights);
    // Relative slack for floating-point summation order only.
    if (ac > (ab + bc) * (1.0 + 1e-12)) ++triangle_violations;
  }
  // 8-bit images with offsets on a 1/256 grid: a + c is exact, so the
  // difference image is exactly constant. Arbitrary real offsets are only
  // reported, since a - fl(a + c) varies by an ulp from pixel to pixel.
  double dc = 0.0;
  double dc_real = 0.0;
  for (int t = 0; t < kDcTrials; ++t) {
    auto a = random_image(32, 32, 9000 + t);
    for (auto& v : a.data()) v = std::floor(v);
    of::Image b = a;
    of::Image b_real = a;
    const double c = std::round((200.0 * rng.uniform() - 100.0) * 256.0) / 256.0;
    const double c_real = 200.0 * rng.uniform() - 100.0;
    for (auto& v : b.data()) v += c;
    for (auto& v : b_real.data()) v += c_real;
    dc = std::max(dc, of::swt_loss(a, b, weights));
    dc_real = std::max(dc_real, of::swt_loss(a, b_real, weights));
  }
  const bool ok = constant_detail == 0.0 && shift_err <= kShiftTol && inverse_err <= kInverseTol &&
                  triangle_violations == 0 && dc == 0.0;
  return {ok, fmt("constant_detail=%g shift_err=%.1e (<= %.0e) inverse_err=%.1e (<= %.0e) "
                  "triangle_violations=%d/%d dc_loss=%g (real offsets: %.1e)",
                  constant_detail, shift_err, kShiftTol, inverse_err, kInverseTol,
                  triangle_violations, kTriples, dc, dc_real)};
}

// ---------------------------------------------------------------------------

struct RoofMask {
  const of::OrthoFrameBuffer* buf = nullptr;
  const of::GroundPlane* plane = nullptr;

  bool at(const of::Vec3& world) const {
    const of::Vec3 d = world - plane->centroid;
    const auto px = buf->georef.pixel_of(d.dot(plane->basis_u), d.dot(plane->basis_v));
    if (px[0] < 0 || px[1] < 0 || px[0] >= buf->width || px[1] >= buf->height) return false;
    return buf->alpha(static_cast<std::size_t>(px[1]) * buf->width + px[0]) >= kRoofAlpha;
  }
};

Outcome ac5() {
  auto& base = baseline_city();
  if (!base.render.framebuffer) base.render = of::render_orthophoto(base.city.cloud, city_options(1));
  const double cx = base.scene.ground_width / 2.0;
  const double cy = base.scene.ground_depth / 2.0;
  const auto rotate = [&](const of::Vec3& p) {  // +90 degrees about the scene center
    return of::Vec3(cx - (p.y() - cy), cy + (p.x() - cx), p.z());
  };
  of::ColoredPointCloud turned = base.city.cloud;
  for (auto& p : turned.points) p = rotate(p);
  const auto spun = of::render_orthophoto(turned, city_options(1));

  const RoofMask a{&*base.render.framebuffer, &base.render.plane};
  const RoofMask b{&*spun.framebuffer, &spun.plane};
  // Sample every baseline supersampled pixel center on the ground plane.
  const auto& fb = *base.render.framebuffer;
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const auto uv = fb.georef.pixel_center(x, y);
      const of::Vec3 world = of::from_plane_coords(of::Vec3(uv.x(), uv.y(), 0.0), base.render.plane);
      const bool in_a = a.at(world);
      const bool in_b = b.at(rotate(world));
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  const double iou = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return {iou >= kMinRoofIou, fmt("roof_iou=%.4f (>= %.2f) union_px=%zu", iou, kMinRoofIou, uni)};
}

// ---------------------------------------------------------------------------

Outcome ac6() {
  int rank_mismatch = 0;
  int metric_mismatch = 0;
  for (int seed = 0; seed < kRetrievalInstances; ++seed) {
    const auto inst = of::oracle::random_instance(static_cast<std::uint64_t>(seed));
    const auto q = of::oracle::to_set(inst.queries);
    const auto r = of::oracle::to_set(inst.references);
    const auto expect = of::oracle::brute_force(q, r);
    const auto ranks = of::rank_all(q, r);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      if (ranks[i].order != expect[i].order) ++rank_mismatch;
    }
    const auto rel = of::relevance(ranks, q, r);
    for (const int k : {1, 5, 10}) {
      const auto want = of::oracle::recall(expect, k);
      if (!want) continue;
      if (of::recall_at_k(rel, k) != *want) ++metric_mismatch;
    }
    if (const auto ap = of::oracle::mean_ap(expect); ap && of::average_precision(rel) != *ap) {
      ++metric_mismatch;
    }
  }

  const auto inst = of::oracle::random_instance(4242, 50, 500, 8, false);
  const auto q = of::oracle::to_set(inst.queries);
  const auto base = of::rank_all(q, of::oracle::to_set(inst.references));
  int scale_mismatch = 0;
  of::RandomStream rng(4242, 1);
  for (int t = 0; t < kScalings; ++t) {
    auto scaled = inst.references;
    for (auto& latent : scaled) {
      const auto alpha = static_cast<float>(std::exp(8.0 * rng.uniform() - 4.0));
      for (auto& v : latent.values) v *= alpha;
    }
    const auto ranks = of::rank_all(q, of::oracle::to_set(scaled));
    for (std::size_t i = 0; i < ranks.size(); ++i) scale_mismatch += ranks[i].order != base[i].order;
  }

  of::DescriptorSet sq;
  of::DescriptorSet sr;
  for (int c = 0; c < 8; ++c) {
    of::LatentTensor t;
    t.class_label = "c" + std::to_string(c);
    t.shape = {8};
    t.values.assign(8, 0.0f);
    t.values[static_cast<std::size_t>(c)] = 1.0f;
    t.id = "q" + std::to_string(c);
    sq.add(of::readout(t));
    for (int k = 0; k < 3; ++k) {
      t.values[static_cast<std::size_t>((c + 1) % 8)] = 0.05f * static_cast<float>(k);
      t.id = "r" + std::to_string(c) + "_" + std::to_string(k);
      sr.add(of::readout(t));
    }
  }
  const int ks[] = {1};
  const auto sep = of::evaluate_retrieval(sq, sr, ks, "drone->satellite");
  const bool ok = rank_mismatch == 0 && metric_mismatch == 0 && scale_mismatch == 0 &&
                  sep.recall_at.at(1) == 100.0 && sep.ap_mean == 100.0;
  return {ok, fmt("instances=%d rank_mismatch=%d metric_mismatch=%d scale_mismatch=%d "
                  "separable R@1=%g AP=%g",
                  kRetrievalInstances, rank_mismatch, metric_mismatch, scale_mismatch,
                  sep.recall_at.at(1), sep.ap_mean)};
}

// ---------------------------------------------------------------------------

Outcome ac7() {
  const double losses[] = {2.0};
  const double logvars[] = {std::log(2.0)};
  const double v = of::uncertainty_total(losses, logvars);
  double worst_offset = 0.0;
  for (const double loss : {0.05, 0.5, 2.0, 7.5, 40.0}) {
    const double target = std::log(loss);
    double best_s = 0.0;
    double best = INFINITY;
    for (int i = -10000; i <= 10000; ++i) {
      const double s[] = {i * kGridStep};
      const double l[] = {loss};
      const double total = of::uncertainty_total(l, s);
      if (total < best) {
        best = total;
        best_s = s[0];
      }
    }
    worst_offset = std::max(worst_offset, std::abs(best_s - target));
  }
  const bool ok = std::abs(v - (1.0 + std::log(2.0))) <= kTotalTol && worst_offset <= kGridStep;
  return {ok, fmt("total-(1+ln2)=%.1e argmin_offset=%.1e (<= %.0e)", v - (1.0 + std::log(2.0)),
                  worst_offset, kGridStep)};
}

// ---------------------------------------------------------------------------

Outcome ac8() {
  auto scene = of::standard_box_city(kCitySeed + 1);
  scene.density = kAblationDensity;
  for (auto& box : scene.boxes) box.height *= kTallFactor;
  const auto city = of::generate_box_city(scene, kTruthScale);

  // Oblique photo of the same scene.
  of::PinholeCamera cam;
  cam.position = of::Vec3(92.0, -70.0, 150.0);
  cam.look_at = of::Vec3(92.0, 92.0, 0.0);
  cam.focal_px = 1100.0;
  cam.width = 1600;
  cam.height = 1200;
  const of::Image photo = of::render_view(scene, cam);

  const double lo = 20.0;
  const double hi = scene.ground_width - 20.0;
  const Eigen::Vector2d quad[4] = {{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}};
  std::array<of::Correspondence, 4> corr;
  for (int i = 0; i < 4; ++i) {
    const auto px = cam.project(of::Vec3(quad[i].x(), quad[i].y(), 0.0));
    if (!px || px->x() < 0 || px->y() < 0 || px->x() > cam.width - 1 || px->y() > cam.height - 1) {
      return {false, "ground quad leaves the photo"};
    }
    corr[static_cast<std::size_t>(i)] = {px->x(), px->y(), quad[i].x(), quad[i].y()};
  }
  of::WarpOptions warp;
  warp.pixel_scale = kTruthScale * 2.0;
  const auto fallback = of::perspective_fallback(photo, corr, warp);

  of::RenderOptions opt;
  opt.ransac.seed = kCitySeed;
  const auto render = of::render_orthophoto(city.cloud, opt);
  const auto full = of::inpaint(render.image);

  const Eigen::Vector4d window(lo, hi, lo, hi);
  const auto f = of::compare_to_truth(full, scene, of::plane_pixel_to_world(full.georef, render.plane),
                                      window);
  const auto p = of::compare_to_truth(fallback, scene, of::world_pixel_to_world(fallback.georef), window);
  const double gap = f.fraction_within_16() - p.fraction_within_16();
  return {gap >= kMinAblationGap,
          fmt("full=%.4f perspective_only=%.4f gap=%.4f (>= %.2f)", f.fraction_within_16(),
              p.fraction_within_16(), gap, kMinAblationGap)};
}

// ---------------------------------------------------------------------------

Outcome ac9(const std::filesystem::path& data, const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  std::vector<std::string> problems;
  const auto ply = data / "fixture.ply";
  const auto pack = data / "fixture.pack";
  if (of::fnv1a64_file(ply) != kFixturePlyFnv) problems.push_back("ply checksum");
  if (of::fnv1a64_file(pack) != kFixturePackFnv) problems.push_back("pack checksum");

  const auto cloud = of::load_ply(ply).cloud;
  if (cloud.size() != kFixturePlyPoints) problems.push_back("ply size");
  of::save_ply(cloud, scratch / "fixture.ply");
  if (read_bytes(scratch / "fixture.ply") != read_bytes(ply)) problems.push_back("ply round trip");

  const auto set = of::load_descriptor_pack(pack);
  if (set.size() != kFixturePackSize) problems.push_back("pack size");
  of::save_descriptor_pack(set, scratch / "fixture.pack");
  if (read_bytes(scratch / "fixture.pack") != read_bytes(pack)) problems.push_back("pack round trip");

  // Fresh random data must also survive save -> load -> save unchanged.
  of::ColoredPointCloud rnd;
  of::RandomStream rng(9, 9);
  for (int i = 0; i < 5000; ++i) {
    rnd.push_back(of::Vec3(static_cast<float>(rng.uniform() * 100.0),
                           static_cast<float>(rng.uniform() * 100.0),
                           static_cast<float>(rng.uniform() * 30.0)),
                  {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                   static_cast<std::uint8_t>(rng.below(256))});
  }
  of::save_ply(rnd, scratch / "a.ply");
  of::save_ply(of::load_ply(scratch / "a.ply").cloud, scratch / "b.ply");
  if (read_bytes(scratch / "a.ply") != read_bytes(scratch / "b.ply")) problems.push_back("random ply");
  const auto inst = of::oracle::random_instance(99);
  of::save_latent_pack(inst.references, scratch / "a.pack", {{"timestep", "250"}});
  of::save_descriptor_pack(of::load_descriptor_pack(scratch / "a.pack"), scratch / "b.pack");
  of::save_descriptor_pack(of::load_descriptor_pack(scratch / "b.pack"), scratch / "c.pack");
  if (read_bytes(scratch / "b.pack") != read_bytes(scratch / "c.pack")) problems.push_back("random pack");

  std::string detail = fmt("ply=%s pack=%s", of::hex64(of::fnv1a64_file(ply)).c_str(),
                           of::hex64(of::fnv1a64_file(pack)).c_str());
  for (const auto& p : problems) detail += " mismatch:" + p;
  return {problems.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path data = argc > 1 ? argv[1] : ORTHOFORGE_TEST_DATA;
  const std::filesystem::path scratch =
      std::filesystem::temp_directory_path() / "orthoforge_acceptance";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"box-city end-to-end render", ac1},
      {"plane recovery", ac2},
      {"roof weight and composite oracles", ac3},
      {"stationary wavelet suite", ac4},
      {"rotation equivariance", ac5},
      {"retrieval oracle equality", ac6},
      {"uncertainty weighting oracle", ac7},
      {"full pipeline beats perspective-only", ac8},
      {"format stability", [&] { return ac9(data, scratch); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("AC%zu %s %s: %s [%.1fs]\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first,
                out.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::filesystem::remove_all(scratch);
  return failures == 0 ? 0 : 1;
}
