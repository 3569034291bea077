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

#include "orthoforge/ortho_raster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "orthoforge/error.hpp"
#include "orthoforge/parallel.hpp"
#include "orthoforge/simd/kernels.hpp"

namespace orthoforge {

void RasterConfig::validate() const {
  const auto fail = [](const std::string& what) { throw DomainError("raster config: " + what); };
  if (!(rho > 0.0)) fail("rho must be positive");
  if (!(r_min > 0.0) || !(r_min <= r_max)) fail("need 0 < r_min <= r_max");
  if (p_max < 1) fail("p_max must be at least 1");
  if (ssaa < 1 || ssaa > 4) fail("ssaa must be in {1, 2, 3, 4}");
  if (!(roof_band_frac > 0.0)) fail("roof_band_frac must be positive");
  if (!(ground_band >= 0.0)) fail("ground_band must be nonnegative");
  if (m_min < 1) fail("m_min must be at least 1");
  if (!(splat_radius_px >= 0.75)) fail("splat_radius_px must be at least 0.75");
  if (!(crop_frac >= 0.0 && crop_frac < 0.5)) fail("crop_frac must be in [0, 0.5)");
  if (!(w_sat > 0.0)) fail("w_sat must be positive");
  if (threads < 1) fail("threads must be at least 1");
}

double percentile(std::vector<double>& values, double q) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

HeightNormalization normalize_heights(const PlanePointSet& pts, const RasterConfig& cfg,
                                      double min_scale) {
  if (pts.size() == 0) throw DomainError("height normalization of an empty point set");
  std::vector<double> positive;
  positive.reserve(pts.size() / 2);
  for (const auto& c : pts.coords) {
    if (c.z() > 0.0) positive.push_back(c.z());
  }
  HeightNormalization hn;
  const double p98 = positive.empty() ? 0.0 : percentile(positive, 0.98);
  hn.scale = std::max(p98, min_scale);
  if (!(hn.scale > 0.0)) hn.scale = 1.0;
  std::vector<double> normalized(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) normalized[i] = pts.coords[i].z() / hn.scale;
  hn.p05 = percentile(normalized, 0.05);
  hn.p95 = percentile(normalized, 0.95);
  hn.delta = std::max(cfg.roof_band_frac * (hn.p95 - hn.p05), 1e-9);
  hn.tau = hn.delta / 2.0;
  return hn;
}

std::array<long, 2> Georef::pixel_of(double u, double v) const noexcept {
  const auto col = static_cast<long>(std::floor((u - u_min) / pixel_scale)) - crop_x;
  const auto row_up = static_cast<long>(std::floor((v - v_min) / pixel_scale));
  return {col, static_cast<long>(full_height) - 1 - row_up - crop_y};
}

ScaleSolution solve_pixel_scale(double area, std::size_t count, double extent_u,
                                double extent_v, const RasterConfig& cfg) {
  if (!(area > 0.0) || count == 0) throw DomainError("ground area and count must be positive");
  const double target_pixels = static_cast<double>(count) / cfg.rho;
  ScaleSolution s{};
  s.unclamped_scale = std::sqrt(area / target_pixels);
  s.pixel_scale = std::clamp(s.unclamped_scale, cfg.r_min, cfg.r_max);
  const auto dims = [&](double r, long long& w, long long& h) {
    w = static_cast<long long>(std::floor(extent_u / r)) + 1;
    h = static_cast<long long>(std::floor(extent_v / r)) + 1;
  };
  long long w = 0;
  long long h = 0;
  dims(s.pixel_scale, w, h);
  const auto p_max = static_cast<long double>(cfg.p_max);
  if (static_cast<long double>(w) * h > p_max) {
    s.rescaled = true;
    s.pixel_scale *= std::sqrt(static_cast<double>(static_cast<long double>(w) * h / p_max));
    dims(s.pixel_scale, w, h);
    // The +1 per axis can leave a sliver above the budget.
    while (static_cast<long double>(w) * h > p_max) {
      s.pixel_scale *= 1.0 + 1e-4;
      dims(s.pixel_scale, w, h);
    }
  }
  if (w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max()) {
    throw DomainError("raster dimensions overflow");
  }
  s.width = static_cast<int>(w);
  s.height = static_cast<int>(h);
  return s;
}

ResolutionChoice choose_resolution(const PlanePointSet& pts, const RasterConfig& cfg,
                                   const HeightNormalization& heights) {
  if (pts.size() == 0) throw DomainError("cannot choose a resolution for an empty point set");
  double umin = std::numeric_limits<double>::infinity();
  double vmin = umin;
  double umax = -umin;
  double vmax = -umin;
  double gumin = umin, gvmin = umin, gumax = -umin, gvmax = -umin;
  std::size_t ground = 0;
  for (const auto& c : pts.coords) {
    umin = std::min(umin, c.x());
    umax = std::max(umax, c.x());
    vmin = std::min(vmin, c.y());
    vmax = std::max(vmax, c.y());
    if (std::fabs(heights.normalize(c.z())) <= cfg.ground_band) {
      gumin = std::min(gumin, c.x());
      gumax = std::max(gumax, c.x());
      gvmin = std::min(gvmin, c.y());
      gvmax = std::max(gvmax, c.y());
      ++ground;
    }
  }
  ResolutionChoice choice;
  choice.u_min = umin;
  choice.v_min = vmin;
  choice.ground_count = ground;
  choice.ground_area = ground > 0 ? (gumax - gumin) * (gvmax - gvmin) : 0.0;
  if (!(choice.ground_area > 0.0)) {
    choice.used_full_extent = true;
    choice.ground_area = (umax - umin) * (vmax - vmin);
    choice.ground_count = pts.size();
    if (!(choice.ground_area > 0.0)) {
      throw DomainError("point set has zero in-plane extent");
    }
  }
  const auto s = solve_pixel_scale(choice.ground_area, choice.ground_count, umax - umin,
                                   vmax - vmin, cfg);
  choice.pixel_scale = s.pixel_scale;
  choice.unclamped_scale = s.unclamped_scale;
  choice.width = s.width;
  choice.height = s.height;
  choice.rescaled_for_p_max = s.rescaled;
  return choice;
}

std::array<double, 3> composite_pixel(double alpha, const std::array<double, 3>& roof,
                                      const std::array<double, 3>& ground) noexcept {
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) out[c] = alpha * roof[c] + (1.0 - alpha) * ground[c];
  return out;
}

std::optional<std::array<double, 3>> OrthoFrameBuffer::roof_color(std::size_t i) const {
  if (roof_hits[i] < static_cast<std::uint32_t>(m_min) || !(roof_weight[i] > 0.0)) {
    return std::nullopt;
  }
  return std::array<double, 3>{roof_rgb[3 * i] / roof_weight[i],
                               roof_rgb[3 * i + 1] / roof_weight[i],
                               roof_rgb[3 * i + 2] / roof_weight[i]};
}

std::optional<std::array<double, 3>> OrthoFrameBuffer::ground_color(std::size_t i) const {
  if (ground_hits[i] == 0 || !(ground_weight[i] > 0.0)) return std::nullopt;
  return std::array<double, 3>{ground_rgb[3 * i] / ground_weight[i],
                               ground_rgb[3 * i + 1] / ground_weight[i],
                               ground_rgb[3 * i + 2] / ground_weight[i]};
}

double OrthoFrameBuffer::alpha(std::size_t i) const noexcept {
  if (roof_hits[i] < static_cast<std::uint32_t>(m_min)) return 0.0;
  return std::min(1.0, roof_weight[i] / w_sat);
}

bool OrthoFrameBuffer::hole(std::size_t i) const noexcept {
  return roof_hits[i] < static_cast<std::uint32_t>(m_min) && ground_hits[i] == 0;
}

namespace {

struct SplatPoint {
  double fx;  // continuous column coordinate
  double fy;  // continuous row coordinate counted upwards from the bottom
  double h;   // normalized height
};

constexpr int kBandRows = 32;

}  // namespace

OrthoFrameBuffer rasterize_layers(const PlanePointSet& pts, const RasterConfig& cfg,
                                  const HeightNormalization& heights,
                                  const ResolutionChoice& resolution) {
  cfg.validate();
  const int ss = cfg.ssaa;
  OrthoFrameBuffer buf;
  buf.width = resolution.width * ss;
  buf.height = resolution.height * ss;
  buf.w_sat = cfg.w_sat;
  buf.m_min = cfg.m_min;
  const double r_ss = resolution.pixel_scale / ss;
  buf.georef = Georef{resolution.u_min, resolution.v_min, r_ss, buf.width, buf.height, 0, 0};
  const std::size_t npix = buf.size();
  buf.roof_rgb.assign(3 * npix, 0.0);
  buf.roof_weight.assign(npix, 0.0);
  buf.roof_hits.assign(npix, 0);
  buf.h_max.assign(npix, -std::numeric_limits<double>::infinity());
  buf.ground_rgb.assign(3 * npix, 0.0);
  buf.ground_weight.assign(npix, 0.0);
  buf.ground_hits.assign(npix, 0);

  const double radius = cfg.splat_radius_px;
  const double radius2 = radius * radius;
  const double sigma = radius / 2.0;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  const double band_b = cfg.ground_band;
  const double delta = heights.delta;
  const double tau = heights.tau;
  const int W = buf.width;
  const int H = buf.height;

  std::vector<SplatPoint> splats(pts.size());
  const int bands = (H + kBandRows - 1) / kBandRows;
  std::vector<std::vector<std::uint32_t>> band_members(static_cast<std::size_t>(bands));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& c = pts.coords[i];
    SplatPoint s{(c.x() - resolution.u_min) / r_ss, (c.y() - resolution.v_min) / r_ss,
                 heights.normalize(c.z())};
    splats[i] = s;
    const long j_lo = static_cast<long>(std::ceil(s.fy - 0.5 - radius));
    const long j_hi = static_cast<long>(std::floor(s.fy - 0.5 + radius));
    const long y_lo = std::max<long>(0, H - 1 - j_hi);
    const long y_hi = std::min<long>(H - 1, H - 1 - j_lo);
    if (y_lo > y_hi) continue;
    for (long b = y_lo / kBandRows; b <= y_hi / kBandRows; ++b) {
      band_members[static_cast<std::size_t>(b)].push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Visits every pixel of `s`'s footprint inside rows [row_begin, row_end).
  const auto for_footprint = [&](const SplatPoint& s, int row_begin, int row_end, auto&& visit) {
    const long x_lo = std::max<long>(0, static_cast<long>(std::ceil(s.fx - 0.5 - radius)));
    const long x_hi = std::min<long>(W - 1, static_cast<long>(std::floor(s.fx - 0.5 + radius)));
    const long j_lo = static_cast<long>(std::ceil(s.fy - 0.5 - radius));
    const long j_hi = static_cast<long>(std::floor(s.fy - 0.5 + radius));
    const long y_lo = std::max<long>(row_begin, H - 1 - j_hi);
    const long y_hi = std::min<long>(row_end - 1, H - 1 - j_lo);
    for (long y = y_lo; y <= y_hi; ++y) {
      const double dy = static_cast<double>(H - 1 - y) + 0.5 - s.fy;
      for (long x = x_lo; x <= x_hi; ++x) {
        const double dx = static_cast<double>(x) + 0.5 - s.fx;
        const double d2 = dx * dx + dy * dy;
        if (d2 > radius2) continue;
        visit(static_cast<std::size_t>(y) * W + static_cast<std::size_t>(x), d2);
      }
    }
  };

  parallel_for(static_cast<std::size_t>(bands), cfg.threads, [&](std::size_t band) {
    const int row_begin = static_cast<int>(band) * kBandRows;
    const int row_end = std::min(H, row_begin + kBandRows);
    const auto& members = band_members[band];
    for (const auto idx : members) {
      const SplatPoint& s = splats[idx];
      for_footprint(s, row_begin, row_end, [&](std::size_t p, double) {
        buf.h_max[p] = std::max(buf.h_max[p], s.h);
      });
    }
    for (const auto idx : members) {
      const SplatPoint& s = splats[idx];
      const Rgb8 col = pts.colors[idx];
      const double rgb[3] = {static_cast<double>(col.r), static_cast<double>(col.g),
                             static_cast<double>(col.b)};
      if (s.h > band_b) {
        for_footprint(s, row_begin, row_end, [&](std::size_t p, double d2) {
          if (s.h < buf.h_max[p] - delta) return;
          const double kw = std::exp(-d2 * inv_two_sigma2) * roof_weight(s.h, buf.h_max[p], tau);
          buf.roof_rgb[3 * p] += kw * rgb[0];
          buf.roof_rgb[3 * p + 1] += kw * rgb[1];
          buf.roof_rgb[3 * p + 2] += kw * rgb[2];
          buf.roof_weight[p] += kw;
          ++buf.roof_hits[p];
        });
      } else if (s.h >= -band_b) {
        for_footprint(s, row_begin, row_end, [&](std::size_t p, double d2) {
          const double k = std::exp(-d2 * inv_two_sigma2);
          buf.ground_rgb[3 * p] += k * rgb[0];
          buf.ground_rgb[3 * p + 1] += k * rgb[1];
          buf.ground_rgb[3 * p + 2] += k * rgb[2];
          buf.ground_weight[p] += k;
          ++buf.ground_hits[p];
        });
      }
    }
  });

  for (std::size_t p = 0; p < npix; ++p) {
    if (buf.roof_hits[p] < static_cast<std::uint32_t>(cfg.m_min)) {
      buf.roof_weight[p] = 0.0;
      buf.roof_rgb[3 * p] = buf.roof_rgb[3 * p + 1] = buf.roof_rgb[3 * p + 2] = 0.0;
    }
  }
  return buf;
}

OrthoImage composite(const OrthoFrameBuffer& buf) {
  OrthoImage out;
  out.rgb = Image(buf.width, buf.height, 3);
  out.holes = Mask(buf.width, buf.height);
  out.georef = buf.georef;
  for (int y = 0; y < buf.height; ++y) {
    for (int x = 0; x < buf.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * buf.width + x;
      const auto roof = buf.roof_color(i);
      const auto ground = buf.ground_color(i);
      std::array<double, 3> c{};
      if (roof && ground) {
        c = composite_pixel(buf.alpha(i), *roof, *ground);
      } else if (roof) {
        c = *roof;
      } else if (ground) {
        c = *ground;
      } else {
        out.holes.set(x, y, true);
      }
      for (int ch = 0; ch < 3; ++ch) out.rgb.at(ch, x, y) = c[ch];
    }
  }
  return out;
}

namespace {

double lanczos3(double x) {
  if (x == 0.0) return 1.0;
  const double ax = std::fabs(x);
  if (ax >= 3.0) return 0.0;
  const double px = std::numbers::pi * x;
  return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

struct TapSet {
  std::vector<int> index;
  std::vector<double> weight;
};

/// Normalized Lanczos-3 taps for reducing `in_size` samples by `factor`.
std::vector<TapSet> lanczos_taps(int in_size, int out_size, int factor) {
  std::vector<TapSet> taps(static_cast<std::size_t>(out_size));
  const double support = 3.0 * factor;
  for (int j = 0; j < out_size; ++j) {
    const double center = (j + 0.5) * factor - 0.5;
    const int lo = std::max(0, static_cast<int>(std::ceil(center - support)));
    const int hi = std::min(in_size - 1, static_cast<int>(std::floor(center + support)));
    auto& t = taps[static_cast<std::size_t>(j)];
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double w = lanczos3((i - center) / factor);
      if (w == 0.0) continue;
      t.index.push_back(i);
      t.weight.push_back(w);
      sum += w;
    }
    for (auto& w : t.weight) w /= sum;
  }
  return taps;
}

/// Filters along y: each output row is a weighted sum of input rows.
Image resample_rows(const Image& in, const std::vector<TapSet>& taps) {
  const auto out_h = static_cast<int>(taps.size());
  Image out(in.width(), out_h, in.channels());
  const auto& k = simd::active();
  std::vector<const double*> rows;
  for (int c = 0; c < in.channels(); ++c) {
    for (int j = 0; j < out_h; ++j) {
      const auto& t = taps[static_cast<std::size_t>(j)];
      rows.clear();
      for (const int i : t.index) rows.push_back(in.row(c, i).data());
      k.weighted_row_sum(rows.data(), t.weight.data(), rows.size(), out.row(c, j).data(),
                         static_cast<std::size_t>(in.width()));
    }
  }
  return out;
}

}  // namespace

OrthoImage downsample_lanczos(const OrthoImage& img, int ssaa) {
  if (ssaa < 1) throw DomainError("downsample factor must be at least 1");
  if (ssaa == 1) return img;
  const int W = img.width();
  const int H = img.height();
  const int out_w = W / ssaa;
  const int out_h = H / ssaa;
  if (out_w < 1 || out_h < 1) throw DomainError("image too small to downsample");

  // Numerator planes carry color * validity; plane 3 carries validity.
  Image work(W, H, 4);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double valid = img.holes.at(x, y) ? 0.0 : 1.0;
      for (int c = 0; c < 3; ++c) work.at(c, x, y) = img.rgb.at(c, x, y) * valid;
      work.at(3, x, y) = valid;
    }
  }
  const Image vertical = resample_rows(work, lanczos_taps(H, out_h, ssaa));
  const Image reduced =
      transpose(resample_rows(transpose(vertical), lanczos_taps(W, out_w, ssaa)));

  OrthoImage out;
  out.rgb = Image(out_w, out_h, 3);
  out.holes = Mask(out_w, out_h);
  out.georef = img.georef;
  out.georef.pixel_scale = img.georef.pixel_scale * ssaa;
  out.georef.full_width = img.georef.full_width / ssaa;
  out.georef.full_height = img.georef.full_height / ssaa;
  out.georef.crop_x = img.georef.crop_x / ssaa;
  out.georef.crop_y = img.georef.crop_y / ssaa;
  const int block = ssaa * ssaa;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      int holes = 0;
      for (int dy = 0; dy < ssaa; ++dy) {
        for (int dx = 0; dx < ssaa; ++dx) holes += img.holes.at(x * ssaa + dx, y * ssaa + dy);
      }
      if (2 * holes > block) {
        out.holes.set(x, y, true);
        continue;
      }
      const double mass = reduced.at(3, x, y);
      for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        if (mass >= 0.5) {
          v = reduced.at(c, x, y) / mass;
        } else {
          // Kernel mostly over holes: plain mean of the valid block samples.
          double sum = 0.0;
          for (int dy = 0; dy < ssaa; ++dy) {
            for (int dx = 0; dx < ssaa; ++dx) {
              const int sx = x * ssaa + dx;
              const int sy = y * ssaa + dy;
              if (!img.holes.at(sx, sy)) sum += img.rgb.at(c, sx, sy);
            }
          }
          v = sum / (block - holes);
        }
        out.rgb.at(c, x, y) = std::clamp(v, 0.0, 255.0);
      }
    }
  }
  return out;
}

OrthoImage center_crop(const OrthoImage& img, double crop_frac) {
  if (!(crop_frac >= 0.0 && crop_frac < 0.5)) throw DomainError("crop fraction must be in [0, 0.5)");
  const int cx = static_cast<int>(std::floor(crop_frac * img.width()));
  const int cy = static_cast<int>(std::floor(crop_frac * img.height()));
  const int w = img.width() - 2 * cx;
  const int h = img.height() - 2 * cy;
  if (w < 1 || h < 1) throw DomainError("center crop leaves an empty image");
  OrthoImage out;
  out.rgb = Image(w, h, img.rgb.channels());
  out.holes = Mask(w, h);
  out.georef = img.georef;
  out.georef.crop_x += cx;
  out.georef.crop_y += cy;
  for (int c = 0; c < img.rgb.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.rgb.at(c, x, y) = img.rgb.at(c, x + cx, y + cy);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.holes.set(x, y, img.holes.at(x + cx, y + cy));
  }
  return out;
}

RenderResult render_orthophoto(const ColoredPointCloud& cloud, const RenderOptions& options) {
  using Clock = std::chrono::steady_clock;
  const RasterConfig& cfg = options.raster;
  cfg.validate();
  cloud.validate();
  RenderResult result;
  auto mark = Clock::now();
  const auto lap = [&](const char* stage) {
    const auto now = Clock::now();
    result.timings_ms.emplace_back(
        stage, std::chrono::duration<double, std::milli>(now - mark).count());
    mark = now;
  };

  RansacOptions ransac = options.ransac;
  ransac.threads = std::max(ransac.threads, cfg.threads);
  GroundPlane plane = build_frame(fit_plane_ransac(cloud, ransac));
  lap("plane_fit");
  auto [pts, oriented] = fix_orientation(to_plane_coords(cloud, plane), plane);
  result.plane = oriented;
  lap("plane_coords");

  const double min_scale = cfg.ground_band > 0.0 ? oriented.threshold / cfg.ground_band : 0.0;
  result.heights = normalize_heights(pts, cfg, min_scale);
  result.resolution = choose_resolution(pts, cfg, result.heights);
  if (result.resolution.used_full_extent) {
    result.warnings.emplace_back("ground band has zero area; using the full cloud extent");
  }
  if (result.resolution.rescaled_for_p_max) {
    result.warnings.emplace_back("pixel scale enlarged to respect p_max");
  }
  lap("resolution");

  OrthoFrameBuffer buf = rasterize_layers(pts, cfg, result.heights, result.resolution);
  lap("rasterize");
  const OrthoImage supersampled = composite(buf);
  lap("composite");
  result.uncropped = downsample_lanczos(supersampled, cfg.ssaa);
  lap("downsample");
  result.image = center_crop(result.uncropped, cfg.crop_frac);
  lap("crop");
  if (options.keep_framebuffer) result.framebuffer = std::move(buf);
  return result;
}

}  // namespace orthoforge
