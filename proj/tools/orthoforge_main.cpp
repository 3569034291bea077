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


// orthoforge: command-line front end.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "orthoforge/canny.hpp"
#include "orthoforge/checksum.hpp"
#include "orthoforge/error.hpp"
#include "orthoforge/fixtures.hpp"
#include "orthoforge/ground_plane.hpp"
#include "orthoforge/inpaint.hpp"
#include "orthoforge/ortho_raster.hpp"
#include "orthoforge/pipeline.hpp"
#include "orthoforge/pointcloud.hpp"
#include "orthoforge/retrieval.hpp"
#include "orthoforge/simd/kernels.hpp"
#include "orthoforge/wavelet.hpp"

namespace of = orthoforge;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt3(const of::Vec3& v) { return fmt(v.x()) + "," + fmt(v.y()) + "," + fmt(v.z()); }

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& item : split_commas(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw of::UsageError(std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

of::OrthoImage load_ortho(const std::string& image, const std::string& holes) {
  of::OrthoImage img;
  img.rgb = of::read_png_rgb(image);
  img.holes = holes.empty() ? of::Mask(img.rgb.width(), img.rgb.height())
                            : of::read_png_mask(holes);
  if (img.holes.width != img.width() || img.holes.height != img.height()) {
    throw of::DomainError("hole mask '" + holes + "' does not match image '" + image + "'");
  }
  img.georef = of::Georef{0.0, 0.0, 1.0, img.width(), img.height(), 0, 0};
  return img;
}

struct RenderFlags {
  std::string cloud;
  std::string output;
  std::string config;
  std::string replay;
  double rho = 0, rmin = 0, rmax = 0, roof_band = 0, ground_band = 0, splat = 0, crop = 0;
  std::size_t pmax = 0;
  int ssaa = 0, mmin = 0, inpaint_radius = 0;
  std::uint64_t seed = 0;
  std::string harmonize_ref;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OrthoForge: point-cloud orthophotos, wavelet losses and retrieval evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for parallel stages")
      ->check(CLI::Range(1, 256));
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // cloud info
  auto* cloud = app.add_subcommand("cloud", "Point-cloud utilities");
  cloud->require_subcommand(1);
  auto* cloud_info = cloud->add_subcommand("info", "Print vertex count and bounds");
  std::string info_path;
  cloud_info->add_option("cloud", info_path, "PLY file")->required();

  // plane fit
  auto* plane = app.add_subcommand("plane", "Ground-plane estimation");
  plane->require_subcommand(1);
  auto* plane_fit = plane->add_subcommand("fit", "RANSAC plane fit");
  std::string plane_path;
  double plane_threshold = 0.0;
  int plane_iters = 1024;
  std::uint64_t plane_seed = 0;
  plane_fit->add_option("cloud", plane_path, "PLY file")->required();
  plane_fit->add_option("--threshold", plane_threshold,
                        "Inlier distance (default 1% of the bounding-box diagonal)");
  plane_fit->add_option("--iters", plane_iters, "RANSAC iterations")->check(CLI::PositiveNumber);
  plane_fit->add_option("--seed", plane_seed, "Random seed");

  // render
  auto* render = app.add_subcommand("render", "Render an orthophoto from a colored point cloud");
  RenderFlags rf;
  render->add_option("cloud", rf.cloud, "PLY file (omit with --replay)");
  render->add_option("-o,--output", rf.output, "Output PNG")->required();
  render->add_option("--config", rf.config, "key=value configuration file");
  render->add_option("--replay", rf.replay, "Reuse the cloud and configuration of a run manifest");
  auto* o_rho = render->add_option("--rho", rf.rho, "Target points per pixel");
  auto* o_rmin = render->add_option("--rmin", rf.rmin, "Minimum pixel scale");
  auto* o_rmax = render->add_option("--rmax", rf.rmax, "Maximum pixel scale");
  auto* o_pmax = render->add_option("--pmax", rf.pmax, "Maximum base pixel count");
  auto* o_ssaa = render->add_option("--ssaa", rf.ssaa, "Supersampling factor (1-4)");
  auto* o_roof = render->add_option("--roof-band", rf.roof_band, "Roof band fraction");
  auto* o_ground = render->add_option("--ground-band", rf.ground_band, "Ground band b");
  auto* o_mmin = render->add_option("--mmin", rf.mmin, "Minimum roof hit count");
  auto* o_splat = render->add_option("--splat-radius", rf.splat, "Splat radius in pixels");
  auto* o_crop = render->add_option("--crop", rf.crop, "Crop fraction per side");
  auto* o_seed = render->add_option("--seed", rf.seed, "RANSAC seed");
  auto* o_radius = render->add_option("--inpaint-radius", rf.inpaint_radius, "Inpainting radius");
  auto* o_href = render->add_option("--harmonize-ref", rf.harmonize_ref, "Reference PNG");

  // warp
  auto* warp = app.add_subcommand("warp", "Perspective fallback from four correspondences");
  std::string warp_in, warp_corr, warp_out;
  double warp_scale = 0.0;
  warp->add_option("image", warp_in, "Source photo")->required();
  warp->add_option("--corr", warp_corr, "CSV rows sx,sy,tu,tv")->required();
  warp->add_option("-o,--output", warp_out, "Output PNG")->required();
  warp->add_option("--scale", warp_scale, "Output units per pixel (default from the quad areas)");

  // inpaint
  auto* inp = app.add_subcommand("inpaint", "Fill hole pixels");
  std::string inp_in, inp_mask, inp_out, inp_ref;
  int inp_radius = of::kDefaultInpaintRadius;
  int inp_dilate = of::kDefaultMaskDilation;
  inp->add_option("image", inp_in, "Input PNG")->required();
  inp->add_option("--mask", inp_mask, "Hole mask PNG (255 = hole)")->required();
  inp->add_option("--radius", inp_radius, "Neighborhood radius")->check(CLI::PositiveNumber);
  inp->add_option("--dilate", inp_dilate, "Mask dilation in pixels")->check(CLI::NonNegativeNumber);
  inp->add_option("--harmonize-ref", inp_ref, "Match color statistics to this PNG");
  inp->add_option("-o,--output", inp_out, "Output PNG")->required();

  // edges
  auto* edges = app.add_subcommand("edges", "Canny edge map");
  std::string edges_in, edges_out;
  of::CannyOptions canny;
  edges->add_option("image", edges_in, "Input PNG")->required();
  edges->add_option("-o,--output", edges_out, "Output PNG")->required();
  edges->add_option("--sigma", canny.sigma, "Gaussian sigma");
  edges->add_option("--low", canny.low_frac, "Low threshold fraction");
  edges->add_option("--high", canny.high_frac, "High threshold fraction");

  // loss
  auto* loss = app.add_subcommand("loss", "Image losses");
  loss->require_subcommand(1);
  auto* loss_swt = loss->add_subcommand("swt", "Stationary-wavelet detail loss");
  std::string la, lb, swt_filter = "haar", swt_weights;
  int swt_levels = 0;
  loss_swt->add_option("a", la, "First PNG")->required();
  loss_swt->add_option("b", lb, "Second PNG")->required();
  loss_swt->add_option("--levels", swt_levels, "Number of levels (defaults to the weight count)");
  loss_swt->add_option("--filter", swt_filter, "haar or db2");
  loss_swt->add_option("--weights", swt_weights, "Comma-separated level weights");
  auto* loss_mask = loss->add_subcommand("mask", "Structural mask loss");
  std::string ma, mb, mask_list, lambda_list;
  loss_mask->add_option("a", ma, "First PNG")->required();
  loss_mask->add_option("b", mb, "Second PNG")->required();
  loss_mask->add_option("--mask", mask_list, "Comma-separated mask PNGs")->required();
  loss_mask->add_option("--lambda", lambda_list, "Comma-separated mask weights")->required();
  auto* loss_total = loss->add_subcommand("total", "Uncertainty-weighted total");
  std::string total_losses, total_logvars;
  loss_total->add_option("--losses", total_losses, "Comma-separated loss values")->required();
  loss_total->add_option("--logvars", total_logvars, "Comma-separated log-variances")->required();

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Cosine retrieval with Recall@K and AP");
  std::string q_path, r_path, q_matrix, r_matrix, report_path, ks_text = "1,5,10";
  std::string direction = "drone->satellite";
  retrieve->add_option("--queries", q_path, "Query pack (or labels CSV with --query-matrix)")
      ->required();
  retrieve->add_option("--refs", r_path, "Reference pack (or labels CSV with --ref-matrix)")
      ->required();
  retrieve->add_option("--query-matrix", q_matrix, "float32 matrix for a query labels CSV");
  retrieve->add_option("--ref-matrix", r_matrix, "float32 matrix for a reference labels CSV");
  retrieve->add_option("--k", ks_text, "Comma-separated K values");
  retrieve->add_option("--direction", direction, "Direction label for the report");
  retrieve->add_option("--report", report_path, "Write the JSON report here");

  // fixture box-city
  auto* fixture = app.add_subcommand("fixture", "Synthetic scenes");
  fixture->require_subcommand(1);
  auto* box_city = fixture->add_subcommand("box-city", "Generate the box-city point cloud");
  std::string fx_out, fx_truth;
  std::uint64_t fx_seed = 0;
  double fx_scale = 0.25;
  double fx_density = 0.0;
  double fx_noise = -1.0;
  int fx_boxes = 4;
  bool fx_checker = false;
  box_city->add_option("-o,--output", fx_out, "Output PLY")->required();
  box_city->add_option("--truth", fx_truth, "Write the analytic nadir truth PNG");
  box_city->add_option("--truth-scale", fx_scale, "Truth pixel scale")->check(CLI::PositiveNumber);
  box_city->add_option("--seed", fx_seed, "Random seed");
  box_city->add_option("--density", fx_density, "Points per unit area (default 50)");
  box_city->add_option("--noise", fx_noise, "Position noise sigma (default 0.02)");
  box_city->add_option("--boxes", fx_boxes, "Number of boxes to keep (0-4)")->check(CLI::Range(0, 4));
  box_city->add_flag("--checkerboard", fx_checker, "Checkerboard ground");

  // compare
  auto* compare = app.add_subcommand("compare", "Mean abs difference, fraction within 16, SSIM");
  std::string ca, cb, ca_holes, cb_holes;
  compare->add_option("a", ca, "First PNG")->required();
  compare->add_option("b", cb, "Second PNG")->required();
  compare->add_option("--holes-a", ca_holes, "Hole mask of the first image");
  compare->add_option("--holes-b", cb_holes, "Hole mask of the second image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(of::ErrorCategory::kUsage);
  }

  try {
    if (simd == "scalar") of::simd::select_isa(of::simd::Isa::kScalar);
    if (simd == "avx2" && !of::simd::select_isa(of::simd::Isa::kAvx2)) {
      throw of::UsageError("AVX2 kernels are not available on this machine");
    }

    if (*cloud_info) {
      const auto loaded = of::load_ply(info_path);
      const auto box = of::bounding_box(loaded.cloud);
      std::cout << "points=" << loaded.cloud.size() << "\n"
                << "declared_vertices=" << loaded.declared_vertices << "\n"
                << "dropped_nonfinite=" << loaded.dropped_nonfinite << "\n"
                << "bbox_min=" << fmt3(box.min_corner) << "\n"
                << "bbox_max=" << fmt3(box.max_corner) << "\n"
                << "diagonal=" << fmt(box.diagonal) << "\n";
    } else if (*plane_fit) {
      const auto loaded = of::load_ply(plane_path);
      of::RansacOptions opt;
      opt.threshold = plane_threshold;
      opt.iterations = plane_iters;
      opt.seed = plane_seed;
      opt.threads = threads;
      const auto p = of::build_frame(of::fit_plane_ransac(loaded.cloud, opt));
      std::cout << "a=" << fmt(p.normal.x()) << "\n"
                << "b=" << fmt(p.normal.y()) << "\n"
                << "c=" << fmt(p.normal.z()) << "\n"
                << "d=" << fmt(p.offset) << "\n"
                << "centroid=" << fmt3(p.centroid) << "\n"
                << "basis_u=" << fmt3(p.basis_u) << "\n"
                << "basis_v=" << fmt3(p.basis_v) << "\n"
                << "threshold=" << fmt(p.threshold) << "\n"
                << "inlier_count=" << p.inlier_count << "\n"
                << "inlier_fraction=" << fmt(p.inlier_fraction) << "\n";
    } else if (*render) {
      of::PipelineConfig cfg;
      std::string cloud_path = rf.cloud;
      if (!rf.replay.empty()) {
        auto replay = of::read_manifest(rf.replay);
        cfg = replay.config;
        if (cloud_path.empty()) cloud_path = replay.cloud.string();
      }
      if (!rf.config.empty()) cfg = of::load_config(rf.config, cfg);
      if (cloud_path.empty()) throw of::UsageError("render needs a cloud path or --replay");
      if (*o_rho) cfg.raster.rho = rf.rho;
      if (*o_rmin) cfg.raster.r_min = rf.rmin;
      if (*o_rmax) cfg.raster.r_max = rf.rmax;
      if (*o_pmax) cfg.raster.p_max = rf.pmax;
      if (*o_ssaa) cfg.raster.ssaa = rf.ssaa;
      if (*o_roof) cfg.raster.roof_band_frac = rf.roof_band;
      if (*o_ground) cfg.raster.ground_band = rf.ground_band;
      if (*o_mmin) cfg.raster.m_min = rf.mmin;
      if (*o_splat) cfg.raster.splat_radius_px = rf.splat;
      if (*o_crop) cfg.raster.crop_frac = rf.crop;
      if (*o_seed) cfg.ransac.seed = rf.seed;
      if (*o_radius) cfg.inpaint_radius = rf.inpaint_radius;
      if (*o_href) cfg.harmonize_ref = rf.harmonize_ref;
      if (app.get_option("--threads")->count() > 0) cfg.set_threads(threads);
      const auto result = of::run_pipeline(cloud_path, cfg, rf.output);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      const auto& res = result.render.resolution;
      std::cout << "image=" << result.paths.image.string() << "\n"
                << "manifest=" << result.paths.manifest.string() << "\n"
                << "r=" << fmt(res.pixel_scale) << "\n"
                << "base_width=" << res.width << "\n"
                << "base_height=" << res.height << "\n"
                << "width=" << result.final_image.width() << "\n"
                << "height=" << result.final_image.height() << "\n"
                << "holes_before_inpaint=" << result.render.image.holes.count() << "\n";
    } else if (*warp) {
      const auto photo = of::read_png_rgb(warp_in);
      const auto corr = of::read_correspondences(warp_corr);
      of::WarpOptions opt;
      opt.pixel_scale = warp_scale;
      const auto out = of::perspective_fallback(photo, corr, opt);
      const auto paths = of::PipelinePaths::for_output(warp_out);
      of::write_png(out.rgb, paths.image);
      of::write_png(out.holes, paths.holes);
      of::write_georef(paths.georef, out.georef, nullptr);
      std::cout << "width=" << out.width() << "\nheight=" << out.height() << "\nr="
                << fmt(out.georef.pixel_scale) << "\nholes=" << out.holes.count() << "\n";
    } else if (*inp) {
      auto img = load_ortho(inp_in, inp_mask);
      auto out = of::inpaint(img, inp_radius, inp_dilate);
      if (!inp_ref.empty()) {
        const auto ref = load_ortho(inp_ref, "");
        std::vector<std::string> warnings;
        out = of::harmonize(out, &ref, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      }
      of::write_png(out.rgb, inp_out);
      std::cout << "filled=" << of::HoleMask::from(img.holes, inp_dilate).flags.count() << "\n";
    } else if (*edges) {
      const auto img = of::read_png_rgb(edges_in);
      const auto mask = of::canny_edges(img, canny);
      of::write_png(mask, edges_out);
      std::cout << "edge_pixels=" << mask.count() << "\n";
    } else if (*loss_swt) {
      of::LossWeights w;
      if (!swt_weights.empty()) w.swt_level_weights = parse_doubles(swt_weights, "--weights");
      if (swt_levels > 0 && static_cast<std::size_t>(swt_levels) != w.swt_level_weights.size()) {
        if (!swt_weights.empty()) {
          throw of::UsageError("--levels disagrees with the number of --weights");
        }
        w.swt_level_weights.assign(static_cast<std::size_t>(swt_levels), 1.0 / swt_levels);
      }
      const double v = of::swt_loss(of::read_png_rgb(la), of::read_png_rgb(lb), w,
                                    of::parse_family(swt_filter));
      std::cout << fmt(v) << "\n";
    } else if (*loss_mask) {
      of::StructuralMaskSet masks;
      for (const auto& path : split_commas(mask_list)) {
        of::Image m = of::read_png_gray(path);
        for (auto& v : m.data()) v /= 255.0;
        masks.add(std::move(m), path);
      }
      of::LossWeights w;
      w.mask_weights = parse_doubles(lambda_list, "--lambda");
      const double v = of::mask_loss(of::read_png_rgb(ma), of::read_png_rgb(mb), masks, w);
      std::cout << fmt(v) << "\n";
    } else if (*loss_total) {
      const auto l = parse_doubles(total_losses, "--losses");
      const auto s = parse_doubles(total_logvars, "--logvars");
      std::cout << fmt(of::uncertainty_total(l, s)) << "\n";
    } else if (*retrieve) {
      const auto load = [](const std::string& path, const std::string& matrix) {
        return matrix.empty() ? of::load_descriptor_pack(path)
                              : of::load_descriptor_csv(path, matrix);
      };
      const auto queries = load(q_path, q_matrix);
      const auto refs = load(r_path, r_matrix);
      std::vector<int> ks;
      for (const double k : parse_doubles(ks_text, "--k")) ks.push_back(static_cast<int>(k));
      const auto report = of::evaluate_retrieval(queries, refs, ks, direction, threads);
      const std::string json = report.to_json();
      if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw of::IoError("cannot write '" + report_path + "'");
        out << json << "\n";
      }
      for (const auto& [k, v] : report.recall_at) std::cout << "recall@" << k << "=" << fmt(v) << "\n";
      std::cout << "ap=" << fmt(report.ap_mean) << "\n"
                << "excluded_queries=" << report.excluded_queries.size() << "\n";
    } else if (*box_city) {
      auto scene = of::standard_box_city(fx_seed);
      scene.boxes.resize(static_cast<std::size_t>(fx_boxes));
      if (fx_density > 0.0) scene.density = fx_density;
      if (fx_noise >= 0.0) scene.noise_sigma = fx_noise;
      if (fx_checker) scene.pattern = of::GroundPattern::kCheckerboard;
      const auto city = of::generate_box_city(scene, fx_scale);
      of::save_ply(city.cloud, fx_out);
      if (!fx_truth.empty()) of::write_png(city.truth.rgb, fx_truth);
      std::cout << "points=" << city.cloud.size() << "\n";
    } else if (*compare) {
      const auto a = load_ortho(ca, ca_holes);
      const auto b = load_ortho(cb, cb_holes);
      const auto c = of::compare_images(a, b, !ca_holes.empty() || !cb_holes.empty());
      std::cout << "mean_abs_diff=" << fmt(c.mean_abs_diff[0]) << "," << fmt(c.mean_abs_diff[1])
                << "," << fmt(c.mean_abs_diff[2]) << "\n"
                << "fraction_within_16=" << fmt(c.fraction_within_16) << "\n"
                << "ssim=" << fmt(c.ssim) << "\n"
                << "compared_pixels=" << c.compared_pixels << "\n";
    }
  } catch (const of::Error& e) {
    std::cerr << "error[" << of::category_name(e.category()) << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    std::cerr << "error[domain]: out of memory\n";
    return static_cast<int>(of::ErrorCategory::kDomain);
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
