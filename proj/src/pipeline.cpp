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


#include "orthoforge/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "orthoforge/checksum.hpp"
#include "orthoforge/error.hpp"
#include "orthoforge/image.hpp"
#include "orthoforge/inpaint.hpp"
#include "orthoforge/simd/kernels.hpp"

namespace orthoforge {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw FormatError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  return out;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  const char* key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define OF_DOUBLE(key_, expr_)                                                              \
  Field {                                                                                   \
    key_, [](PipelineConfig& c, const std::string& v) { c.expr_ = parse_number<double>(key_, v); }, \
        [](const PipelineConfig& c) { return format_double(c.expr_); }                     \
  }
#define OF_INT(key_, type_, expr_)                                                         \
  Field {                                                                                  \
    key_, [](PipelineConfig& c, const std::string& v) { c.expr_ = parse_number<type_>(key_, v); }, \
        [](const PipelineConfig& c) { return std::to_string(c.expr_); }                    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      OF_DOUBLE("rho", raster.rho),
      OF_DOUBLE("r_min", raster.r_min),
      OF_DOUBLE("r_max", raster.r_max),
      OF_INT("p_max", std::size_t, raster.p_max),
      OF_INT("ssaa", int, raster.ssaa),
      OF_DOUBLE("roof_band_frac", raster.roof_band_frac),
      OF_DOUBLE("ground_band", raster.ground_band),
      OF_INT("m_min", int, raster.m_min),
      OF_DOUBLE("splat_radius_px", raster.splat_radius_px),
      OF_DOUBLE("crop_frac", raster.crop_frac),
      OF_DOUBLE("w_sat", raster.w_sat),
      Field{"threads",
            [](PipelineConfig& c, const std::string& v) {
              c.set_threads(parse_number<int>("threads", v));
            },
            [](const PipelineConfig& c) { return std::to_string(c.raster.threads); }},
      OF_INT("seed", std::uint64_t, ransac.seed),
      OF_DOUBLE("ransac_threshold", ransac.threshold),
      OF_INT("ransac_iterations", int, ransac.iterations),
      OF_DOUBLE("min_inlier_fraction", ransac.min_inlier_fraction),
      OF_INT("inpaint_radius", int, inpaint_radius),
      OF_INT("mask_dilation", int, mask_dilation),
      Field{"harmonize_ref",
            [](PipelineConfig& c, const std::string& v) { c.harmonize_ref = v; },
            [](const PipelineConfig& c) { return c.harmonize_ref; }},
      Field{"swt_filter",
            [](PipelineConfig& c, const std::string& v) {
              try {
                c.swt_filter = parse_family(v);
              } catch (const UsageError& e) {
                throw FormatError(std::string("config key 'swt_filter': ") + e.what());
              }
            },
            [](const PipelineConfig& c) { return std::string(family_name(c.swt_filter)); }},
      Field{"swt_weights",
            [](PipelineConfig& c, const std::string& v) {
              c.loss.swt_level_weights = parse_list("swt_weights", v);
            },
            [](const PipelineConfig& c) { return format_list(c.loss.swt_level_weights); }},
      Field{"mask_weights",
            [](PipelineConfig& c, const std::string& v) {
              c.loss.mask_weights = parse_list("mask_weights", v);
            },
            [](const PipelineConfig& c) { return format_list(c.loss.mask_weights); }},
      Field{"uncertainty_logvars",
            [](PipelineConfig& c, const std::string& v) {
              c.loss.uncertainty_logvars = parse_list("uncertainty_logvars", v);
            },
            [](const PipelineConfig& c) { return format_list(c.loss.uncertainty_logvars); }},
      Field{"loss_sum_norm",
            [](PipelineConfig& c, const std::string& v) {
              if (v != "true" && v != "false") {
                throw FormatError("config key 'loss_sum_norm': expected true or false");
              }
              c.loss.sum_norm = v == "true";
            },
            [](const PipelineConfig& c) { return std::string(c.loss.sum_norm ? "true" : "false"); }},
  };
  return table;
}

#undef OF_DOUBLE
#undef OF_INT

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::items() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

void PipelineConfig::validate() const {
  raster.validate();
  if (ransac.iterations < 1) throw DomainError("ransac_iterations must be positive");
  if (!(ransac.min_inlier_fraction >= 0.0 && ransac.min_inlier_fraction <= 1.0)) {
    throw DomainError("min_inlier_fraction must be in [0, 1]");
  }
  if (inpaint_radius < 1) throw DomainError("inpaint_radius must be at least 1");
  if (mask_dilation < 0) throw DomainError("mask_dilation must be nonnegative");
  loss.validate();
}

void PipelineConfig::set_threads(int threads) {
  raster.threads = threads;
  ransac.threads = threads;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
      if (e.category() == ErrorCategory::kUsage) throw UsageError(where + e.what());
      throw FormatError(where + e.what());
    }
  }
  return base;
}

PipelinePaths PipelinePaths::for_output(const std::filesystem::path& image) {
  PipelinePaths p;
  p.image = image;
  std::filesystem::path stem = image;
  stem.replace_extension();
  p.holes = stem.string() + ".holes.png";
  p.georef = stem.string() + ".georef.txt";
  p.manifest = stem.string() + ".json";
  return p;
}

void write_georef(const std::filesystem::path& path, const Georef& g, const GroundPlane* plane) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "u_min=" << format_double(g.u_min) << "\n"
      << "v_min=" << format_double(g.v_min) << "\n"
      << "r=" << format_double(g.pixel_scale) << "\n"
      << "full_width=" << g.full_width << "\n"
      << "full_height=" << g.full_height << "\n"
      << "crop_x=" << g.crop_x << "\n"
      << "crop_y=" << g.crop_y << "\n";
  if (plane != nullptr) {
    const auto vec = [&](const char* name, const Vec3& v) {
      out << name << "=" << format_double(v.x()) << "," << format_double(v.y()) << ","
          << format_double(v.z()) << "\n";
    };
    vec("plane_normal", plane->normal);
    vec("plane_centroid", plane->centroid);
    vec("basis_u", plane->basis_u);
    vec("basis_v", plane->basis_v);
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

namespace {

nlohmann::ordered_json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

PipelineResult run_pipeline(const std::filesystem::path& cloud_path, const PipelineConfig& config,
                            const std::filesystem::path& output_image) {
  config.validate();
  PipelineResult result;
  result.paths = PipelinePaths::for_output(output_image);

  const PlyLoadResult loaded = load_ply(cloud_path);
  if (loaded.dropped_nonfinite > 0) {
    result.warnings.push_back("dropped " + std::to_string(loaded.dropped_nonfinite) +
                              " vertices with non-finite coordinates");
  }
  RenderOptions options;
  options.raster = config.raster;
  options.ransac = config.ransac;
  result.render = render_orthophoto(loaded.cloud, options);
  for (const auto& w : result.render.warnings) result.warnings.push_back(w);

  const auto t0 = std::chrono::steady_clock::now();
  result.final_image = inpaint(result.render.image, config.inpaint_radius, config.mask_dilation);
  const auto t1 = std::chrono::steady_clock::now();
  result.render.timings_ms.emplace_back(
      "inpaint", std::chrono::duration<double, std::milli>(t1 - t0).count());
  if (!config.harmonize_ref.empty()) {
    OrthoImage ref;
    ref.rgb = read_png_rgb(config.harmonize_ref);
    ref.holes = Mask(ref.rgb.width(), ref.rgb.height());
    result.final_image = harmonize(result.final_image, &ref, &result.warnings);
    result.render.timings_ms.emplace_back(
        "harmonize",
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count());
  }

  const auto& paths = result.paths;
  std::error_code ec;
  if (paths.image.has_parent_path()) std::filesystem::create_directories(paths.image.parent_path(), ec);
  if (ec) throw IoError("cannot create " + paths.image.parent_path().string() + ": " + ec.message());
  write_png(result.final_image.rgb, paths.image);
  write_png(result.render.image.holes, paths.holes);
  write_georef(paths.georef, result.final_image.georef, &result.render.plane);

  const auto& r = result.render;
  nlohmann::ordered_json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["tool"] = "orthoforge";
  m["input"] = {{"cloud", std::filesystem::absolute(cloud_path).string()},
                {"fnv1a64", hex64(fnv1a64_file(cloud_path))},
                {"points", loaded.cloud.size()},
                {"dropped_nonfinite", loaded.dropped_nonfinite}};
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.items()) cfg[k] = v;
  m["config"] = cfg;
  m["plane"] = {{"normal", vec_json(r.plane.normal)},
                {"offset", r.plane.offset},
                {"centroid", vec_json(r.plane.centroid)},
                {"basis_u", vec_json(r.plane.basis_u)},
                {"basis_v", vec_json(r.plane.basis_v)},
                {"threshold", r.plane.threshold},
                {"inlier_fraction", r.plane.inlier_fraction}};
  m["heights"] = {{"scale", r.heights.scale},
                  {"p05", r.heights.p05},
                  {"p95", r.heights.p95},
                  {"delta", r.heights.delta},
                  {"tau", r.heights.tau}};
  m["resolution"] = {{"r", r.resolution.pixel_scale},
                     {"r_unclamped", r.resolution.unclamped_scale},
                     {"width", r.resolution.width},
                     {"height", r.resolution.height},
                     {"ssaa", config.raster.ssaa},
                     {"ground_area", r.resolution.ground_area},
                     {"ground_count", r.resolution.ground_count},
                     {"used_full_extent", r.resolution.used_full_extent},
                     {"rescaled_for_p_max", r.resolution.rescaled_for_p_max}};
  m["output"] = {{"image", paths.image.filename().string()},
                 {"holes", paths.holes.filename().string()},
                 {"georef", paths.georef.filename().string()},
                 {"width", result.final_image.width()},
                 {"height", result.final_image.height()},
                 {"holes_before_inpaint", r.image.holes.count()},
                 {"image_fnv1a64", hex64(fnv1a64_file(paths.image))}};
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [stage, ms] : r.timings_ms) timings[stage] = ms;
  m["timings_ms"] = timings;
  m["simd"] = std::string(simd::isa_name(simd::active().isa));
  m["warnings"] = result.warnings;

  std::ofstream out(paths.manifest);
  if (!out) throw IoError("cannot write '" + paths.manifest.string() + "'");
  out << m.dump(2) << "\n";
  if (!out) throw IoError("write to '" + paths.manifest.string() + "' failed");
  return result;
}

ManifestReplay read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest '" + manifest.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema_version", 0) != kManifestSchemaVersion) {
    throw FormatError(manifest.string() + ": not a schema_version 1 run manifest");
  }
  ManifestReplay replay;
  try {
    replay.cloud = j.at("input").at("cloud").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) replay.config.set(k, v.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest.string() + ": " + e.what());
  }
  return replay;
}

}  // namespace orthoforge
