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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "orthoforge/ground_plane.hpp"
#include "orthoforge/ortho_raster.hpp"
#include "orthoforge/wavelet.hpp"

namespace orthoforge {

inline constexpr int kManifestSchemaVersion = 1;

/// Everything a pipeline run depends on. Serialized as flat key=value text.
struct PipelineConfig {
  RasterConfig raster;
  RansacOptions ransac;
  int inpaint_radius = 5;
  int mask_dilation = 1;
  std::string harmonize_ref;  // empty: no harmonization
  WaveletFamily swt_filter = WaveletFamily::kHaar;
  LossWeights loss;

  /// Throws UsageError for an unknown key and FormatError for a bad value.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order. Doubles are printed
  /// with round-trip precision.
  std::vector<std::pair<std::string, std::string>> items() const;
  /// Throws DomainError when a value breaks its owner's invariants.
  void validate() const;
  /// Applies `threads` to every stage.
  void set_threads(int threads);
};

/// Reads "key = value" lines; '#' starts a comment.
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Sidecar paths derived from the output image path "dir/name.png".
struct PipelinePaths {
  std::filesystem::path image;     // dir/name.png
  std::filesystem::path holes;     // dir/name.holes.png
  std::filesystem::path georef;    // dir/name.georef.txt
  std::filesystem::path manifest;  // dir/name.json

  static PipelinePaths for_output(const std::filesystem::path& image);
};

struct PipelineResult {
  RenderResult render;
  OrthoImage final_image;  // inpainted and optionally harmonized
  std::vector<std::string> warnings;
  PipelinePaths paths;
};

/// Loads the cloud, renders, inpaints, optionally harmonizes, and writes the
/// image plus hole mask, georef and manifest sidecars.
PipelineResult run_pipeline(const std::filesystem::path& cloud_path, const PipelineConfig& config,
                            const std::filesystem::path& output_image);

/// Cloud path and configuration recorded in a run manifest.
struct ManifestReplay {
  std::filesystem::path cloud;
  PipelineConfig config;
};
ManifestReplay read_manifest(const std::filesystem::path& manifest);

/// Writes the georef sidecar of an image (plane frame optional).
void write_georef(const std::filesystem::path& path, const Georef& georef,
                  const GroundPlane* plane);

}  // namespace orthoforge
