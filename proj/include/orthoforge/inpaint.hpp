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

#include <string>
#include <vector>

#include "orthoforge/image.hpp"
#include "orthoforge/ortho_raster.hpp"

namespace orthoforge {

/// Pixels to fill, together with the dilation already applied to them.
struct HoleMask {
  Mask flags;
  int dilation = 0;

  /// Grows `holes` by `dilation` pixels (8-connected, i.e. a square window).
  static HoleMask from(const Mask& holes, int dilation);
};

/// Default inpainting radius in pixels.
inline constexpr int kDefaultInpaintRadius = 5;
inline constexpr int kDefaultMaskDilation = 1;

/// Fast-marching inpainting. Hole pixels are visited in order of their
/// distance to the known region; each is set to a normalized weighted average
/// of already-known pixels within `radius`, so filled values never leave the
/// range of the known ones. Known pixels are returned unchanged.
Image inpaint(const Image& img, const HoleMask& mask, int radius = kDefaultInpaintRadius);

/// Fills img.holes (after dilation) and returns an image without holes.
OrthoImage inpaint(const OrthoImage& img, int radius = kDefaultInpaintRadius,
                   int dilation = kDefaultMaskDilation);

/// Per-channel affine map taking the mean and standard deviation of the
/// non-hole pixels of `img` to those of `reference`; hole pixels keep the
/// sentinel. A null reference is the identity. A channel without variance is
/// only shifted to the reference mean and a warning is appended.
OrthoImage harmonize(const OrthoImage& img, const OrthoImage* reference,
                     std::vector<std::string>* warnings = nullptr);

}  // namespace orthoforge
