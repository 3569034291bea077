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

#include "orthoforge/image.hpp"

namespace orthoforge {

struct CannyOptions {
  double sigma = 1.4;
  double low_frac = 0.1;   // of the maximum gradient magnitude
  double high_frac = 0.3;

  void validate() const;
};

/// Canny edge map of the luminance: Gaussian blur, Sobel gradient,
/// non-maximum suppression along the gradient direction quantized to four
/// angles, and hysteresis with 8-connectivity.
Mask canny_edges(const Image& img, const CannyOptions& options = {});

}  // namespace orthoforge
