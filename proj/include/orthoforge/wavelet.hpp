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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orthoforge/image.hpp"

namespace orthoforge {

enum class WaveletFamily { kHaar, kDb2 };
enum class Boundary { kPeriodic, kSymmetric };

std::string_view family_name(WaveletFamily f) noexcept;
/// Accepts "haar" and "db2"; throws UsageError otherwise.
WaveletFamily parse_family(std::string_view name);

/// Analysis filter pair scaled so that the low-pass taps sum to 1.
struct FilterPair {
  std::vector<double> low;
  std::vector<double> high;
};
const FilterPair& analysis_filters(WaveletFamily f);

/// Detail planes of one level; each has the input's size and channel count.
struct SwtLevel {
  Image horizontal;  // low-pass along x, high-pass along y
  Image vertical;    // high-pass along x, low-pass along y
  Image diagonal;    // high-pass along both axes
};

struct SwtPyramid {
  WaveletFamily family = WaveletFamily::kHaar;
  Boundary boundary = Boundary::kPeriodic;
  std::vector<SwtLevel> levels;  // levels[j - 1] is level j
  Image approximation;           // low-pass residue after the last level
};

/// Undecimated (a trous) 2-D transform, channels independently. Level j uses
/// the base filters with taps spaced 2^(j - 1) apart. Throws DomainError when
/// an axis is shorter than 2^levels or than the level-L filter support.
SwtPyramid swt_forward(const Image& img, int levels, WaveletFamily family = WaveletFamily::kHaar,
                       Boundary boundary = Boundary::kPeriodic);

/// Exact inverse of swt_forward for periodic boundaries.
Image swt_inverse(const SwtPyramid& pyramid);

struct LossWeights {
  std::vector<double> swt_level_weights{0.5, 0.3, 0.2};
  std::vector<double> mask_weights;
  std::vector<double> uncertainty_logvars;
  /// Sum absolute values instead of averaging them.
  bool sum_norm = false;

  void validate() const;
};

/// Sum over levels of w_j times the mean absolute detail coefficient of
/// D_j(a - b) across all three subbands and all channels. The level count is
/// the number of level weights.
double swt_loss(const Image& a, const Image& b, const LossWeights& weights,
                WaveletFamily family = WaveletFamily::kHaar,
                Boundary boundary = Boundary::kPeriodic);

/// Per-pixel weights in [0, 1] (single channel).
struct StructuralMask {
  Image weights;
  std::string label;
};

struct StructuralMaskSet {
  std::vector<StructuralMask> masks;

  void add(Image weights, std::string label);
  void add(const Mask& binary, std::string label);
  /// Uniform sizes and values in [0, 1]; throws DomainError otherwise.
  void validate() const;
};

/// Sum over masks of lambda_m times the mean over pixels and channels of
/// |(a - b) * S_m|.
double mask_loss(const Image& a, const Image& b, const StructuralMaskSet& masks,
                 const LossWeights& weights);

/// sum_i exp(-s_i) * L_i + s_i.
double uncertainty_total(std::span<const double> losses, std::span<const double> logvars);

}  // namespace orthoforge
