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

#include <cmath>
#include <cstddef>

#include "lanes.hpp"
#include "orthoforge/simd/kernels.hpp"

namespace orthoforge::simd {
namespace {

using detail::kLanes;
using detail::reduce_lanes;

void weighted_row_sum_scalar(const double* const* rows, const double* weights,
                             std::size_t taps, double* out, std::size_t n) {
  if (taps == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = weights[0] * rows[0][i];
    for (std::size_t k = 1; k < taps; ++k) acc = acc + weights[k] * rows[k][i];
    out[i] = acc;
  }
}

double dot_f32_scalar(const float* a, const float* b, std::size_t n) {
  double lanes[kLanes] = {};
  for (std::size_t i = 0; i < n; ++i) {
    lanes[i % kLanes] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return reduce_lanes(lanes);
}

double abs_sum_scalar(const double* a, std::size_t n) {
  double lanes[kLanes] = {};
  for (std::size_t i = 0; i < n; ++i) lanes[i % kLanes] += std::fabs(a[i]);
  return reduce_lanes(lanes);
}

double abs_diff_sum_scalar(const double* a, const double* b, std::size_t n) {
  double lanes[kLanes] = {};
  for (std::size_t i = 0; i < n; ++i) lanes[i % kLanes] += std::fabs(a[i] - b[i]);
  return reduce_lanes(lanes);
}

std::size_t count_near_plane_scalar(const float* xs, const float* ys,
                                    const float* zs, std::size_t n,
                                    const float* plane, float threshold) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const float d = ((plane[0] * xs[i] + plane[1] * ys[i]) + plane[2] * zs[i]) + plane[3];
    count += std::fabs(d) <= threshold ? 1 : 0;
  }
  return count;
}

constexpr Kernels kScalar{
    Isa::kScalar,          weighted_row_sum_scalar, dot_f32_scalar,
    abs_sum_scalar,        abs_diff_sum_scalar,     count_near_plane_scalar,
};

}  // namespace

const Kernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace orthoforge::simd
