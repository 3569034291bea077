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

// Compiled with -mavx2 only; never called unless the CPU reports AVX2.

#include <immintrin.h>

#include <bit>
#include <cmath>
#include <cstddef>

#include "lanes.hpp"
#include "orthoforge/simd/kernels.hpp"

namespace orthoforge::simd {
namespace {

using detail::kLanes;
using detail::reduce_lanes;

void weighted_row_sum_avx2(const double* const* rows, const double* weights,
                           std::size_t taps, double* out, std::size_t n) {
  if (taps == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(weights[0]), _mm256_loadu_pd(rows[0] + i));
    for (std::size_t k = 1; k < taps; ++k) {
      const __m256d term =
          _mm256_mul_pd(_mm256_set1_pd(weights[k]), _mm256_loadu_pd(rows[k] + i));
      acc = _mm256_add_pd(acc, term);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = weights[0] * rows[0][i];
    for (std::size_t k = 1; k < taps; ++k) acc = acc + weights[k] * rows[k][i];
    out[i] = acc;
  }
}

double dot_f32_avx2(const float* a, const float* b, std::size_t n) {
  __m256d acc_lo = _mm256_setzero_pd();
  __m256d acc_hi = _mm256_setzero_pd();
  const std::size_t n8 = n & ~std::size_t{7};
  for (std::size_t i = 0; i < n8; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
    const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
    const __m256d b_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
    const __m256d b_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
    acc_lo = _mm256_add_pd(acc_lo, _mm256_mul_pd(a_lo, b_lo));
    acc_hi = _mm256_add_pd(acc_hi, _mm256_mul_pd(a_hi, b_hi));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc_lo);
  _mm256_store_pd(lanes + 4, acc_hi);
  for (std::size_t i = n8; i < n; ++i) {
    lanes[i - n8] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return reduce_lanes(lanes);
}

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

double abs_sum_avx2(const double* a, std::size_t n) {
  __m256d acc_lo = _mm256_setzero_pd();
  __m256d acc_hi = _mm256_setzero_pd();
  const std::size_t n8 = n & ~std::size_t{7};
  for (std::size_t i = 0; i < n8; i += 8) {
    acc_lo = _mm256_add_pd(acc_lo, abs_pd(_mm256_loadu_pd(a + i)));
    acc_hi = _mm256_add_pd(acc_hi, abs_pd(_mm256_loadu_pd(a + i + 4)));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc_lo);
  _mm256_store_pd(lanes + 4, acc_hi);
  for (std::size_t i = n8; i < n; ++i) lanes[i - n8] += std::fabs(a[i]);
  return reduce_lanes(lanes);
}

double abs_diff_sum_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc_lo = _mm256_setzero_pd();
  __m256d acc_hi = _mm256_setzero_pd();
  const std::size_t n8 = n & ~std::size_t{7};
  for (std::size_t i = 0; i < n8; i += 8) {
    const __m256d d_lo = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d_hi = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc_lo = _mm256_add_pd(acc_lo, abs_pd(d_lo));
    acc_hi = _mm256_add_pd(acc_hi, abs_pd(d_hi));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc_lo);
  _mm256_store_pd(lanes + 4, acc_hi);
  for (std::size_t i = n8; i < n; ++i) lanes[i - n8] += std::fabs(a[i] - b[i]);
  return reduce_lanes(lanes);
}

std::size_t count_near_plane_avx2(const float* xs, const float* ys,
                                  const float* zs, std::size_t n,
                                  const float* plane, float threshold) {
  const __m256 a = _mm256_set1_ps(plane[0]);
  const __m256 b = _mm256_set1_ps(plane[1]);
  const __m256 c = _mm256_set1_ps(plane[2]);
  const __m256 d = _mm256_set1_ps(plane[3]);
  const __m256 t = _mm256_set1_ps(threshold);
  const __m256 sign = _mm256_set1_ps(-0.0f);
  std::size_t count = 0;
  const std::size_t n8 = n & ~std::size_t{7};
  for (std::size_t i = 0; i < n8; i += 8) {
    __m256 dist = _mm256_add_ps(_mm256_mul_ps(a, _mm256_loadu_ps(xs + i)),
                                _mm256_mul_ps(b, _mm256_loadu_ps(ys + i)));
    dist = _mm256_add_ps(dist, _mm256_mul_ps(c, _mm256_loadu_ps(zs + i)));
    dist = _mm256_add_ps(dist, d);
    const __m256 inside = _mm256_cmp_ps(_mm256_andnot_ps(sign, dist), t, _CMP_LE_OQ);
    count += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(_mm256_movemask_ps(inside))));
  }
  for (std::size_t i = n8; i < n; ++i) {
    const float dist = ((plane[0] * xs[i] + plane[1] * ys[i]) + plane[2] * zs[i]) + plane[3];
    count += std::fabs(dist) <= threshold ? 1 : 0;
  }
  return count;
}

constexpr Kernels kAvx2{
    Isa::kAvx2,         weighted_row_sum_avx2, dot_f32_avx2,
    abs_sum_avx2,       abs_diff_sum_avx2,     count_near_plane_avx2,
};

}  // namespace

namespace detail {
const Kernels* avx2_table() noexcept { return &kAvx2; }
}  // namespace detail

}  // namespace orthoforge::simd
