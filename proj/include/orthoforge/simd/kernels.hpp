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

// Data-parallel inner loops. Each kernel has a scalar reference and, where
// the target supports it, an AVX2 variant selected at runtime. Variants are
// required to be bit-identical to the scalar reference: reductions follow a
// fixed 8-lane accumulation order (lane = index mod 8, then the tree
// ((l0+l4)+(l2+l6)) + ((l1+l5)+(l3+l7))), and multiply/add are never fused.

#include <cstddef>
#include <span>
#include <string_view>

namespace orthoforge::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa) noexcept;

struct Kernels {
  Isa isa;

  /// out[i] = sum over k (in order) of weights[k] * rows[k][i].
  void (*weighted_row_sum)(const double* const* rows, const double* weights,
                           std::size_t taps, double* out, std::size_t n);

  /// Dot product of float32 vectors accumulated in double precision.
  double (*dot_f32)(const float* a, const float* b, std::size_t n);

  /// Sum of |a[i]|.
  double (*abs_sum)(const double* a, std::size_t n);

  /// Sum of |a[i] - b[i]|.
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);

  /// Number of points with |p0*x + p1*y + p2*z + p3| <= threshold, evaluated
  /// in float32 as ((p0*x + p1*y) + p2*z) + p3.
  std::size_t (*count_near_plane)(const float* xs, const float* ys,
                                  const float* zs, std::size_t n,
                                  const float* plane, float threshold);
};

const Kernels& scalar_kernels() noexcept;

/// Null when the build or the running CPU lacks AVX2.
const Kernels* avx2_kernels() noexcept;

/// Kernels in use. Chosen once: the ORTHOFORGE_SIMD environment variable
/// ("scalar", "avx2", "auto") wins, otherwise the widest supported ISA.
const Kernels& active() noexcept;

/// Overrides the active ISA; returns false (and changes nothing) when the
/// requested ISA is unavailable.
bool select_isa(Isa isa) noexcept;

// Convenience wrappers over active().

inline double dot(std::span<const float> a, std::span<const float> b) noexcept {
  return active().dot_f32(a.data(), b.data(), a.size());
}

inline double abs_sum(std::span<const double> a) noexcept {
  return active().abs_sum(a.data(), a.size());
}

}  // namespace orthoforge::simd
