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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "orthoforge/simd/kernels.hpp"

namespace orthoforge::simd {

#if defined(ORTHOFORGE_HAVE_AVX2)
namespace detail {
const Kernels* avx2_table() noexcept;
}
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(ORTHOFORGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels* initial_choice() noexcept {
  const Kernels* best = avx2_kernels();
  if (best == nullptr) best = &scalar_kernels();
  if (const char* env = std::getenv("ORTHOFORGE_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return &scalar_kernels();
  }
  return best;
}

std::atomic<const Kernels*>& current() noexcept {
  static std::atomic<const Kernels*> chosen{initial_choice()};
  return chosen;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const Kernels* avx2_kernels() noexcept {
#if defined(ORTHOFORGE_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select_isa(Isa isa) noexcept {
  const Kernels* table = isa == Isa::kScalar ? &scalar_kernels() : avx2_kernels();
  if (table == nullptr) return false;
  current().store(table, std::memory_order_release);
  return true;
}

}  // namespace orthoforge::simd
