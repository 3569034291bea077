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


#include <algorithm>
#include <cmath>
#include <string>

#include "orthoforge/error.hpp"
#include "orthoforge/simd/kernels.hpp"
#include "orthoforge/wavelet.hpp"

namespace orthoforge {

std::string_view family_name(WaveletFamily f) noexcept {
  return f == WaveletFamily::kHaar ? "haar" : "db2";
}

WaveletFamily parse_family(std::string_view name) {
  if (name == "haar") return WaveletFamily::kHaar;
  if (name == "db2") return WaveletFamily::kDb2;
  throw UsageError("unknown wavelet '" + std::string(name) + "' (expected haar or db2)");
}

const FilterPair& analysis_filters(WaveletFamily f) {
  static const FilterPair haar{{0.5, 0.5}, {0.5, -0.5}};
  static const FilterPair db2 = [] {
    const double r3 = std::sqrt(3.0);
    FilterPair p;
    p.low = {(1.0 + r3) / 8.0, (3.0 + r3) / 8.0, (3.0 - r3) / 8.0, (1.0 - r3) / 8.0};
    const std::size_t n = p.low.size();
    for (std::size_t k = 0; k < n; ++k) {
      p.high.push_back((k % 2 == 0 ? 1.0 : -1.0) * p.low[n - 1 - k]);
    }
    return p;
  }();
  return f == WaveletFamily::kHaar ? haar : db2;
}

namespace {

int wrap(long m, int n, Boundary boundary) {
  if (boundary == Boundary::kPeriodic) {
    const long r = m % n;
    return static_cast<int>(r < 0 ? r + n : r);
  }
  const long period = 2L * n;
  long r = m % period;
  if (r < 0) r += period;
  return static_cast<int>(r < n ? r : period - 1 - r);
}

struct Taps {
  std::vector<double> weights;
  std::vector<long> offsets;
  // Zero-sum filters are evaluated as sum_k w_k (in(o_k) - in(o_0)), which
  // maps constant input to exactly zero.
  bool differenced = false;
};

Taps spaced(const std::vector<double>& filter, long spacing, int sign, bool differenced = false) {
  Taps t;
  t.weights = filter;
  t.differenced = differenced;
  for (std::size_t k = 0; k < filter.size(); ++k) {
    t.offsets.push_back(sign * static_cast<long>(k) * spacing);
  }
  return t;
}

/// out = sum_t taps.weights[t] * rows[t], honoring taps.differenced.
/// `scratch` holds one row per tap after the first.
void combine_rows(const std::vector<const double*>& rows, const Taps& taps, double* out,
                  std::size_t n, std::vector<std::vector<double>>& scratch) {
  const auto& k = simd::active();
  if (!taps.differenced) {
    k.weighted_row_sum(rows.data(), taps.weights.data(), rows.size(), out, n);
    return;
  }
  scratch.resize(rows.size() - 1);
  std::vector<const double*> diffs(rows.size() - 1);
  for (std::size_t t = 1; t < rows.size(); ++t) {
    auto& d = scratch[t - 1];
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = rows[t][i] - rows[0][i];
    diffs[t - 1] = d.data();
  }
  k.weighted_row_sum(diffs.data(), taps.weights.data() + 1, diffs.size(), out, n);
}

/// out(x) = sum_k w_k in(x + o_k) along rows.
Image filter_x(const Image& in, const Taps& taps, Boundary boundary) {
  const int w = in.width();
  Image out(w, in.height(), in.channels());
  const long lo = *std::min_element(taps.offsets.begin(), taps.offsets.end());
  const long hi = *std::max_element(taps.offsets.begin(), taps.offsets.end());
  std::vector<double> padded(static_cast<std::size_t>(w + hi - lo));
  std::vector<const double*> rows(taps.weights.size());
  std::vector<std::vector<double>> scratch;
  for (int c = 0; c < in.channels(); ++c) {
    for (int y = 0; y < in.height(); ++y) {
      const auto src = in.row(c, y);
      for (std::size_t i = 0; i < padded.size(); ++i) {
        padded[i] = src[static_cast<std::size_t>(wrap(static_cast<long>(i) + lo, w, boundary))];
      }
      for (std::size_t t = 0; t < rows.size(); ++t) rows[t] = padded.data() + (taps.offsets[t] - lo);
      combine_rows(rows, taps, out.row(c, y).data(), static_cast<std::size_t>(w), scratch);
    }
  }
  return out;
}

/// out(y) = sum_k w_k in(y + o_k) along columns.
Image filter_y(const Image& in, const Taps& taps, Boundary boundary) {
  const int h = in.height();
  Image out(in.width(), h, in.channels());
  std::vector<const double*> rows(taps.weights.size());
  std::vector<std::vector<double>> scratch;
  for (int c = 0; c < in.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (std::size_t t = 0; t < rows.size(); ++t) {
        rows[t] = in.row(c, wrap(y + taps.offsets[t], h, boundary)).data();
      }
      combine_rows(rows, taps, out.row(c, y).data(), static_cast<std::size_t>(in.width()),
                   scratch);
    }
  }
  return out;
}

void add_into(Image& acc, const Image& other) {
  auto a = acc.data();
  const auto b = other.data();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void check_size(int n, int levels, std::size_t filter_len, const char* axis) {
  const long needed_dyadic = 1L << levels;
  const long support = static_cast<long>(filter_len - 1) * (1L << (levels - 1)) + 1;
  if (n < needed_dyadic || n < support) {
    throw DomainError(std::string("image ") + axis + " extent " + std::to_string(n) +
                      " is too small for " + std::to_string(levels) + " wavelet levels");
  }
}

}  // namespace

SwtPyramid swt_forward(const Image& img, int levels, WaveletFamily family, Boundary boundary) {
  if (levels < 1 || levels > 30) throw DomainError("wavelet levels must be in [1, 30]");
  if (img.empty()) throw DomainError("cannot transform an empty image");
  const FilterPair& f = analysis_filters(family);
  check_size(img.width(), levels, f.low.size(), "width");
  check_size(img.height(), levels, f.low.size(), "height");
  SwtPyramid p;
  p.family = family;
  p.boundary = boundary;
  Image approx = img;
  for (int j = 1; j <= levels; ++j) {
    const long spacing = 1L << (j - 1);
    const Taps low = spaced(f.low, spacing, 1);
    const Taps high = spaced(f.high, spacing, 1, true);
    const Image lx = filter_x(approx, low, boundary);
    const Image hx = filter_x(approx, high, boundary);
    SwtLevel level{filter_y(lx, high, boundary), filter_y(hx, low, boundary),
                   filter_y(hx, high, boundary)};
    approx = filter_y(lx, low, boundary);
    p.levels.push_back(std::move(level));
  }
  p.approximation = std::move(approx);
  return p;
}

Image swt_inverse(const SwtPyramid& pyramid) {
  if (pyramid.boundary != Boundary::kPeriodic) {
    throw DomainError("the inverse transform requires periodic boundaries");
  }
  const FilterPair& f = analysis_filters(pyramid.family);
  Image approx = pyramid.approximation;
  for (int j = static_cast<int>(pyramid.levels.size()); j >= 1; --j) {
    const auto& level = pyramid.levels[static_cast<std::size_t>(j - 1)];
    const long spacing = 1L << (j - 1);
    const Taps low = spaced(f.low, spacing, -1);
    const Taps high = spaced(f.high, spacing, -1);
    Image lx = filter_y(approx, low, Boundary::kPeriodic);
    add_into(lx, filter_y(level.horizontal, high, Boundary::kPeriodic));
    Image hx = filter_y(level.vertical, low, Boundary::kPeriodic);
    add_into(hx, filter_y(level.diagonal, high, Boundary::kPeriodic));
    approx = filter_x(lx, low, Boundary::kPeriodic);
    add_into(approx, filter_x(hx, high, Boundary::kPeriodic));
  }
  return approx;
}

void LossWeights::validate() const {
  if (swt_level_weights.empty()) throw DomainError("at least one wavelet level weight is needed");
  bool positive = false;
  for (const double w : swt_level_weights) {
    if (!(w >= 0.0)) throw DomainError("wavelet level weights must be nonnegative");
    positive = positive || w > 0.0;
  }
  if (!positive) throw DomainError("at least one wavelet level weight must be positive");
  for (const double l : mask_weights) {
    if (!(l >= 0.0)) throw DomainError("mask weights must be nonnegative");
  }
}

namespace {

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw DomainError("image shapes differ: " + std::to_string(a.width()) + "x" +
                      std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " vs " +
                      std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
                      std::to_string(b.channels()));
  }
}

}  // namespace

double swt_loss(const Image& a, const Image& b, const LossWeights& weights, WaveletFamily family,
                Boundary boundary) {
  weights.validate();
  require_same_shape(a, b);
  Image diff = a;
  {
    auto d = diff.data();
    const auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= bd[i];
  }
  const int levels = static_cast<int>(weights.swt_level_weights.size());
  const SwtPyramid p = swt_forward(diff, levels, family, boundary);
  const double count = 3.0 * static_cast<double>(diff.data().size());
  double total = 0.0;
  for (int j = 0; j < levels; ++j) {
    const auto& level = p.levels[static_cast<std::size_t>(j)];
    const double sum = simd::abs_sum(level.horizontal.data()) +
                       simd::abs_sum(level.vertical.data()) + simd::abs_sum(level.diagonal.data());
    total += weights.swt_level_weights[static_cast<std::size_t>(j)] *
             (weights.sum_norm ? sum : sum / count);
  }
  return total;
}

void StructuralMaskSet::add(Image weights, std::string label) {
  if (weights.channels() != 1) throw DomainError("structural masks are single-channel");
  masks.push_back({std::move(weights), std::move(label)});
}

void StructuralMaskSet::add(const Mask& binary, std::string label) {
  Image w(binary.width, binary.height, 1);
  auto d = w.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = binary.flags[i] ? 1.0 : 0.0;
  add(std::move(w), std::move(label));
}

void StructuralMaskSet::validate() const {
  for (const auto& m : masks) {
    if (m.weights.channels() != 1) throw DomainError("mask '" + m.label + "' is not single-channel");
    if (m.weights.width() != masks.front().weights.width() ||
        m.weights.height() != masks.front().weights.height()) {
      throw DomainError("mask '" + m.label + "' differs in size from the first mask");
    }
    for (const double v : m.weights.data()) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("mask '" + m.label + "' leaves [0, 1]");
    }
  }
}

double mask_loss(const Image& a, const Image& b, const StructuralMaskSet& masks,
                 const LossWeights& weights) {
  require_same_shape(a, b);
  masks.validate();
  if (weights.mask_weights.size() != masks.masks.size()) {
    throw DomainError("got " + std::to_string(weights.mask_weights.size()) +
                      " mask weights for " + std::to_string(masks.masks.size()) + " masks");
  }
  for (const double l : weights.mask_weights) {
    if (!(l >= 0.0)) throw DomainError("mask weights must be nonnegative");
  }
  if (masks.masks.empty()) return 0.0;
  if (masks.masks.front().weights.width() != a.width() ||
      masks.masks.front().weights.height() != a.height()) {
    throw DomainError("mask size does not match the images");
  }
  const std::size_t n = a.pixel_count();
  std::vector<double> scratch(n);
  const auto& k = simd::active();
  double total = 0.0;
  for (std::size_t m = 0; m < masks.masks.size(); ++m) {
    const auto s = masks.masks[m].weights.plane(0);
    double sum = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
      const auto pa = a.plane(c);
      const auto pb = b.plane(c);
      for (std::size_t i = 0; i < n; ++i) scratch[i] = (pa[i] - pb[i]) * s[i];
      sum += k.abs_sum(scratch.data(), n);
    }
    const double count = static_cast<double>(n) * a.channels();
    total += weights.mask_weights[m] * (weights.sum_norm ? sum : sum / count);
  }
  return total;
}

double uncertainty_total(std::span<const double> losses, std::span<const double> logvars) {
  if (losses.size() != logvars.size()) {
    throw DomainError("got " + std::to_string(losses.size()) + " losses but " +
                      std::to_string(logvars.size()) + " log-variances");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    total += std::exp(-logvars[i]) * losses[i] + logvars[i];
  }
  return total;
}

}  // namespace orthoforge
