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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace orthoforge {

enum class LatentDomain { kUnspecified, kQuery, kReference };

/// Raw latent from an upstream encoder; values are row-major.
struct LatentTensor {
  std::string id;
  std::string class_label;
  std::vector<std::size_t> shape;  // (C, H, W) or (dim)
  std::vector<float> values;
  LatentDomain domain = LatentDomain::kUnspecified;

  /// Value count matches the shape and every value is finite.
  void validate() const;
};

/// Unit-norm retrieval descriptor.
struct Descriptor {
  std::string id;
  std::vector<float> vector;
  std::string class_label;
};

/// Flatten then L2-normalize. Throws DomainError for a zero tensor.
Descriptor readout(const LatentTensor& t);

/// Dot product of unit vectors in double precision, clamped to [-1, 1].
double cosine_sim(const Descriptor& a, const Descriptor& b);

/// Ordered descriptors with unique ids and a common dimension.
class DescriptorSet {
 public:
  /// Throws FormatError on a duplicate id and DomainError on a dimension
  /// mismatch.
  void add(Descriptor d);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const Descriptor& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Descriptor>& descriptors() const noexcept { return items_; }
  std::optional<std::size_t> find(const std::string& id) const;

  /// Free-form producer metadata (for example the diffusion timestep).
  std::map<std::string, std::string> metadata;

 private:
  std::vector<Descriptor> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
};

struct Ranking {
  std::vector<std::uint32_t> order;  // reference indices, best first
  std::vector<double> scores;        // cosine similarity per rank
};

/// Every reference for every query by descending similarity; exact ties go to
/// the lexicographically smaller reference id. Independent of `threads`.
std::vector<Ranking> rank_all(const DescriptorSet& queries, const DescriptorSet& references,
                              int threads = 1);

/// relevance[q][k] is 1 when rank k + 1 of query q shares the query's label.
using RelevanceLists = std::vector<std::vector<std::uint8_t>>;
RelevanceLists relevance(std::span<const Ranking> rankings, const DescriptorSet& queries,
                         const DescriptorSet& references);

/// Percentage of queries with a relevant item in the top k. Queries without
/// any relevant item are skipped; throws DomainError if k < 1 or no query
/// remains.
double recall_at_k(const RelevanceLists& rel, int k);

/// Non-interpolated AP of one query in percent; nullopt without positives.
std::optional<double> query_average_precision(std::span<const std::uint8_t> rel);

/// Mean AP over queries with positives, in percent.
double average_precision(const RelevanceLists& rel);

struct QueryOutcome {
  std::string id;
  std::string class_label;
  std::size_t positives = 0;
  std::size_t first_positive_rank = 0;  // 1-based
  double average_precision = 0.0;       // percent
  std::string top_reference;
};

struct RetrievalReport {
  std::string direction;
  std::map<int, double> recall_at;
  double ap_mean = 0.0;
  std::vector<QueryOutcome> per_query;
  std::vector<std::string> excluded_queries;
  std::map<std::string, std::string> metadata;

  /// JSON object with direction, recall_at, ap_mean, per_query,
  /// excluded_queries and metadata.
  std::string to_json() const;
};

RetrievalReport evaluate_retrieval(const DescriptorSet& queries, const DescriptorSet& references,
                                   std::span<const int> ks, const std::string& direction,
                                   int threads = 1);

// Descriptor packs --------------------------------------------------------

/// Writes a pack of unit descriptors (normalized flag set). Metadata, if any,
/// goes to an optional trailer.
void save_descriptor_pack(const DescriptorSet& set, const std::filesystem::path& path);

/// Writes raw latents (normalized flag clear); they are normalized on load.
void save_latent_pack(std::span<const LatentTensor> latents, const std::filesystem::path& path,
                      const std::map<std::string, std::string>& metadata = {});

/// Throws FormatError on bad magic, version, duplicate ids or non-finite
/// values and IoError on truncation.
DescriptorSet load_descriptor_pack(const std::filesystem::path& path);

/// Rows "id,class_label" plus a headerless little-endian float32 matrix with
/// one row per label row. Rows are normalized on load.
DescriptorSet load_descriptor_csv(const std::filesystem::path& labels_csv,
                                  const std::filesystem::path& matrix);

}  // namespace orthoforge
