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


#include "orthoforge/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "orthoforge/error.hpp"
#include "orthoforge/parallel.hpp"
#include "orthoforge/simd/kernels.hpp"

namespace orthoforge {

void LatentTensor::validate() const {
  const std::size_t expected = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                               std::multiplies<>());
  if (shape.empty() || expected != values.size()) {
    throw DomainError("latent '" + id + "' has " + std::to_string(values.size()) +
                      " values but its shape holds " + std::to_string(shape.empty() ? 0 : expected));
  }
  for (const float v : values) {
    if (!std::isfinite(v)) throw DomainError("latent '" + id + "' has a non-finite value");
  }
}

Descriptor readout(const LatentTensor& t) {
  t.validate();
  double ss = 0.0;
  for (const float v : t.values) ss += static_cast<double>(v) * v;
  if (!(ss > 0.0)) {
    throw DomainError("cannot normalize latent '" + t.id + "': it is all zeros");
  }
  const double inv = 1.0 / std::sqrt(ss);
  Descriptor d{t.id, std::vector<float>(t.values.size()), t.class_label};
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    d.vector[i] = static_cast<float>(t.values[i] * inv);
  }
  return d;
}

double cosine_sim(const Descriptor& a, const Descriptor& b) {
  if (a.vector.size() != b.vector.size()) {
    throw DomainError("descriptor dimensions differ: " + std::to_string(a.vector.size()) +
                      " vs " + std::to_string(b.vector.size()));
  }
  return std::clamp(simd::dot(a.vector, b.vector), -1.0, 1.0);
}

void DescriptorSet::add(Descriptor d) {
  if (d.vector.empty()) throw DomainError("descriptor '" + d.id + "' is empty");
  if (!items_.empty() && d.vector.size() != dim_) {
    throw DomainError("descriptor '" + d.id + "' has dimension " +
                      std::to_string(d.vector.size()) + ", expected " + std::to_string(dim_));
  }
  if (index_.contains(d.id)) throw FormatError("schema: duplicate descriptor id '" + d.id + "'");
  dim_ = d.vector.size();
  index_.emplace(d.id, items_.size());
  items_.push_back(std::move(d));
}

std::optional<std::size_t> DescriptorSet::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Ranking> rank_all(const DescriptorSet& queries, const DescriptorSet& references,
                              int threads) {
  if (references.empty()) throw DomainError("reference set is empty");
  if (!queries.empty() && queries.dim() != references.dim()) {
    throw DomainError("query dimension " + std::to_string(queries.dim()) +
                      " differs from reference dimension " + std::to_string(references.dim()));
  }
  std::vector<Ranking> out(queries.size());
  const std::size_t nref = references.size();
  parallel_for(queries.size(), threads, [&](std::size_t q) {
    std::vector<double> sim(nref);
    for (std::size_t r = 0; r < nref; ++r) sim[r] = cosine_sim(queries[q], references[r]);
    Ranking& rk = out[q];
    rk.order.resize(nref);
    std::iota(rk.order.begin(), rk.order.end(), 0U);
    std::sort(rk.order.begin(), rk.order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (sim[a] != sim[b]) return sim[a] > sim[b];
      return references[a].id < references[b].id;
    });
    rk.scores.resize(nref);
    for (std::size_t k = 0; k < nref; ++k) rk.scores[k] = sim[rk.order[k]];
  });
  return out;
}

RelevanceLists relevance(std::span<const Ranking> rankings, const DescriptorSet& queries,
                         const DescriptorSet& references) {
  if (rankings.size() != queries.size()) {
    throw DomainError("ranking count does not match the query count");
  }
  RelevanceLists rel(rankings.size());
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    const auto& label = queries[q].class_label;
    rel[q].reserve(rankings[q].order.size());
    for (const auto r : rankings[q].order) {
      rel[q].push_back(references[r].class_label == label ? 1 : 0);
    }
  }
  return rel;
}

double recall_at_k(const RelevanceLists& rel, int k) {
  if (k < 1) throw DomainError("K must be at least 1, got " + std::to_string(k));
  std::size_t valid = 0;
  std::size_t hits = 0;
  for (const auto& r : rel) {
    if (std::find(r.begin(), r.end(), 1) == r.end()) continue;
    ++valid;
    const auto top = r.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(k, r.size()));
    if (std::find(r.begin(), top, 1) != top) ++hits;
  }
  if (valid == 0) throw DomainError("no query has a relevant reference");
  return 100.0 * static_cast<double>(hits) / static_cast<double>(valid);
}

std::optional<double> query_average_precision(std::span<const std::uint8_t> rel) {
  std::size_t found = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < rel.size(); ++k) {
    if (!rel[k]) continue;
    ++found;
    sum += static_cast<double>(found) / static_cast<double>(k + 1);
  }
  if (found == 0) return std::nullopt;
  return 100.0 * sum / static_cast<double>(found);
}

double average_precision(const RelevanceLists& rel) {
  std::size_t valid = 0;
  double sum = 0.0;
  for (const auto& r : rel) {
    if (const auto ap = query_average_precision(r)) {
      sum += *ap;
      ++valid;
    }
  }
  if (valid == 0) throw DomainError("no query has a relevant reference");
  return sum / static_cast<double>(valid);
}

std::string RetrievalReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["direction"] = direction;
  nlohmann::ordered_json recall = nlohmann::ordered_json::object();
  for (const auto& [k, v] : recall_at) recall[std::to_string(k)] = v;
  j["recall_at"] = recall;
  j["ap_mean"] = ap_mean;
  j["per_query"] = nlohmann::ordered_json::array();
  for (const auto& q : per_query) {
    j["per_query"].push_back({{"id", q.id},
                              {"class_label", q.class_label},
                              {"positives", q.positives},
                              {"first_positive_rank", q.first_positive_rank},
                              {"ap", q.average_precision},
                              {"top_reference", q.top_reference}});
  }
  j["excluded_queries"] = excluded_queries;
  j["metadata"] = metadata;
  return j.dump(2);
}

RetrievalReport evaluate_retrieval(const DescriptorSet& queries, const DescriptorSet& references,
                                   std::span<const int> ks, const std::string& direction,
                                   int threads) {
  const auto rankings = rank_all(queries, references, threads);
  RelevanceLists rel = relevance(rankings, queries, references);
  RetrievalReport report;
  report.direction = direction;
  for (const auto& [key, value] : references.metadata) report.metadata["references." + key] = value;
  for (const auto& [key, value] : queries.metadata) report.metadata["queries." + key] = value;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto ap = query_average_precision(rel[q]);
    if (!ap) {
      report.excluded_queries.push_back(queries[q].id);
      continue;
    }
    QueryOutcome o;
    o.id = queries[q].id;
    o.class_label = queries[q].class_label;
    o.positives = static_cast<std::size_t>(std::count(rel[q].begin(), rel[q].end(), 1));
    o.first_positive_rank =
        static_cast<std::size_t>(std::find(rel[q].begin(), rel[q].end(), 1) - rel[q].begin()) + 1;
    o.average_precision = *ap;
    o.top_reference = references[rankings[q].order.front()].id;
    report.per_query.push_back(std::move(o));
  }
  for (const int k : ks) report.recall_at[k] = recall_at_k(rel, k);
  report.ap_mean = average_precision(rel);
  return report;
}

// ---------------------------------------------------------------------------
// Pack I/O

namespace {

constexpr char kMagic[8] = {'U', 'A', 'V', 'D', 'E', 'S', 'C', '1'};
constexpr char kMetaTag[4] = {'M', 'E', 'T', 'A'};
constexpr std::uint16_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    static_assert(std::endian::native == std::endian::little);
    const auto* p = reinterpret_cast<const char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  void put_string(const std::string& s, const char* what) {
    if (s.size() > 0xFFFF) throw DomainError(std::string(what) + " longer than 65535 bytes");
    put(static_cast<std::uint16_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  void flush(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
  }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  template <typename T>
  T get(const char* what) {
    T v;
    need(sizeof(T), what);
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string(const char* what) {
    const auto n = get<std::uint16_t>(what);
    need(n, what);
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  void get_floats(float* out, std::size_t n, const char* what) {
    need(n * sizeof(float), what);
    std::memcpy(out, bytes_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const char* cursor() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw IoError(path_ + ": truncated while reading " + what + " at byte " +
                    std::to_string(pos_) + " (need " + std::to_string(n) + ", have " +
                    std::to_string(remaining()) + ")");
    }
  }

  std::vector<char> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_header(Writer& w, bool normalized, std::size_t count, std::size_t dim) {
  w.put_bytes(kMagic, sizeof kMagic);
  w.put(kVersion);
  w.put(static_cast<std::uint8_t>(normalized ? 1 : 0));
  w.put(std::uint8_t{0});
  w.put(static_cast<std::uint32_t>(count));
  w.put(static_cast<std::uint32_t>(dim));
}

void write_metadata(Writer& w, const std::map<std::string, std::string>& metadata) {
  if (metadata.empty()) return;
  std::string text;
  for (const auto& [k, v] : metadata) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw DomainError("metadata entry '" + k + "' contains '=' or a newline");
    }
    text += k + "=" + v + "\n";
  }
  w.put_bytes(kMetaTag, sizeof kMetaTag);
  w.put(static_cast<std::uint32_t>(text.size()));
  w.put_bytes(text.data(), text.size());
}

}  // namespace

void save_descriptor_pack(const DescriptorSet& set, const std::filesystem::path& path) {
  Writer w;
  write_header(w, true, set.size(), set.dim());
  for (const auto& d : set.descriptors()) {
    w.put_string(d.id, "id");
    w.put_string(d.class_label, "label");
    w.put_bytes(reinterpret_cast<const char*>(d.vector.data()), d.vector.size() * sizeof(float));
  }
  write_metadata(w, set.metadata);
  w.flush(path);
}

void save_latent_pack(std::span<const LatentTensor> latents, const std::filesystem::path& path,
                      const std::map<std::string, std::string>& metadata) {
  const std::size_t dim = latents.empty() ? 0 : latents.front().values.size();
  Writer w;
  write_header(w, false, latents.size(), dim);
  for (const auto& t : latents) {
    t.validate();
    if (t.values.size() != dim) throw DomainError("latents in one pack must share a size");
    w.put_string(t.id, "id");
    w.put_string(t.class_label, "label");
    w.put_bytes(reinterpret_cast<const char*>(t.values.data()), t.values.size() * sizeof(float));
  }
  write_metadata(w, metadata);
  w.flush(path);
}

DescriptorSet load_descriptor_pack(const std::filesystem::path& path) {
  const std::string name = path.string();
  Reader r(slurp(path), name);
  char magic[8];
  for (char& c : magic) c = r.get<char>("magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError(name + ": not a descriptor pack (bad magic)");
  }
  const auto version = r.get<std::uint16_t>("version");
  if (version != kVersion) {
    throw FormatError(name + ": unsupported pack version " + std::to_string(version));
  }
  const bool normalized = r.get<std::uint8_t>("normalized flag") != 0;
  r.get<std::uint8_t>("reserved byte");
  const auto count = r.get<std::uint32_t>("count");
  const auto dim = r.get<std::uint32_t>("dim");
  if (count > 0 && dim == 0) throw FormatError(name + ": schema: dimension is zero");

  DescriptorSet set;
  std::vector<float> values(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    LatentTensor t;
    t.id = r.get_string("id");
    t.class_label = r.get_string("label");
    r.get_floats(values.data(), dim, "descriptor values");
    for (const float v : values) {
      if (!std::isfinite(v)) throw FormatError(name + ": record '" + t.id + "' is not finite");
    }
    if (set.find(t.id)) throw FormatError(name + ": schema: duplicate id '" + t.id + "'");
    if (normalized) {
      double ss = 0.0;
      for (const float v : values) ss += static_cast<double>(v) * v;
      if (std::fabs(std::sqrt(ss) - 1.0) > 1e-5) {
        throw FormatError(name + ": record '" + t.id + "' is flagged normalized but has norm " +
                          std::to_string(std::sqrt(ss)));
      }
      set.add(Descriptor{std::move(t.id), values, std::move(t.class_label)});
    } else {
      t.shape = {dim};
      t.values = values;
      set.add(readout(t));
    }
  }
  if (r.remaining() >= sizeof kMetaTag && std::memcmp(r.cursor(), kMetaTag, sizeof kMetaTag) == 0) {
    r.skip(sizeof kMetaTag);
    const auto len = r.get<std::uint32_t>("metadata length");
    if (r.remaining() < len) throw IoError(name + ": truncated metadata trailer");
    std::istringstream text(std::string(r.cursor(), len));
    r.skip(len);
    std::string line;
    while (std::getline(text, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError(name + ": malformed metadata line '" + line + "'");
      set.metadata[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  if (r.remaining() != 0) {
    throw FormatError(name + ": " + std::to_string(r.remaining()) + " unexpected trailing bytes");
  }
  return set;
}

DescriptorSet load_descriptor_csv(const std::filesystem::path& labels_csv,
                                  const std::filesystem::path& matrix) {
  std::ifstream in(labels_csv);
  if (!in) throw IoError("cannot open '" + labels_csv.string() + "'");
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw FormatError(labels_csv.string() + ":" + std::to_string(line_no) +
                        ": expected id,class_label");
    }
    if (line_no == 1 && line == "id,class_label") continue;
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  if (rows.empty()) throw FormatError(labels_csv.string() + ": no rows");
  const std::vector<char> bytes = slurp(matrix);
  const std::size_t floats = bytes.size() / sizeof(float);
  if (bytes.size() % sizeof(float) != 0 || floats % rows.size() != 0 || floats == 0) {
    throw FormatError(matrix.string() + ": " + std::to_string(bytes.size()) +
                      " bytes do not form a float32 matrix with " + std::to_string(rows.size()) +
                      " rows");
  }
  const std::size_t dim = floats / rows.size();
  DescriptorSet set;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    LatentTensor t;
    t.id = rows[i].first;
    t.class_label = rows[i].second;
    t.shape = {dim};
    t.values.resize(dim);
    std::memcpy(t.values.data(), bytes.data() + i * dim * sizeof(float), dim * sizeof(float));
    for (const float v : t.values) {
      if (!std::isfinite(v)) throw FormatError(matrix.string() + ": row " + std::to_string(i) + " is not finite");
    }
    set.add(readout(t));
  }
  return set;
}

}  // namespace orthoforge
