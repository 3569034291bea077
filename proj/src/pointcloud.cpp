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

#include "orthoforge/pointcloud.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "orthoforge/error.hpp"

namespace orthoforge {

void ColoredPointCloud::validate() const {
  if (points.size() != colors.size()) {
    throw DomainError("point cloud has " + std::to_string(points.size()) +
                      " positions but " + std::to_string(colors.size()) + " colors");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw DomainError("point cloud contains a non-finite coordinate");
  }
}

Aabb bounding_box(const ColoredPointCloud& cloud) {
  if (cloud.empty()) throw DomainError("bounding box of an empty cloud");
  Aabb box;
  box.min_corner = cloud.points.front();
  box.max_corner = cloud.points.front();
  for (const auto& p : cloud.points) {
    box.min_corner = box.min_corner.cwiseMin(p);
    box.max_corner = box.max_corner.cwiseMax(p);
  }
  box.diagonal = (box.max_corner - box.min_corner).norm();
  return box;
}

namespace {

enum class ScalarType { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::kI8;
  if (name == "uchar" || name == "uint8") return ScalarType::kU8;
  if (name == "short" || name == "int16") return ScalarType::kI16;
  if (name == "ushort" || name == "uint16") return ScalarType::kU16;
  if (name == "int" || name == "int32") return ScalarType::kI32;
  if (name == "uint" || name == "uint32") return ScalarType::kU32;
  if (name == "float" || name == "float32") return ScalarType::kF32;
  if (name == "double" || name == "float64") return ScalarType::kF64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::kI8:
    case ScalarType::kU8:
      return 1;
    case ScalarType::kI16:
    case ScalarType::kU16:
      return 2;
    case ScalarType::kI32:
    case ScalarType::kU32:
    case ScalarType::kF32:
      return 4;
    case ScalarType::kF64:
      return 8;
  }
  return 0;
}

template <typename T>
T load_le(const unsigned char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  return value;
}

double read_binary_scalar(ScalarType t, const unsigned char* p) {
  switch (t) {
    case ScalarType::kI8:
      return load_le<std::int8_t>(p);
    case ScalarType::kU8:
      return load_le<std::uint8_t>(p);
    case ScalarType::kI16:
      return load_le<std::int16_t>(p);
    case ScalarType::kU16:
      return load_le<std::uint16_t>(p);
    case ScalarType::kI32:
      return load_le<std::int32_t>(p);
    case ScalarType::kU32:
      return load_le<std::uint32_t>(p);
    case ScalarType::kF32:
      return load_le<float>(p);
    case ScalarType::kF64:
      return load_le<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kF32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kU8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

enum class PlyFormat { kAscii, kBinaryLittleEndian };

struct Header {
  PlyFormat format = PlyFormat::kAscii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

[[noreturn]] void header_error(const std::filesystem::path& path, int line,
                               const std::string& what) {
  throw FormatError("PLY parse error in " + path.string() + " at header line " +
                    std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

Header parse_header(const std::string& bytes, const std::filesystem::path& path) {
  Header header;
  std::size_t pos = 0;
  int line_no = 0;
  bool saw_format = false;
  while (true) {
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string::npos) header_error(path, line_no + 1, "missing end_header");
    std::string_view line(bytes.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto tokens = split_ws(line);
    if (line_no == 1) {
      if (tokens.size() != 1 || tokens[0] != "ply") header_error(path, 1, "missing 'ply' magic");
      continue;
    }
    if (tokens.empty()) continue;
    const auto keyword = tokens[0];
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "end_header") break;
    if (keyword == "format") {
      if (tokens.size() != 3) header_error(path, line_no, "format line needs 2 fields");
      if (tokens[1] == "ascii") {
        header.format = PlyFormat::kAscii;
      } else if (tokens[1] == "binary_little_endian") {
        header.format = PlyFormat::kBinaryLittleEndian;
      } else if (tokens[1] == "binary_big_endian") {
        throw FormatError("PLY " + path.string() +
                          ": binary_big_endian is not supported (use ascii or "
                          "binary_little_endian)");
      } else {
        header_error(path, line_no, "unknown format '" + std::string(tokens[1]) + "'");
      }
      saw_format = true;
      continue;
    }
    if (keyword == "element") {
      if (tokens.size() != 3) header_error(path, line_no, "element line needs name and count");
      Element element;
      element.name = std::string(tokens[1]);
      std::size_t count = 0;
      const auto res = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count);
      if (res.ec != std::errc() || res.ptr != tokens[2].data() + tokens[2].size()) {
        header_error(path, line_no, "bad element count '" + std::string(tokens[2]) + "'");
      }
      element.count = count;
      header.elements.push_back(std::move(element));
      continue;
    }
    if (keyword == "property") {
      if (header.elements.empty()) header_error(path, line_no, "property before any element");
      Property prop;
      if (tokens.size() == 5 && tokens[1] == "list") {
        const auto count_type = parse_scalar_type(tokens[2]);
        const auto item_type = parse_scalar_type(tokens[3]);
        if (!count_type || !item_type) header_error(path, line_no, "bad list property types");
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
        prop.name = std::string(tokens[4]);
      } else if (tokens.size() == 3) {
        const auto type = parse_scalar_type(tokens[1]);
        if (!type) header_error(path, line_no, "unknown property type '" + std::string(tokens[1]) + "'");
        prop.type = *type;
        prop.name = std::string(tokens[2]);
      } else {
        header_error(path, line_no, "malformed property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
      continue;
    }
    header_error(path, line_no, "unexpected keyword '" + std::string(keyword) + "'");
  }
  if (!saw_format) header_error(path, line_no, "missing format line");
  header.body_offset = pos;
  return header;
}

struct VertexLayout {
  int x = -1, y = -1, z = -1, r = -1, g = -1, b = -1;
};

VertexLayout resolve_vertex_layout(const Element& vertex, const std::filesystem::path& path) {
  VertexLayout layout;
  for (int i = 0; i < static_cast<int>(vertex.properties.size()); ++i) {
    const auto& p = vertex.properties[i];
    if (p.is_list) continue;
    if (p.name == "x") layout.x = i;
    if (p.name == "y") layout.y = i;
    if (p.name == "z") layout.z = i;
    if (p.name == "red") layout.r = i;
    if (p.name == "green") layout.g = i;
    if (p.name == "blue") layout.b = i;
  }
  const auto require = [&](int index, const char* name, bool coordinate) {
    if (index < 0) {
      throw FormatError("PLY schema error in " + path.string() +
                        ": vertex element lacks property '" + name + "'");
    }
    const auto type = vertex.properties[index].type;
    const bool ok = coordinate ? (type == ScalarType::kF32 || type == ScalarType::kF64)
                               : type == ScalarType::kU8;
    if (!ok) {
      throw FormatError("PLY schema error in " + path.string() + ": property '" + name +
                        (coordinate ? "' must be float or double" : "' must be uchar"));
    }
  };
  require(layout.x, "x", true);
  require(layout.y, "y", true);
  require(layout.z, "z", true);
  require(layout.r, "red", false);
  require(layout.g, "green", false);
  require(layout.b, "blue", false);
  return layout;
}

void accept_vertex(PlyLoadResult& result, const double* values, const VertexLayout& layout) {
  const Vec3 p(values[layout.x], values[layout.y], values[layout.z]);
  if (!p.allFinite()) {
    ++result.dropped_nonfinite;
    return;
  }
  result.cloud.push_back(p, Rgb8{static_cast<std::uint8_t>(values[layout.r]),
                                 static_cast<std::uint8_t>(values[layout.g]),
                                 static_cast<std::uint8_t>(values[layout.b])});
}

[[noreturn]] void truncated(const std::filesystem::path& path, std::size_t expected,
                            std::size_t actual) {
  throw IoError("PLY " + path.string() + " is truncated: expected at least " +
                std::to_string(expected) + " body bytes, found " + std::to_string(actual));
}

void read_binary_body(const std::string& bytes, const Header& header,
                      const std::filesystem::path& path, PlyLoadResult& result) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t body_size = bytes.size() - header.body_offset;
  std::size_t offset = header.body_offset;
  const std::size_t end = bytes.size();
  const auto need = [&](std::size_t n) {
    if (offset + n > end) truncated(path, offset + n - header.body_offset, body_size);
  };
  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    const bool has_lists = std::any_of(element.properties.begin(), element.properties.end(),
                                       [](const Property& p) { return p.is_list; });
    if (!is_vertex && !has_lists) {
      std::size_t stride = 0;
      for (const auto& p : element.properties) stride += scalar_size(p.type);
      need(stride * element.count);
      offset += stride * element.count;
      continue;
    }
    VertexLayout layout;
    if (is_vertex) {
      layout = resolve_vertex_layout(element, path);
      result.declared_vertices = element.count;
      result.cloud.reserve(element.count);
    }
    std::vector<double> values(element.properties.size(), 0.0);
    for (std::size_t i = 0; i < element.count; ++i) {
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& p = element.properties[k];
        if (p.is_list) {
          need(scalar_size(p.count_type));
          const auto n = static_cast<std::size_t>(read_binary_scalar(p.count_type, data + offset));
          offset += scalar_size(p.count_type);
          need(n * scalar_size(p.type));
          offset += n * scalar_size(p.type);
        } else {
          need(scalar_size(p.type));
          values[k] = read_binary_scalar(p.type, data + offset);
          offset += scalar_size(p.type);
        }
      }
      if (is_vertex) accept_vertex(result, values.data(), layout);
    }
  }
}

void read_ascii_body(const std::string& bytes, const Header& header,
                     const std::filesystem::path& path, PlyLoadResult& result) {
  std::size_t pos = header.body_offset;
  std::size_t line_index = 0;
  const auto next_line = [&]() -> std::optional<std::string_view> {
    while (pos < bytes.size()) {
      std::size_t eol = bytes.find('\n', pos);
      if (eol == std::string::npos) eol = bytes.size();
      std::string_view line(bytes.data() + pos, eol - pos);
      pos = eol + 1;
      ++line_index;
      if (!split_ws(line).empty()) return line;
    }
    return std::nullopt;
  };
  std::size_t expected_lines = 0;
  for (const auto& e : header.elements) expected_lines += e.count;
  std::size_t seen_lines = 0;
  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    VertexLayout layout;
    if (is_vertex) {
      layout = resolve_vertex_layout(element, path);
      result.declared_vertices = element.count;
      result.cloud.reserve(element.count);
    }
    std::vector<double> values(element.properties.size(), 0.0);
    for (std::size_t i = 0; i < element.count; ++i) {
      const auto line = next_line();
      if (!line) {
        throw IoError("PLY " + path.string() + " is truncated: expected " +
                      std::to_string(expected_lines) + " data lines, found " +
                      std::to_string(seen_lines));
      }
      ++seen_lines;
      if (!is_vertex) continue;
      const auto tokens = split_ws(*line);
      std::size_t t = 0;
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& p = element.properties[k];
        if (p.is_list) {
          if (t >= tokens.size()) break;
          std::size_t n = 0;
          std::from_chars(tokens[t].data(), tokens[t].data() + tokens[t].size(), n);
          t += 1 + n;
          continue;
        }
        if (t >= tokens.size()) {
          throw FormatError("PLY " + path.string() + ": vertex " + std::to_string(i) +
                            " has too few values");
        }
        const auto tok = tokens[t++];
        double v = 0.0;
        if (tok == "nan" || tok == "NaN" || tok == "-nan") {
          v = std::nan("");
        } else if (tok == "inf" || tok == "Inf") {
          v = HUGE_VAL;
        } else if (tok == "-inf" || tok == "-Inf") {
          v = -HUGE_VAL;
        } else {
          const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
          if (res.ec != std::errc() && res.ec != std::errc::result_out_of_range) {
            throw FormatError("PLY " + path.string() + ": bad number '" + std::string(tok) +
                              "' in vertex " + std::to_string(i));
          }
        }
        values[k] = v;
      }
      accept_vertex(result, values.data(), layout);
    }
  }
}

}  // namespace

PlyLoadResult load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const Header header = parse_header(bytes, path);
  const bool has_vertex = std::any_of(header.elements.begin(), header.elements.end(),
                                      [](const Element& e) { return e.name == "vertex"; });
  if (!has_vertex) {
    throw FormatError("PLY schema error in " + path.string() + ": no 'vertex' element");
  }
  PlyLoadResult result;
  if (header.format == PlyFormat::kAscii) {
    read_ascii_body(bytes, header, path, result);
  } else {
    read_binary_body(bytes, header, path, result);
  }
  return result;
}

void save_ply(const ColoredPointCloud& cloud, const std::filesystem::path& path) {
  cloud.validate();
  std::ostringstream head;
  head << "ply\nformat binary_little_endian 1.0\n"
       << "element vertex " << cloud.size() << "\n"
       << "property float x\nproperty float y\nproperty float z\n"
       << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
       << "end_header\n";
  std::string out = head.str();
  const std::size_t header_size = out.size();
  constexpr std::size_t kStride = 3 * sizeof(float) + 3;
  out.resize(header_size + kStride * cloud.size());
  char* dst = out.data() + header_size;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(cloud.points[i][axis]));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      std::memcpy(dst, &bits, sizeof(bits));
      dst += sizeof(bits);
    }
    *dst++ = static_cast<char>(cloud.colors[i].r);
    *dst++ = static_cast<char>(cloud.colors[i].g);
    *dst++ = static_cast<char>(cloud.colors[i].b);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

}  // namespace orthoforge
