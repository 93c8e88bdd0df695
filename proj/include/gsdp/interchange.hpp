#pragma once

// Feature-set and classifier-head persistence.
//
// Both binary formats store reals as 32-bit IEEE-754, little-endian. Layouts:
//
//   feature set  "GSFS" u8:version u32:n u32:m
//                n x { u32:label u16:id_len id_bytes m x f32 }
//   head         "GSHP" u8:version u32:n u32:m  n*m x f32 (row-major)  n x f32
//
// CSV variants are header-first (`id,label,f0,...` and `category,bias,w0,...`).
// A feature set may carry a JSON sidecar `<stem>.meta.json` with
// `category_names` and `provenance`; a missing sidecar is not an error.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "gsdp/detail/io.hpp"
#include "gsdp/error.hpp"

namespace gsdp {

using Vector = std::vector<double>;

enum class Format { csv, binary };

/// `.csv` (any case) selects CSV; everything else is binary.
inline Format format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".csv" ? Format::csv : Format::binary;
}

struct ObjectRecord {
  std::string id;
  std::size_t label = 0;
  Vector features;

  bool operator==(const ObjectRecord&) const = default;
};

struct FeatureSet {
  std::size_t m = 0;
  std::vector<ObjectRecord> objects;
  std::vector<std::string> category_names;
  std::vector<std::string> provenance;

  std::size_t size() const { return objects.size(); }

  /// Number of categories implied by names, or by the largest label.
  std::size_t n_categories() const {
    if (!category_names.empty()) return category_names.size();
    std::size_t n = 0;
    for (const auto& o : objects) n = std::max(n, o.label + 1);
    return n;
  }

  /// Throws ValidationError (or DimensionMismatch) naming the offending record.
  void validate() const {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const auto& o = objects[i];
      const auto where = "record " + std::to_string(i);
      if (o.features.size() != m) {
        throw DimensionMismatch(where + ": expected " + std::to_string(m) +
                                " features, got " +
                                std::to_string(o.features.size()));
      }
      for (double v : o.features) {
        if (!std::isfinite(v)) throw ValidationError(where + ": non-finite feature value");
      }
      if (!category_names.empty() && o.label >= category_names.size()) {
        throw ValidationError(where + ": label " + std::to_string(o.label) +
                              " out of range");
      }
      if (o.id.empty() || o.id.find_first_of(",\n\r") != std::string::npos) {
        throw ValidationError(where + ": id must be non-empty without commas or newlines");
      }
      if (!seen.insert(o.id).second) {
        throw ValidationError(where + ": duplicate id '" + o.id + "'");
      }
    }
  }

  bool operator==(const FeatureSet&) const = default;
};

struct HeadParams {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Vector> weights;  // n rows of m
  Vector biases;                // n

  void validate() const {
    if (weights.size() != n || biases.size() != n) {
      throw DimensionMismatch("head: expected " + std::to_string(n) +
                              " weight rows and biases");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i].size() != m) {
        throw DimensionMismatch("head row " + std::to_string(i) + ": expected " +
                                std::to_string(m) + " weights, got " +
                                std::to_string(weights[i].size()));
      }
      for (double w : weights[i]) {
        if (!std::isfinite(w)) throw ValidationError("head row " + std::to_string(i) + ": non-finite weight");
      }
      if (!std::isfinite(biases[i])) throw ValidationError("head row " + std::to_string(i) + ": non-finite bias");
    }
  }

  bool operator==(const HeadParams&) const = default;
};

namespace detail {

inline constexpr std::string_view kFeatureMagic = "GSFS";
inline constexpr std::string_view kHeadMagic = "GSHP";
inline constexpr std::uint8_t kInterchangeVersion = 1;

inline float to_interchange(double v, const std::string& where) {
  const auto f = static_cast<float>(v);
  if (!std::isfinite(f)) throw ValidationError(where + ": value not representable as 32-bit real");
  return f;
}

inline std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError(std::string(what) + " exceeds 32-bit range");
  }
  return static_cast<std::uint32_t>(v);
}

inline double parse_cell(std::string_view cell, const std::string& where) {
  float f = 0;
  if (!parse_real(cell, f)) {
    throw ValidationError(where + ": cannot parse '" + std::string(cell) + "' as a real");
  }
  if (!std::isfinite(f)) throw ValidationError(where + ": non-finite value");
  return static_cast<double>(f);
}

inline void check_columns(const std::vector<std::string_view>& header,
                          std::string_view c0, std::string_view c1,
                          char prefix, const std::string& what) {
  if (header.size() < 2 || header[0] != c0 || header[1] != c1) {
    throw ValidationError(what + ": malformed header, expected '" +
                          std::string(c0) + "," + std::string(c1) + ",...'");
  }
  for (std::size_t j = 2; j < header.size(); ++j) {
    if (header[j] != std::string(1, prefix) + std::to_string(j - 2)) {
      throw ValidationError(what + ": malformed header column " +
                            std::to_string(j + 1) + " '" + std::string(header[j]) + "'");
    }
  }
}

}  // namespace detail

inline std::filesystem::path meta_sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p.replace_extension(".meta.json");
  return p;
}

inline void write_feature_set(const FeatureSet& set, const std::filesystem::path& path,
                              Format format) {
  set.validate();
  if (format == Format::binary) {
    detail::ByteWriter w;
    w.bytes(detail::kFeatureMagic);
    w.u8(detail::kInterchangeVersion);
    w.u32(detail::to_u32(set.objects.size(), "object count"));
    w.u32(detail::to_u32(set.m, "dimension"));
    for (std::size_t i = 0; i < set.objects.size(); ++i) {
      const auto& o = set.objects[i];
      if (o.id.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw ValidationError("record " + std::to_string(i) + ": id too long");
      }
      const auto where = "record " + std::to_string(i);
      w.u32(detail::to_u32(o.label, "label"));
      w.u16(static_cast<std::uint16_t>(o.id.size()));
      w.bytes(o.id);
      for (double v : o.features) w.f32(detail::to_interchange(v, where));
    }
    detail::write_file(path, w.data());
  } else {
    std::string out = "id,label";
    for (std::size_t j = 0; j < set.m; ++j) out += ",f" + std::to_string(j);
    out += '\n';
    for (std::size_t i = 0; i < set.objects.size(); ++i) {
      const auto& o = set.objects[i];
      const auto where = "record " + std::to_string(i);
      out += o.id;
      out += ',';
      out += std::to_string(o.label);
      for (double v : o.features) {
        out += ',';
        out += detail::format_real(detail::to_interchange(v, where));
      }
      out += '\n';
    }
    detail::write_file(path, out);
  }

  const auto meta = meta_sidecar_path(path);
  if (set.category_names.empty() && set.provenance.empty()) {
    std::error_code ec;
    std::filesystem::remove(meta, ec);
  } else {
    nlohmann::json j;
    j["category_names"] = set.category_names;
    j["provenance"] = set.provenance;
    detail::write_file(meta, j.dump(2) + "\n");
  }
}

inline FeatureSet read_feature_set(const std::filesystem::path& path, Format format) {
  FeatureSet set;
  const auto data = detail::read_file(path);
  if (format == Format::binary) {
    detail::ByteReader in(data);
    detail::expect_magic(in, detail::kFeatureMagic, detail::kInterchangeVersion, "feature set");
    const std::uint32_t n = in.u32();
    set.m = in.u32();
    set.objects.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      ObjectRecord o;
      o.label = in.u32();
      o.id = in.bytes(in.u16());
      o.features.resize(set.m);
      for (auto& v : o.features) v = static_cast<double>(in.f32());
      set.objects.push_back(std::move(o));
    }
    if (!in.at_end()) throw ValidationError("feature set: trailing bytes after record " + std::to_string(n));
  } else {
    const auto lines = detail::split_lines(data);
    if (lines.empty()) throw ValidationError("feature set: missing header");
    const auto header = detail::split_csv(lines[0]);
    detail::check_columns(header, "id", "label", 'f', "feature set");
    set.m = header.size() - 2;
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto where = "row " + std::to_string(r);
      const auto cells = detail::split_csv(lines[r]);
      if (cells.size() != header.size()) {
        throw DimensionMismatch(where + ": expected " + std::to_string(set.m) +
                                " feature columns, got " +
                                std::to_string(cells.size() < 2 ? 0 : cells.size() - 2));
      }
      ObjectRecord o;
      o.id = std::string(cells[0]);
      if (!detail::parse_uint(cells[1], o.label)) {
        throw ValidationError(where + ": bad label '" + std::string(cells[1]) + "'");
      }
      o.features.reserve(set.m);
      for (std::size_t j = 2; j < cells.size(); ++j) o.features.push_back(detail::parse_cell(cells[j], where));
      set.objects.push_back(std::move(o));
    }
  }

  const auto meta = meta_sidecar_path(path);
  if (std::filesystem::exists(meta)) {
    try {
      const auto j = nlohmann::json::parse(detail::read_file(meta));
      if (j.contains("category_names")) set.category_names = j.at("category_names").get<std::vector<std::string>>();
      if (j.contains("provenance")) set.provenance = j.at("provenance").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(meta.string() + ": " + e.what());
    }
  }
  set.validate();
  return set;
}

inline void write_head(const HeadParams& head, const std::filesystem::path& path, Format format) {
  head.validate();
  if (format == Format::binary) {
    detail::ByteWriter w;
    w.bytes(detail::kHeadMagic);
    w.u8(detail::kInterchangeVersion);
    w.u32(detail::to_u32(head.n, "category count"));
    w.u32(detail::to_u32(head.m, "dimension"));
    for (std::size_t i = 0; i < head.n; ++i) {
      const auto where = "head row " + std::to_string(i);
      for (double v : head.weights[i]) w.f32(detail::to_interchange(v, where));
    }
    for (std::size_t i = 0; i < head.n; ++i) w.f32(detail::to_interchange(head.biases[i], "head bias " + std::to_string(i)));
    detail::write_file(path, w.data());
    return;
  }
  std::string out = "category,bias";
  for (std::size_t j = 0; j < head.m; ++j) out += ",w" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < head.n; ++i) {
    const auto where = "head row " + std::to_string(i);
    out += std::to_string(i);
    out += ',';
    out += detail::format_real(detail::to_interchange(head.biases[i], where));
    for (double v : head.weights[i]) {
      out += ',';
      out += detail::format_real(detail::to_interchange(v, where));
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

inline HeadParams read_head(const std::filesystem::path& path, Format format) {
  HeadParams head;
  const auto data = detail::read_file(path);
  if (format == Format::binary) {
    detail::ByteReader in(data);
    detail::expect_magic(in, detail::kHeadMagic, detail::kInterchangeVersion, "head");
    head.n = in.u32();
    head.m = in.u32();
    if (in.remaining() != (head.n * head.m + head.n) * 4) {
      throw DimensionMismatch("head: payload size does not match n=" + std::to_string(head.n) +
                              ", m=" + std::to_string(head.m));
    }
    head.weights.assign(head.n, Vector(head.m));
    for (auto& row : head.weights) {
      for (auto& v : row) v = static_cast<double>(in.f32());
    }
    head.biases.resize(head.n);
    for (auto& b : head.biases) b = static_cast<double>(in.f32());
  } else {
    const auto lines = detail::split_lines(data);
    if (lines.empty()) throw ValidationError("head: missing header");
    const auto header = detail::split_csv(lines[0]);
    detail::check_columns(header, "category", "bias", 'w', "head");
    head.m = header.size() - 2;
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto where = "head row " + std::to_string(r);
      const auto cells = detail::split_csv(lines[r]);
      if (cells.size() != header.size()) {
        throw DimensionMismatch(where + ": expected " + std::to_string(head.m) +
                                " weights, got " +
                                std::to_string(cells.size() < 2 ? 0 : cells.size() - 2));
      }
      std::size_t cat = 0;
      if (!detail::parse_uint(cells[0], cat) || cat != r - 1) {
        throw ValidationError(where + ": categories must be listed in order 0..n-1");
      }
      head.biases.push_back(detail::parse_cell(cells[1], where));
      Vector row;
      row.reserve(head.m);
      for (std::size_t j = 2; j < cells.size(); ++j) row.push_back(detail::parse_cell(cells[j], where));
      head.weights.push_back(std::move(row));
    }
    head.n = head.weights.size();
  }
  head.validate();
  return head;
}

}  // namespace gsdp
