#pragma once

// On-disk formats for prototype stores and signatures (little-endian).
//
//   prototypes  "GSPT" u8:version u32:count u32:m
//               count x { u32:category u32:n_typical f64:bias
//                         m x f64 mean, m x f64 stddev, m x f64 omega }
//   signatures  "GSSG" u8:version u32:count
//               count x { u8:taxonomy u32:category u32:r u32:m u32:m_padded
//                         u32:p u32:q u16:id_len id_bytes  len x f32 }
//
// with len = 2 * (m_padded / r^2) * 8. Signature CSV is one row per signature:
// `id,taxonomy,category,r,m,m_padded,p,q,s0,...`.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gsdp/descriptor.hpp"
#include "gsdp/detail/io.hpp"
#include "gsdp/interchange.hpp"
#include "gsdp/prototype.hpp"

namespace gsdp {

namespace detail {
inline constexpr std::string_view kPrototypeMagic = "GSPT";
inline constexpr std::string_view kSignatureMagic = "GSSG";
inline constexpr std::uint8_t kStoreVersion = 1;
}  // namespace detail

inline void write_prototypes(const PrototypeStore& store, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.bytes(detail::kPrototypeMagic);
  w.u8(detail::kStoreVersion);
  w.u32(detail::to_u32(store.size(), "prototype count"));
  w.u32(detail::to_u32(store.dim(), "dimension"));
  for (const auto& [cat, p] : store) {
    w.u32(detail::to_u32(cat, "category"));
    w.u32(detail::to_u32(p.n_typical, "n_typical"));
    w.f64(p.bias);
    for (double v : p.mean) w.f64(v);
    for (double v : p.stddev) w.f64(v);
    for (double v : p.omega) w.f64(v);
  }
  detail::write_file(path, w.data());
}

inline PrototypeStore read_prototypes(const std::filesystem::path& path) {
  detail::ByteReader in(detail::read_file(path));
  detail::expect_magic(in, detail::kPrototypeMagic, detail::kStoreVersion, "prototype store");
  const std::uint32_t count = in.u32();
  const std::uint32_t m = in.u32();
  PrototypeStore store(m);
  for (std::uint32_t i = 0; i < count; ++i) {
    SemanticPrototype p;
    p.category = in.u32();
    p.n_typical = in.u32();
    p.bias = in.f64();
    for (Vector* v : {&p.mean, &p.stddev, &p.omega}) {
      v->resize(m);
      for (auto& x : *v) x = in.f64();
    }
    store.insert(std::move(p));
  }
  if (!in.at_end()) throw ValidationError("prototype store: trailing bytes");
  return store;
}

inline void write_signatures(const std::vector<Signature>& sigs, const std::filesystem::path& path,
                             Format format) {
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    sigs[i].config.validate();
    detail::require_dim(sigs[i].values.size(), sigs[i].config.signature_length(),
                        ("signature " + std::to_string(i)).c_str());
    if (sigs[i].id.find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("signature " + std::to_string(i) + ": id contains a comma or newline");
    }
  }
  if (format == Format::binary) {
    detail::ByteWriter w;
    w.bytes(detail::kSignatureMagic);
    w.u8(detail::kStoreVersion);
    w.u32(detail::to_u32(sigs.size(), "signature count"));
    for (std::size_t i = 0; i < sigs.size(); ++i) {
      const auto& s = sigs[i];
      w.u8(static_cast<std::uint8_t>(s.taxonomy));
      w.u32(detail::to_u32(s.category, "category"));
      for (auto v : {s.config.r, s.config.m, s.config.m_padded, s.config.p, s.config.q}) {
        w.u32(detail::to_u32(v, "config"));
      }
      if (s.id.size() > 0xFFFF) throw ValidationError("signature id too long");
      w.u16(static_cast<std::uint16_t>(s.id.size()));
      w.bytes(s.id);
      const auto where = "signature " + std::to_string(i);
      for (double v : s.values) w.f32(detail::to_interchange(v, where));
    }
    detail::write_file(path, w.data());
    return;
  }
  if (!sigs.empty()) {
    for (const auto& s : sigs) {
      if (s.values.size() != sigs.front().values.size()) {
        throw DimensionMismatch("signature CSV requires a uniform signature length");
      }
    }
  }
  const std::size_t len = sigs.empty() ? 0 : sigs.front().values.size();
  std::string out = "id,taxonomy,category,r,m,m_padded,p,q";
  for (std::size_t k = 0; k < len; ++k) out += ",s" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    const auto& s = sigs[i];
    const auto where = "signature " + std::to_string(i);
    out += s.id + ',' + to_string(s.taxonomy) + ',' + std::to_string(s.category);
    for (auto v : {s.config.r, s.config.m, s.config.m_padded, s.config.p, s.config.q}) {
      out += ',' + std::to_string(v);
    }
    for (double v : s.values) {
      out += ',';
      out += detail::format_real(detail::to_interchange(v, where));
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

inline std::vector<Signature> read_signatures(const std::filesystem::path& path, Format format) {
  std::vector<Signature> sigs;
  const auto data = detail::read_file(path);
  if (format == Format::binary) {
    detail::ByteReader in(data);
    detail::expect_magic(in, detail::kSignatureMagic, detail::kStoreVersion, "signatures");
    const std::uint32_t count = in.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      Signature s;
      const auto tax = in.u8();
      if (tax > 2) throw ValidationError("signature " + std::to_string(i) + ": bad taxonomy byte");
      s.taxonomy = static_cast<Taxonomy>(tax);
      s.category = in.u32();
      s.config.r = in.u32();
      s.config.m = in.u32();
      s.config.m_padded = in.u32();
      s.config.p = in.u32();
      s.config.q = in.u32();
      s.config.validate();
      s.id = in.bytes(in.u16());
      s.values.resize(s.config.signature_length());
      for (auto& v : s.values) v = static_cast<double>(in.f32());
      sigs.push_back(std::move(s));
    }
    if (!in.at_end()) throw ValidationError("signatures: trailing bytes");
    return sigs;
  }
  const auto lines = detail::split_lines(data);
  if (lines.empty()) throw ValidationError("signatures: missing header");
  const auto header = detail::split_csv(lines[0]);
  static const char* kMeta[] = {"id", "taxonomy", "category", "r", "m", "m_padded", "p", "q"};
  if (header.size() < 8) throw ValidationError("signatures: malformed header");
  for (std::size_t c = 0; c < 8; ++c) {
    if (header[c] != kMeta[c]) throw ValidationError("signatures: malformed header column " + std::to_string(c + 1));
  }
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto where = "row " + std::to_string(r);
    const auto cells = detail::split_csv(lines[r]);
    if (cells.size() != header.size()) throw DimensionMismatch(where + ": column count differs from header");
    Signature s;
    s.id = std::string(cells[0]);
    s.taxonomy = taxonomy_from_string(std::string(cells[1]));
    std::size_t* fields[] = {&s.category, &s.config.r, &s.config.m, &s.config.m_padded, &s.config.p, &s.config.q};
    for (std::size_t c = 0; c < 6; ++c) {
      if (!detail::parse_uint(cells[c + 2], *fields[c])) throw ValidationError(where + ": bad integer field");
    }
    s.config.validate();
    if (cells.size() - 8 != s.config.signature_length()) {
      throw DimensionMismatch(where + ": signature length does not match its config");
    }
    for (std::size_t c = 8; c < cells.size(); ++c) s.values.push_back(detail::parse_cell(cells[c], where));
    sigs.push_back(std::move(s));
  }
  return sigs;
}

}  // namespace gsdp
