#pragma once

// Global semantic descriptor: the block/angle reduction f(x) and the three
// signature taxonomies built from it.
//
// A signature is `meaning ++ difference`. Each half holds 8 angular bins per
// r x r block of the zero-padded, row-major p x q reshaping of the input.
// Bins accumulate signed cell values, so the meaning half sums to the
// semantic value and the difference half of an object signature sums to its
// prototypical distance.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gsdp/error.hpp"
#include "gsdp/prototype.hpp"

namespace gsdp {

inline constexpr std::size_t kDefaultBlockSide = 16;
inline constexpr std::size_t kBinsPerBlock = 8;

struct ReductionConfig {
  std::size_t r = kDefaultBlockSide;
  std::size_t m = 0;
  std::size_t m_padded = 0;
  std::size_t p = 0;
  std::size_t q = 0;

  std::size_t blocks() const { return m_padded / (r * r); }
  std::size_t half_length() const { return blocks() * kBinsPerBlock; }
  std::size_t signature_length() const { return 2 * half_length(); }

  void validate() const {
    const auto rr = r * r;
    if (r < 2 || m < 1 || p * q != m_padded || p % r != 0 || q % r != 0 ||
        m_padded < m || m_padded - m >= rr) {
      throw ValidationError("inconsistent reduction config (r=" + std::to_string(r) +
                            ", m=" + std::to_string(m) + ", m_padded=" + std::to_string(m_padded) +
                            ", p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
    }
  }

  bool operator==(const ReductionConfig&) const = default;
};

/// Pads m up to a multiple of r*r and picks the most square p x q tiling
/// (p <= q on ties).
inline ReductionConfig plan_grid(std::size_t m, std::size_t r = kDefaultBlockSide) {
  if (r < 2) throw ValidationError("plan_grid: r must be >= 2");
  if (m < 1) throw ValidationError("plan_grid: m must be >= 1");
  const std::size_t rr = r * r;
  const std::size_t blocks = (m + rr - 1) / rr;
  std::size_t a = static_cast<std::size_t>(std::sqrt(static_cast<double>(blocks)));
  while (a * a > blocks) --a;
  while ((a + 1) * (a + 1) <= blocks) ++a;
  while (blocks % a != 0) --a;
  ReductionConfig c;
  c.r = r;
  c.m = m;
  c.m_padded = blocks * rr;
  c.p = a * r;
  c.q = (blocks / a) * r;
  return c;
}

/// Angles (degrees, in (0, 360]) of each cell of an r x r block about the
/// block centre, with the row axis pointing down and dy pointing up.
class AngleGrid {
 public:
  explicit AngleGrid(std::size_t r) : r_(r), deg_(r * r), bin_(r * r) {
    if (r < 2) throw ValidationError("angle_grid: r must be >= 2");
    const auto n = static_cast<long>(r) - 1;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        // Doubled offsets keep half-integer centres exact.
        const long dx2 = 2 * static_cast<long>(j) - n;
        const long dy2 = n - 2 * static_cast<long>(i);
        const double a = exact_angle(dx2, dy2);
        deg_[i * r + j] = a;
        bin_[i * r + j] = static_cast<std::uint8_t>(bin_of(a));
      }
    }
  }

  std::size_t side() const { return r_; }
  double degrees(std::size_t row, std::size_t col) const { return deg_[row * r_ + col]; }
  /// Zero-based bin index l-1 for the bin (45(l-1), 45l].
  std::size_t bin(std::size_t row, std::size_t col) const { return bin_[row * r_ + col]; }
  std::span<const std::uint8_t> bins() const { return bin_; }

  static std::size_t bin_of(double degrees) {
    auto l = static_cast<long>(std::ceil(degrees / 45.0));
    if (l < 1) l = 1;
    if (l > 8) l = 8;
    return static_cast<std::size_t>(l - 1);
  }

 private:
  static double exact_angle(long dx, long dy) {
    if (dx == 0 && dy == 0) return 360.0;
    if (dy == 0) return dx > 0 ? 360.0 : 180.0;
    if (dx == 0) return dy > 0 ? 90.0 : 270.0;
    if (std::labs(dx) == std::labs(dy)) {
      if (dx > 0) return dy > 0 ? 45.0 : 315.0;
      return dy > 0 ? 135.0 : 225.0;
    }
    double a = std::atan2(static_cast<double>(dy), static_cast<double>(dx)) * 180.0 / std::numbers::pi;
    if (a <= 0.0) a += 360.0;
    return a;
  }

  std::size_t r_;
  std::vector<double> deg_;
  std::vector<std::uint8_t> bin_;
};

inline AngleGrid angle_grid(std::size_t r) { return AngleGrid(r); }

enum class ReductionKind { meaning, difference };

/// One half-signature: 8 signed bin sums per block, blocks in row-major order.
inline Vector reduce(std::span<const double> alpha, const SemanticPrototype& proto,
                     ReductionKind kind, const ReductionConfig& config) {
  config.validate();
  detail::require_dim(alpha.size(), config.m, "reduce");
  detail::require_dim(proto.dim(), config.m, "reduce (prototype)");

  const std::size_t r = config.r;
  const std::size_t m = config.m;
  const std::size_t q = config.q;
  const AngleGrid grid(r);
  const double bias_share =
      kind == ReductionKind::meaning ? proto.bias / static_cast<double>(config.m_padded) : 0.0;

  Vector out(config.half_length(), 0.0);
  std::size_t block = 0;
  for (std::size_t bj = 0; bj < config.p / r; ++bj) {
    for (std::size_t bk = 0; bk < q / r; ++bk, ++block) {
      double* bins = out.data() + block * kBinsPerBlock;
      for (std::size_t i = 0; i < r; ++i) {
        const std::size_t row_base = (bj * r + i) * q + bk * r;
        for (std::size_t j = 0; j < r; ++j) {
          const std::size_t idx = row_base + j;
          const double w = idx < m ? proto.omega[idx] : 0.0;
          const double a = idx < m ? alpha[idx] : 0.0;
          const double z = kind == ReductionKind::meaning ? w * a + bias_share : std::abs(w) * a;
          bins[grid.bin(i, j)] += z;
        }
      }
    }
  }
  return out;
}

enum class Taxonomy : std::uint8_t { object = 0, abstract_prototype = 1, category = 2 };

inline const char* to_string(Taxonomy t) {
  switch (t) {
    case Taxonomy::object: return "object";
    case Taxonomy::abstract_prototype: return "abstract";
    case Taxonomy::category: return "category";
  }
  return "?";
}

inline Taxonomy taxonomy_from_string(const std::string& s) {
  if (s == "object") return Taxonomy::object;
  if (s == "abstract") return Taxonomy::abstract_prototype;
  if (s == "category") return Taxonomy::category;
  throw ValidationError("unknown taxonomy '" + s + "' (object|abstract|category)");
}

struct Signature {
  Vector values;
  Taxonomy taxonomy = Taxonomy::object;
  std::size_t category = 0;
  ReductionConfig config;
  std::string id;  // object id, or empty for prototype-level signatures

  std::span<const double> meaning() const {
    return std::span<const double>(values).first(values.size() / 2);
  }
  std::span<const double> difference() const {
    return std::span<const double>(values).subspan(values.size() / 2);
  }

  bool operator==(const Signature&) const = default;
};

namespace detail {

inline Signature assemble(Vector meaning, const Vector& difference, Taxonomy t,
                          const SemanticPrototype& proto, const ReductionConfig& config) {
  Signature s;
  s.values = std::move(meaning);
  s.values.insert(s.values.end(), difference.begin(), difference.end());
  s.taxonomy = t;
  s.category = proto.category;
  s.config = config;
  return s;
}

}  // namespace detail

inline Signature describe_object(std::span<const double> features, const SemanticPrototype& proto,
                                 const ReductionConfig& config) {
  detail::require_dim(features.size(), proto.dim(), "describe_object");
  Vector residual(features.size());
  for (std::size_t j = 0; j < residual.size(); ++j) residual[j] = std::abs(features[j] - proto.mean[j]);
  return detail::assemble(reduce(features, proto, ReductionKind::meaning, config),
                          reduce(residual, proto, ReductionKind::difference, config),
                          Taxonomy::object, proto, config);
}

inline Signature describe_abstract_prototype(const SemanticPrototype& proto,
                                             const ReductionConfig& config) {
  return detail::assemble(reduce(proto.mean, proto, ReductionKind::meaning, config),
                          Vector(config.half_length(), 0.0), Taxonomy::abstract_prototype, proto,
                          config);
}

inline Signature describe_category(const SemanticPrototype& proto, const ReductionConfig& config) {
  return detail::assemble(reduce(proto.mean, proto, ReductionKind::meaning, config),
                          reduce(proto.stddev, proto, ReductionKind::difference, config),
                          Taxonomy::category, proto, config);
}

inline double recover_semantic_value(const Signature& sig) {
  double acc = 0.0;
  for (double v : sig.meaning()) acc += v;
  return acc;
}

/// Sum of the difference half. For category signatures this is the
/// weighted spread sum |omega| . S rather than a distance.
inline double recover_prototypical_distance(const Signature& sig) {
  double acc = 0.0;
  for (double v : sig.difference()) acc += v;
  return acc;
}

inline double signature_l1(std::span<const double> a, std::span<const double> b) {
  detail::require_dim(b.size(), a.size(), "signature_l1");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

inline double signature_l1(const Signature& a, const Signature& b) {
  return signature_l1(a.values, b.values);
}

}  // namespace gsdp
