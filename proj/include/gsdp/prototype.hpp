#pragma once

// Per-category semantic prototypes and the scalar semantics evaluated against
// them: semantic value, prototypical distance, object distance and typicality.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "gsdp/error.hpp"
#include "gsdp/interchange.hpp"

namespace gsdp {

/// Feature means, population standard deviations and the category's linear
/// head row. Immutable once built.
struct SemanticPrototype {
  std::size_t category = 0;
  Vector mean;    // M
  Vector stddev;  // S
  Vector omega;   // head weights for this category
  double bias = 0.0;
  std::size_t n_typical = 1;

  std::size_t dim() const { return mean.size(); }

  void validate() const {
    const auto where = "prototype " + std::to_string(category);
    if (stddev.size() != mean.size() || omega.size() != mean.size()) {
      throw DimensionMismatch(where + ": mean, stddev and omega differ in dimension");
    }
    if (n_typical < 1) throw ValidationError(where + ": n_typical must be >= 1");
    if (!std::isfinite(bias)) throw ValidationError(where + ": non-finite bias");
    for (std::size_t j = 0; j < mean.size(); ++j) {
      if (!std::isfinite(mean[j]) || !std::isfinite(stddev[j]) || !std::isfinite(omega[j])) {
        throw ValidationError(where + ": non-finite entry at dimension " + std::to_string(j));
      }
      if (stddev[j] < 0) throw ValidationError(where + ": negative stddev");
    }
  }

  bool operator==(const SemanticPrototype&) const = default;
};

/// At most one prototype per category, all with the same dimensionality.
class PrototypeStore {
 public:
  PrototypeStore() = default;
  explicit PrototypeStore(std::size_t m) : m_(m) {}

  std::size_t dim() const { return m_; }
  std::size_t size() const { return protos_.size(); }
  bool empty() const { return protos_.empty(); }

  void insert(SemanticPrototype p) {
    p.validate();
    if (protos_.empty() && m_ == 0) m_ = p.dim();
    detail::require_dim(p.dim(), m_, "prototype store");
    const auto cat = p.category;
    if (!protos_.emplace(cat, std::move(p)).second) {
      throw ValidationError("prototype store: duplicate category " + std::to_string(cat));
    }
  }

  bool contains(std::size_t category) const { return protos_.contains(category); }

  const SemanticPrototype& at(std::size_t category) const {
    auto it = protos_.find(category);
    if (it == protos_.end()) {
      throw ValidationError("no prototype for category " + std::to_string(category));
    }
    return it->second;
  }

  auto begin() const { return protos_.begin(); }
  auto end() const { return protos_.end(); }

  bool operator==(const PrototypeStore&) const = default;

 private:
  std::size_t m_ = 0;
  std::map<std::size_t, SemanticPrototype> protos_;
};

namespace detail {

inline double dot_plus(std::span<const double> w, std::span<const double> a, double b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * a[j];
  return acc + b;
}

}  // namespace detail

/// Top-1 category of the linear head; ties go to the smallest index.
inline std::size_t classify(std::span<const double> features, const HeadParams& head) {
  detail::require_dim(features.size(), head.m, "classify");
  if (head.n == 0) throw ValidationError("classify: head has no categories");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < head.n; ++i) {
    const double s = detail::dot_plus(head.weights[i], features, head.biases[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

/// Same rule restricted to the categories present in a prototype store.
inline std::size_t classify(std::span<const double> features, const PrototypeStore& store) {
  detail::require_dim(features.size(), store.dim(), "classify");
  if (store.empty()) throw ValidationError("classify: empty prototype store");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& [cat, p] : store) {
    const double s = detail::dot_plus(p.omega, features, p.bias);
    if (s > best_score) {
      best_score = s;
      best = cat;
    }
  }
  return best;
}

/// Members of `category` whose label matches and which the head also assigns
/// to `category`, in set order.
inline std::vector<Vector> select_typical(const FeatureSet& set, const HeadParams& head,
                                          std::size_t category) {
  detail::require_dim(set.m, head.m, "select_typical");
  std::vector<Vector> out;
  for (const auto& o : set.objects) {
    if (o.label == category && classify(o.features, head) == category) out.push_back(o.features);
  }
  return out;
}

inline SemanticPrototype build_prototype(const FeatureSet& set, const HeadParams& head,
                                         std::size_t category) {
  if (category >= head.n) {
    throw ValidationError("build_prototype: category " + std::to_string(category) +
                          " not in head (n=" + std::to_string(head.n) + ")");
  }
  const auto members = select_typical(set, head, category);
  if (members.empty()) throw NoTypicalMembers(category);

  const std::size_t m = set.m;
  const auto n = static_cast<double>(members.size());
  SemanticPrototype p;
  p.category = category;
  p.n_typical = members.size();
  p.mean.assign(m, 0.0);
  p.stddev.assign(m, 0.0);
  for (const auto& f : members) {
    for (std::size_t j = 0; j < m; ++j) p.mean[j] += f[j];
  }
  for (auto& v : p.mean) v /= n;
  for (const auto& f : members) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = f[j] - p.mean[j];
      p.stddev[j] += d * d;
    }
  }
  for (auto& v : p.stddev) v = std::sqrt(v / n);
  p.omega = head.weights[category];
  p.bias = head.biases[category];
  return p;
}

/// One prototype per category present in `set`. Categories without typical
/// members are skipped and reported through `skipped`.
inline PrototypeStore build_prototypes(const FeatureSet& set, const HeadParams& head,
                                       std::vector<std::size_t>* skipped = nullptr) {
  detail::require_dim(set.m, head.m, "build_prototypes");
  std::vector<bool> present(head.n, false);
  for (const auto& o : set.objects) {
    if (o.label >= head.n) {
      throw ValidationError("object '" + o.id + "' has label " + std::to_string(o.label) +
                            " but the head has " + std::to_string(head.n) + " categories");
    }
    present[o.label] = true;
  }
  PrototypeStore store(set.m);
  for (std::size_t c = 0; c < head.n; ++c) {
    if (!present[c]) continue;
    try {
      store.insert(build_prototype(set, head, c));
    } catch (const NoTypicalMembers&) {
      if (skipped) skipped->push_back(c);
    }
  }
  return store;
}

/// Weighted feature sum plus bias under the prototype's head row.
inline double semantic_value(std::span<const double> a, const SemanticPrototype& proto) {
  detail::require_dim(a.size(), proto.dim(), "semantic_value");
  return detail::dot_plus(proto.omega, a, proto.bias);
}

/// Weight-modulated L1 distance between two feature vectors.
inline double object_distance(std::span<const double> f1, std::span<const double> f2,
                              const SemanticPrototype& proto) {
  detail::require_dim(f1.size(), proto.dim(), "object_distance");
  detail::require_dim(f2.size(), proto.dim(), "object_distance");
  double acc = 0.0;
  for (std::size_t j = 0; j < f1.size(); ++j) acc += std::abs(proto.omega[j]) * std::abs(f1[j] - f2[j]);
  return acc;
}

inline double prototypical_distance(std::span<const double> features,
                                    const SemanticPrototype& proto) {
  detail::require_dim(features.size(), proto.dim(), "prototypical_distance");
  return object_distance(features, proto.mean, proto);
}

/// Reciprocal prototypical distance; +infinity at the prototype itself.
inline double typicality_score(std::span<const double> features, const SemanticPrototype& proto) {
  const double d = prototypical_distance(features, proto);
  return d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
}

}  // namespace gsdp
