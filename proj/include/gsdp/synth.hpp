#pragma once

// Synthetic stand-in for CNN features: isotropic Gaussian categories plus a
// softmax linear head fitted by full-batch gradient descent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gsdp/error.hpp"
#include "gsdp/interchange.hpp"
#include "gsdp/prototype.hpp"

namespace gsdp {

struct SynthParams {
  std::size_t n_categories = 5;
  std::size_t per_category = 100;
  std::size_t m = 64;
  double separation = 10.0;  // distance between any two category means
  std::uint64_t seed = 0;
};

struct HeadFitParams {
  std::size_t iterations = 300;
  double learning_rate = 0.05;
  double l2 = 1e-4;
};

struct SynthData {
  FeatureSet features;
  HeadParams head;
};

/// Multinomial logistic regression, zero-initialised, full batch. Deterministic.
inline HeadParams fit_softmax_head(const FeatureSet& set, std::size_t n_categories,
                                   const HeadFitParams& fit = {}) {
  const std::size_t m = set.m;
  const std::size_t n = n_categories;
  HeadParams head;
  head.n = n;
  head.m = m;
  head.weights.assign(n, Vector(m, 0.0));
  head.biases.assign(n, 0.0);
  if (set.objects.empty()) return head;

  const auto inv_count = 1.0 / static_cast<double>(set.size());
  std::vector<Vector> grad_w(n, Vector(m));
  Vector grad_b(n);
  Vector logits(n);
  for (std::size_t it = 0; it < fit.iterations; ++it) {
    for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (const auto& o : set.objects) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < n; ++c) {
        logits[c] = detail::dot_plus(head.weights[c], o.features, head.biases[c]);
        mx = std::max(mx, logits[c]);
      }
      double z = 0.0;
      for (auto& l : logits) z += (l = std::exp(l - mx));
      for (std::size_t c = 0; c < n; ++c) {
        const double err = logits[c] / z - (o.label == c ? 1.0 : 0.0);
        for (std::size_t j = 0; j < m; ++j) grad_w[c][j] += err * o.features[j];
        grad_b[c] += err;
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t j = 0; j < m; ++j) {
        head.weights[c][j] -= fit.learning_rate * (grad_w[c][j] * inv_count + fit.l2 * head.weights[c][j]);
      }
      head.biases[c] -= fit.learning_rate * grad_b[c] * inv_count;
    }
  }
  // Round to interchange precision so in-memory and on-disk heads agree.
  for (auto& row : head.weights) {
    for (auto& w : row) w = static_cast<double>(static_cast<float>(w));
  }
  for (auto& b : head.biases) b = static_cast<double>(static_cast<float>(b));
  return head;
}

/// Category means are (separation / sqrt 2) * u_c for random orthonormal
/// directions u_c spread over all dimensions, so every pair of means is
/// exactly `separation` apart; noise is N(0, 1) per dimension.
inline SynthData generate_synthetic(const SynthParams& p, const HeadFitParams& fit = {}) {
  if (p.n_categories < 1) throw ValidationError("synth: need at least one category");
  if (p.per_category < 1) throw ValidationError("synth: need at least one member per category");
  if (p.m < p.n_categories) {
    throw ValidationError("synth: m must be >= the number of categories");
  }
  if (!std::isfinite(p.separation) || p.separation < 0) {
    throw ValidationError("synth: separation must be finite and non-negative");
  }

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double offset = p.separation / std::sqrt(2.0);

  // Gram-Schmidt on Gaussian draws.
  std::vector<Vector> dirs;
  dirs.reserve(p.n_categories);
  while (dirs.size() < p.n_categories) {
    Vector u(p.m);
    for (auto& x : u) x = noise(rng);
    for (const auto& v : dirs) {
      double d = 0.0;
      for (std::size_t j = 0; j < p.m; ++j) d += u[j] * v[j];
      for (std::size_t j = 0; j < p.m; ++j) u[j] -= d * v[j];
    }
    double norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    for (auto& x : u) x /= norm;
    dirs.push_back(std::move(u));
  }

  SynthData out;
  auto& fs = out.features;
  fs.m = p.m;
  fs.provenance = {"synthetic isotropic Gaussians", "seed=" + std::to_string(p.seed),
                   "separation=" + detail::format_real(p.separation)};
  for (std::size_t c = 0; c < p.n_categories; ++c) {
    fs.category_names.push_back("category_" + std::to_string(c));
  }
  fs.objects.reserve(p.n_categories * p.per_category);
  char id[48];
  for (std::size_t c = 0; c < p.n_categories; ++c) {
    for (std::size_t i = 0; i < p.per_category; ++i) {
      ObjectRecord o;
      std::snprintf(id, sizeof(id), "c%03zu_%06zu", c, i);
      o.id = id;
      o.label = c;
      o.features.resize(p.m);
      for (std::size_t j = 0; j < p.m; ++j) {
        const double v = offset * dirs[c][j] + noise(rng);
        o.features[j] = static_cast<double>(static_cast<float>(v));
      }
      fs.objects.push_back(std::move(o));
    }
  }
  out.head = fit_softmax_head(fs, p.n_categories, fit);
  return out;
}

/// Fraction of objects whose Top-1 head prediction equals their label.
inline double head_accuracy(const FeatureSet& set, const HeadParams& head) {
  if (set.objects.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& o : set.objects) ok += classify(o.features, head) == o.label ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(set.size());
}

}  // namespace gsdp
