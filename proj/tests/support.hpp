#pragma once

// Random instance generators for property-style tests.

#include <cstdint>
#include <random>
#include <string>

#include "gsdp/gsdp.hpp"

namespace testing_support {

using Rng = std::mt19937_64;

inline gsdp::Vector random_vector(std::size_t m, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  gsdp::Vector v(m);
  for (auto& x : v) x = n(rng);
  return v;
}

/// Random prototype; roughly one weight in ten is exactly zero.
inline gsdp::SemanticPrototype random_prototype(std::size_t m, Rng& rng, std::size_t category = 0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::bernoulli_distribution zero(0.1);
  gsdp::SemanticPrototype p;
  p.category = category;
  p.mean = random_vector(m, rng, 3.0);
  p.stddev.resize(m);
  for (auto& s : p.stddev) s = u(rng);
  p.omega.resize(m);
  for (auto& w : p.omega) w = zero(rng) ? 0.0 : n(rng);
  p.bias = n(rng) * 5.0;
  p.n_typical = 1 + static_cast<std::size_t>(u(rng) * 10);
  return p;
}

/// Feature set whose values are exactly representable in 32 bits.
inline gsdp::FeatureSet random_feature_set(std::size_t n, std::size_t m, std::size_t cats, Rng& rng) {
  gsdp::FeatureSet s;
  s.m = m;
  std::uniform_int_distribution<std::size_t> lab(0, cats - 1);
  std::normal_distribution<float> f(0.0f, 10.0f);
  for (std::size_t i = 0; i < n; ++i) {
    gsdp::ObjectRecord o;
    o.id = "obj" + std::to_string(i);
    o.label = lab(rng);
    for (std::size_t j = 0; j < m; ++j) o.features.push_back(static_cast<double>(f(rng)));
    s.objects.push_back(std::move(o));
  }
  return s;
}

inline gsdp::HeadParams random_head(std::size_t n, std::size_t m, Rng& rng) {
  std::normal_distribution<float> f(0.0f, 1.0f);
  gsdp::HeadParams h;
  h.n = n;
  h.m = m;
  h.weights.assign(n, gsdp::Vector(m));
  for (auto& row : h.weights) {
    for (auto& w : row) w = static_cast<double>(f(rng));
  }
  for (std::size_t i = 0; i < n; ++i) h.biases.push_back(static_cast<double>(f(rng)));
  return h;
}

}  // namespace testing_support
