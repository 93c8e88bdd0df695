#pragma once

// Brute-force reference computations used only by the tests. Each one takes a
// different route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

/// First index of the maximum score.
inline std::size_t argmax(const std::vector<Vec>& w, const Vec& b, const Vec& f) {
  std::vector<long double> scores;
  for (std::size_t i = 0; i < w.size(); ++i) {
    long double s = b[i];
    for (std::size_t j = 0; j < f.size(); ++j) s += static_cast<long double>(w[i][j]) * f[j];
    scores.push_back(s);
  }
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

/// Per-dimension two-pass mean and population std in long double.
inline std::pair<Vec, Vec> mean_std(const std::vector<Vec>& rows) {
  const std::size_t m = rows.front().size();
  Vec mean(m), sd(m);
  for (std::size_t j = 0; j < m; ++j) {
    long double s = 0;
    for (const auto& r : rows) s += r[j];
    const long double mu = s / rows.size();
    long double v = 0;
    for (const auto& r : rows) v += (r[j] - mu) * (r[j] - mu);
    mean[j] = static_cast<double>(mu);
    sd[j] = static_cast<double>(std::sqrt(v / rows.size()));
  }
  return {mean, sd};
}

inline double weighted_l1(const Vec& w, const Vec& a, const Vec& b) {
  long double s = 0;
  for (std::size_t j = 0; j < w.size(); ++j) s += std::fabs(static_cast<long double>(w[j])) * std::fabs(static_cast<long double>(a[j]) - b[j]);
  return static_cast<double>(s);
}

/// Exhaustive divisor search: (m_padded, p, q).
inline std::tuple<std::size_t, std::size_t, std::size_t> plan(std::size_t m, std::size_t r) {
  std::size_t mp = r * r;
  while (mp < m) mp += r * r;
  std::size_t bp = 0, bq = 0;
  for (std::size_t p = 1; p <= mp; ++p) {
    if (mp % p != 0) continue;
    const std::size_t q = mp / p;
    if (p % r != 0 || q % r != 0) continue;
    const auto gap = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
    if (bp == 0 || gap(p, q) < gap(bp, bq) || (gap(p, q) == gap(bp, bq) && p <= q && bp > bq)) {
      bp = p;
      bq = q;
    }
  }
  return {mp, bp, bq};
}

/// Angle of cell (i, j) about the block centre, degrees in (0, 360], rounded
/// to 1e-9 so exact multiples of 45 land on their boundary.
inline double cell_angle(std::size_t r, std::size_t i, std::size_t j) {
  const double c = (static_cast<double>(r) - 1.0) / 2.0;
  const double dx = static_cast<double>(j) - c;
  const double dy = c - static_cast<double>(i);
  if (dx == 0.0 && dy == 0.0) return 360.0;
  double a = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  a = std::round(a * 1e9) / 1e9;
  if (a <= 0.0) a += 360.0;
  return a;
}

/// Bin l in 1..8 with l*45 - 45 < angle <= l*45.
inline std::size_t bin(double angle) {
  for (std::size_t l = 1; l <= 8; ++l) {
    if (angle > 45.0 * l - 45.0 && angle <= 45.0 * l) return l;
  }
  return 0;
}

/// f(x) via explicit padded p x q matrices.
inline Vec reduce(const Vec& alpha, const Vec& omega, double bias, bool meaning, std::size_t r) {
  const auto [mp, p, q] = plan(alpha.size(), r);
  std::vector<Vec> A(p, Vec(q, 0.0)), W(p, Vec(q, 0.0)), B(p, Vec(q, bias / static_cast<double>(mp)));
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    A[k / q][k % q] = alpha[k];
    W[k / q][k % q] = omega[k];
  }
  Vec out;
  for (std::size_t bj = 0; bj < p / r; ++bj) {
    for (std::size_t bk = 0; bk < q / r; ++bk) {
      Vec bins(8, 0.0);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          const auto row = bj * r + i, col = bk * r + j;
          const double z = meaning ? W[row][col] * A[row][col] + B[row][col]
                                   : std::fabs(W[row][col]) * A[row][col];
          bins[bin(cell_angle(r, i, j)) - 1] += z;
        }
      }
      out.insert(out.end(), bins.begin(), bins.end());
    }
  }
  return out;
}

// --- clustering metrics --------------------------------------------------

/// ARI from O(n^2) pair counting.
inline double ari_pairs(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
  const std::size_t n = t.size();
  long double both = 0, same_t = 0, same_p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool st = t[i] == t[j], sp = p[i] == p[j];
      both += st && sp;
      same_t += st;
      same_p += sp;
    }
  }
  const long double pairs = static_cast<long double>(n) * (n - 1) / 2;
  if (pairs == 0) return 1.0;
  const long double expected = same_t * same_p / pairs;
  const long double mx = (same_t + same_p) / 2;
  if (mx == expected) return 1.0;
  return static_cast<double>((both - expected) / (mx - expected));
}

inline long double entropy_of(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, long double> c;
  for (auto l : labels) c[l] += 1;
  long double h = 0;
  for (auto& [k, v] : c) {
    const long double p = v / labels.size();
    h -= p * std::log(p);
  }
  return h;
}

/// H(a | b) from the joint counts.
inline long double cond_entropy(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::pair<std::size_t, std::size_t>, long double> joint;
  std::map<std::size_t, long double> mb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    mb[b[i]] += 1;
  }
  long double h = 0;
  const long double n = a.size();
  for (auto& [key, v] : joint) h -= v / n * std::log(v / mb[key.second]);
  return h;
}

struct Hcv {
  double h, c, v;
};

inline Hcv hcv(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
  const long double ht = entropy_of(t), hp = entropy_of(p);
  const long double h = ht == 0 ? 1 : 1 - cond_entropy(t, p) / ht;
  const long double c = hp == 0 ? 1 : 1 - cond_entropy(p, t) / hp;
  const long double v = h + c == 0 ? 0 : 2 * h * c / (h + c);
  return {static_cast<double>(h), static_cast<double>(c), static_cast<double>(v)};
}

inline long double mi_of(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
  return entropy_of(t) - cond_entropy(t, p);
}

inline long double binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  long double r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// EMI by summing the hypergeometric pmf from exact binomial products.
inline double emi_combinatorial(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
  std::map<std::size_t, std::size_t> ca, cb;
  for (auto l : t) ++ca[l];
  for (auto l : p) ++cb[l];
  const std::size_t n = t.size();
  long double emi = 0;
  for (auto& [ka, a] : ca) {
    for (auto& [kb, b] : cb) {
      for (std::size_t x = 1; x <= std::min(a, b); ++x) {
        if (a + b > n + x) continue;
        const long double pmf = binom(a, x) * binom(n - a, b - x) / binom(n, b);
        emi += static_cast<long double>(x) / n * std::log(static_cast<long double>(n) * x / (static_cast<long double>(a) * b)) * pmf;
      }
    }
  }
  return static_cast<double>(emi);
}

/// EMI as the average MI over every permutation of `p` (tiny n only).
inline double emi_permutations(const std::vector<std::size_t>& t, std::vector<std::size_t> p) {
  std::sort(p.begin(), p.end());
  long double total = 0;
  long double count = 0;
  // Distinct multiset permutations are equally likely under the model; weight
  // each by the number of index permutations producing it (a constant).
  do {
    total += mi_of(t, p);
    count += 1;
  } while (std::next_permutation(p.begin(), p.end()));
  return static_cast<double>(total / count);
}

inline double ami(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p, double emi) {
  const long double ht = entropy_of(t), hp = entropy_of(p);
  std::map<std::size_t, int> ut, up;
  for (auto l : t) ut[l];
  for (auto l : p) up[l];
  if (ut.size() == 1 && up.size() == 1) return 1.0;
  const long double mi = mi_of(t, p);
  const long double norm = std::max(ht, hp);
  const long double den = norm - emi;
  if (std::fabs(den) <= 1e-12L * std::max<long double>(1, norm)) {
    return std::fabs(mi - norm) <= 1e-12L * std::max<long double>(1, norm) ? 1.0 : 0.0;
  }
  return static_cast<double>((mi - emi) / den);
}

}  // namespace oracle
