#pragma once

// Typicality rankings, (semantic value, prototypical distance) organization
// maps, the continuity bound check, and k-means clustering evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gsdp/descriptor.hpp"
#include "gsdp/detail/io.hpp"
#include "gsdp/error.hpp"
#include "gsdp/interchange.hpp"
#include "gsdp/prototype.hpp"

namespace gsdp {

// ---------------------------------------------------------------------------
// Rankings

struct RankingEntry {
  std::string id;
  double delta = 0.0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const RankingEntry&) const = default;
};

/// Sorts (id, delta) pairs by delta ascending, ties by id, and assigns ranks.
inline std::vector<RankingEntry> rank_by_delta(std::vector<std::pair<std::string, double>> items) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  std::vector<RankingEntry> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({std::move(items[i].first), items[i].second, i + 1});
  }
  return out;
}

/// All members ordered by prototypical distance. The caller restricts `set`
/// to the prototype's category.
inline std::vector<RankingEntry> rank_members(const FeatureSet& set, const SemanticPrototype& proto) {
  std::vector<std::pair<std::string, double>> items;
  items.reserve(set.size());
  for (const auto& o : set.objects) items.emplace_back(o.id, prototypical_distance(o.features, proto));
  return rank_by_delta(std::move(items));
}

/// Same ordering, with distances recovered from signature difference halves.
inline std::vector<RankingEntry> rank_signatures(const std::vector<Signature>& sigs) {
  std::vector<std::pair<std::string, double>> items;
  items.reserve(sigs.size());
  for (const auto& s : sigs) items.emplace_back(s.id, recover_prototypical_distance(s));
  return rank_by_delta(std::move(items));
}

inline std::vector<RankingEntry> closest(const std::vector<RankingEntry>& ranking, std::size_t k) {
  return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(std::min(k, ranking.size()))};
}

inline std::vector<RankingEntry> farthest(const std::vector<RankingEntry>& ranking, std::size_t k) {
  return {ranking.end() - static_cast<std::ptrdiff_t>(std::min(k, ranking.size())), ranking.end()};
}

/// Members of one category, in set order.
inline FeatureSet members_of(const FeatureSet& set, std::size_t category) {
  FeatureSet out;
  out.m = set.m;
  out.category_names = set.category_names;
  for (const auto& o : set.objects) {
    if (o.label == category) out.objects.push_back(o);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Organization maps

enum class PointSource { features, signature };

inline const char* to_string(PointSource s) {
  return s == PointSource::features ? "features" : "signature";
}

struct OrganizationPoint {
  std::string object_id;
  double z = 0.0;
  double delta = 0.0;
  PointSource source = PointSource::features;
};

inline std::vector<OrganizationPoint> map_rho(const FeatureSet& set, const SemanticPrototype& proto) {
  std::vector<OrganizationPoint> out;
  out.reserve(set.size());
  for (const auto& o : set.objects) {
    out.push_back({o.id, semantic_value(o.features, proto), prototypical_distance(o.features, proto),
                   PointSource::features});
  }
  return out;
}

inline std::vector<OrganizationPoint> map_gamma(const std::vector<Signature>& sigs) {
  std::vector<OrganizationPoint> out;
  out.reserve(sigs.size());
  for (const auto& s : sigs) {
    out.push_back({s.id, recover_semantic_value(s), recover_prototypical_distance(s),
                   PointSource::signature});
  }
  return out;
}

inline double organization_l1(const OrganizationPoint& a, const OrganizationPoint& b) {
  return std::abs(a.z - b.z) + std::abs(a.delta - b.delta);
}

// ---------------------------------------------------------------------------
// Continuity bound  delta(o1,o2) <= l1(rho1, rho2) <= 2 delta(o1,o2)
//
// Only the upper bound follows from the definitions: |z1 - z2| <= delta(o1,o2)
// by the triangle inequality on sum w (f1 - f2), and |d1 - d2| <= delta(o1,o2)
// by the triangle inequality of the pseudometric. The lower bound is measured.

struct ContinuityReport {
  std::size_t samples = 0;
  std::size_t violations = 0;        // upper bound
  std::size_t lower_violations = 0;  // reported only
  double max_ratio = 0.0;            // max l1 / delta over pairs with delta > 0
  double min_ratio = std::numeric_limits<double>::infinity();
};

inline constexpr double kContinuityAbsTol = 1e-9;

inline ContinuityReport verify_continuity_bound(const FeatureSet& set, const SemanticPrototype& proto,
                                                std::size_t samples, std::uint64_t seed) {
  if (set.size() < 2) throw ValidationError("verify_continuity_bound: need at least 2 members");
  const auto rho = map_rho(set, proto);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  ContinuityReport rep;
  rep.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto i = pick(rng);
    const auto j = pick(rng);
    const double d = object_distance(set.objects[i].features, set.objects[j].features, proto);
    const double l1 = organization_l1(rho[i], rho[j]);
    if (l1 > 2.0 * d + kContinuityAbsTol) ++rep.violations;
    if (l1 < d) ++rep.lower_violations;
    if (d > 0.0) {
      rep.max_ratio = std::max(rep.max_ratio, l1 / d);
      rep.min_ratio = std::min(rep.min_ratio, l1 / d);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// k-means: greedy k-means++ seeding, then Lloyd iterations on squared L2.

inline constexpr std::size_t kDefaultMaxIter = 300;

struct KMeansResult {
  std::vector<std::size_t> assignments;
  std::vector<Vector> centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

inline std::size_t sample_weighted(const std::vector<double>& w, double total, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, total);
  const double target = u(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (target < acc) return i;
  }
  // Rounding can leave target at the top edge; take the last positive weight.
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

inline std::vector<Vector> kmeanspp_seeds(const std::vector<Vector>& pts, std::size_t k,
                                          std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<Vector> centers;
  centers.reserve(k);
  std::uniform_int_distribution<std::size_t> uni(0, n - 1);
  centers.push_back(pts[uni(rng)]);
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = sq_dist(pts[i], centers[0]);

  std::vector<double> cand_d(n);
  while (centers.size() < k) {
    const double pot = std::accumulate(closest.begin(), closest.end(), 0.0);
    if (pot <= 0.0) {
      centers.push_back(pts[uni(rng)]);
      continue;
    }
    std::size_t best = 0;
    double best_pot = std::numeric_limits<double>::infinity();
    std::vector<double> best_d;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto c = sample_weighted(closest, pot, rng);
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cand_d[i] = std::min(closest[i], sq_dist(pts[i], pts[c]));
        p += cand_d[i];
      }
      if (p < best_pot) {
        best_pot = p;
        best = c;
        best_d = cand_d;
      }
    }
    centers.push_back(pts[best]);
    closest = std::move(best_d);
  }
  return centers;
}

}  // namespace detail

inline KMeansResult kmeans(const std::vector<Vector>& points, std::size_t k, std::uint64_t seed,
                           std::size_t max_iter = kDefaultMaxIter) {
  if (points.empty()) throw ValidationError("kmeans: empty input");
  if (k == 0) throw ValidationError("kmeans: k must be >= 1");
  if (k > points.size()) throw ValidationError("kmeans: k exceeds point count");
  const std::size_t d = points.front().size();
  for (const auto& p : points) detail::require_dim(p.size(), d, "kmeans");
  const std::size_t n = points.size();

  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.centroids = detail::kmeanspp_seeds(points, k, rng);
  res.assignments.assign(n, 0);
  std::vector<double> dist(n, 0.0);

  auto assign = [&]() {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = detail::sq_dist(points[i], res.centroids[c]);
        if (dd < bd) {
          bd = dd;
          best = c;
        }
      }
      if (best != res.assignments[i]) changed = true;
      res.assignments[i] = best;
      dist[i] = bd;
    }
    return changed;
  };

  assign();
  res.iterations = 1;
  while (res.iterations < max_iter) {
    std::vector<Vector> sums(k, Vector(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[res.assignments[i]];
      for (std::size_t j = 0; j < d; ++j) s[j] += points[i][j];
      ++counts[res.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed on the point farthest from its current centroid.
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        res.centroids[c] = points[far];
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j < d; ++j) res.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
    ++res.iterations;
    if (!assign()) {
      res.converged = true;
      break;
    }
  }
  res.inertia = std::accumulate(dist.begin(), dist.end(), 0.0);
  return res;
}

// ---------------------------------------------------------------------------
// External cluster metrics

struct ClusterReport {
  std::size_t k = 0;
  std::size_t n_points = 0;
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
  double ari = 0.0;
  double ami = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
};

namespace detail {

struct Contingency {
  std::size_t n = 0;
  std::vector<std::size_t> rows;  // class sizes
  std::vector<std::size_t> cols;  // cluster sizes
  std::vector<std::vector<std::size_t>> cells;
};

inline Contingency contingency(std::span<const std::size_t> truth, std::span<const std::size_t> pred) {
  std::map<std::size_t, std::size_t> ti, pi;
  for (auto t : truth) ti.try_emplace(t, 0);
  for (auto p : pred) pi.try_emplace(p, 0);
  std::size_t idx = 0;
  for (auto& [key, v] : ti) v = idx++;
  idx = 0;
  for (auto& [key, v] : pi) v = idx++;
  Contingency c;
  c.n = truth.size();
  c.rows.assign(ti.size(), 0);
  c.cols.assign(pi.size(), 0);
  c.cells.assign(ti.size(), std::vector<std::size_t>(pi.size(), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto r = ti.at(truth[i]);
    const auto k = pi.at(pred[i]);
    ++c.cells[r][k];
    ++c.rows[r];
    ++c.cols[k];
  }
  return c;
}

inline double entropy(const std::vector<std::size_t>& sizes, std::size_t n) {
  double h = 0.0;
  const auto nn = static_cast<double>(n);
  for (auto s : sizes) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / nn;
    h -= p * std::log(p);
  }
  return h;
}

inline double mutual_information(const Contingency& c) {
  const auto n = static_cast<double>(c.n);
  double mi = 0.0;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    for (std::size_t j = 0; j < c.cols.size(); ++j) {
      const auto nij = static_cast<double>(c.cells[i][j]);
      if (nij == 0.0) continue;
      mi += nij / n * std::log(n * nij / (static_cast<double>(c.rows[i]) * static_cast<double>(c.cols[j])));
    }
  }
  return std::max(mi, 0.0);
}

/// Expected mutual information under the hypergeometric permutation model.
inline double expected_mutual_information(const Contingency& c) {
  const std::size_t N = c.n;
  const auto n = static_cast<double>(N);
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (auto a : c.rows) {
    for (auto b : c.cols) {
      const std::size_t lo = std::max<std::size_t>(1, a + b > N ? a + b - N : 0);
      const std::size_t hi = std::min(a, b);
      const double ad = static_cast<double>(a);
      const double bd = static_cast<double>(b);
      const double fixed = std::lgamma(ad + 1) + std::lgamma(bd + 1) + std::lgamma(n - ad + 1) +
                           std::lgamma(n - bd + 1) - lg_n;
      for (std::size_t nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double log_p = fixed - std::lgamma(x + 1) - std::lgamma(ad - x + 1) -
                             std::lgamma(bd - x + 1) - std::lgamma(n - ad - bd + x + 1);
        emi += x / n * std::log(n * x / (ad * bd)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

inline double comb2(std::size_t v) {
  const auto d = static_cast<double>(v);
  return d * (d - 1.0) / 2.0;
}

}  // namespace detail

/// Homogeneity, completeness, V-measure, ARI, and AMI (permutation-model
/// expected MI, max-entropy normalization). Natural logarithms throughout.
inline ClusterReport cluster_metrics(std::span<const std::size_t> truth, std::span<const std::size_t> pred) {
  if (truth.size() != pred.size()) {
    throw DimensionMismatch("cluster_metrics: " + std::to_string(truth.size()) + " labels vs " +
                            std::to_string(pred.size()) + " assignments");
  }
  if (truth.empty()) throw ValidationError("cluster_metrics: empty labeling");
  const auto c = detail::contingency(truth, pred);
  ClusterReport rep;
  rep.n_points = c.n;
  rep.k = c.cols.size();

  const double h_true = detail::entropy(c.rows, c.n);
  const double h_pred = detail::entropy(c.cols, c.n);
  const double mi = detail::mutual_information(c);
  rep.homogeneity = h_true == 0.0 ? 1.0 : std::clamp(mi / h_true, 0.0, 1.0);
  rep.completeness = h_pred == 0.0 ? 1.0 : std::clamp(mi / h_pred, 0.0, 1.0);
  const double hc = rep.homogeneity + rep.completeness;
  rep.v_measure = hc == 0.0 ? 0.0 : 2.0 * rep.homogeneity * rep.completeness / hc;

  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& row : c.cells) {
    for (auto v : row) sum_cells += detail::comb2(v);
  }
  for (auto v : c.rows) sum_rows += detail::comb2(v);
  for (auto v : c.cols) sum_cols += detail::comb2(v);
  const double total = detail::comb2(c.n);
  if (total == 0.0) {
    rep.ari = 1.0;
  } else {
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    rep.ari = denom == 0.0 ? 1.0 : (sum_cells - expected) / denom;
  }

  if ((c.rows.size() == 1 && c.cols.size() == 1)) {
    rep.ami = 1.0;
  } else {
    const double emi = detail::expected_mutual_information(c);
    const double normalizer = std::max(h_true, h_pred);
    const double denom = normalizer - emi;
    // Every permutation yields the same MI (e.g. both labelings all singletons).
    if (std::abs(denom) <= 1e-12 * std::max(1.0, normalizer)) {
      rep.ami = std::abs(mi - normalizer) <= 1e-12 * std::max(1.0, normalizer) ? 1.0 : 0.0;
    } else {
      rep.ami = (mi - emi) / denom;
    }
  }
  return rep;
}

/// One report per k: the objects of the first k categories (in label order)
/// are clustered into k groups and scored against their labels.
inline std::vector<ClusterReport> cluster_eval_sweep(const std::vector<Vector>& points,
                                                     std::span<const std::size_t> labels,
                                                     std::span<const std::size_t> k_range,
                                                     std::uint64_t seed,
                                                     std::size_t max_iter = kDefaultMaxIter) {
  detail::require_dim(labels.size(), points.size(), "cluster_eval_sweep");
  std::vector<std::size_t> cats(labels.begin(), labels.end());
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());

  std::vector<ClusterReport> out;
  out.reserve(k_range.size());
  for (auto k : k_range) {
    if (k == 0 || k > cats.size()) {
      throw ValidationError("cluster_eval_sweep: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(cats.size()) + "]");
    }
    const std::size_t last = cats[k - 1];
    std::vector<Vector> sub;
    std::vector<std::size_t> truth;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (labels[i] <= last) {
        sub.push_back(points[i]);
        truth.push_back(labels[i]);
      }
    }
    const auto km = kmeans(sub, k, seed, max_iter);
    auto rep = cluster_metrics(truth, km.assignments);
    rep.k = k;
    rep.seed = seed;
    rep.iterations = km.iterations;
    out.push_back(rep);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV exports

inline void write_ranking_csv(const std::vector<RankingEntry>& ranking, const std::filesystem::path& path) {
  std::string out = "id,delta,rank\n";
  for (const auto& e : ranking) {
    out += e.id + ',' + detail::format_real(e.delta) + ',' + std::to_string(e.rank) + '\n';
  }
  detail::write_file(path, out);
}

inline void write_organization_csv(const std::vector<OrganizationPoint>& pts,
                                   const std::filesystem::path& path) {
  std::string out = "id,z,delta,source\n";
  for (const auto& p : pts) {
    out += p.object_id + ',' + detail::format_real(p.z) + ',' + detail::format_real(p.delta) + ',' +
           to_string(p.source) + '\n';
  }
  detail::write_file(path, out);
}

inline void write_cluster_reports_csv(const std::vector<ClusterReport>& reps,
                                      const std::filesystem::path& path) {
  std::string out = "k,H,C,V,ARI,AMI,seed\n";
  for (const auto& r : reps) {
    out += std::to_string(r.k) + ',' + detail::format_real(r.homogeneity) + ',' +
           detail::format_real(r.completeness) + ',' + detail::format_real(r.v_measure) + ',' +
           detail::format_real(r.ari) + ',' + detail::format_real(r.ami) + ',' + std::to_string(r.seed) + '\n';
  }
  detail::write_file(path, out);
}

}  // namespace gsdp
