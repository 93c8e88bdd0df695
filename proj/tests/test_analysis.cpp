#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "gsdp/analysis.hpp"
#include "gsdp/synth.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gsdp;
using testing_support::Rng;

namespace {

SemanticPrototype proto_with(Vector omega, Vector mean) {
  SemanticPrototype p;
  p.stddev.assign(mean.size(), 0.0);
  p.mean = std::move(mean);
  p.omega = std::move(omega);
  return p;
}

std::vector<std::size_t> random_labels(std::size_t n, std::size_t k, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, k - 1);
  std::vector<std::size_t> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Ranking, TiesBreakById) {
  const auto r = rank_by_delta({{"b", 1.0}, {"a", 1.0}, {"c", 0.5}});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].id, "c");
  EXPECT_EQ(r[1].id, "a");
  EXPECT_EQ(r[2].id, "b");
  EXPECT_EQ(r[2].rank, 3u);
  EXPECT_EQ(closest(r, 2).size(), 2u);
  EXPECT_EQ(farthest(r, 1).front().id, "b");
  EXPECT_EQ(farthest(r, 10).size(), 3u);
}

TEST(Ranking, MemberAtMeanRanksFirst) {
  Rng rng(6);
  auto p = testing_support::random_prototype(16, rng);
  auto set = testing_support::random_feature_set(30, 16, 1, rng);
  set.objects.push_back({"mean", 0, p.mean});
  const auto r = rank_members(set, p);
  EXPECT_EQ(r.front().id, "mean");
  EXPECT_EQ(r.front().delta, 0.0);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end(), [](auto& a, auto& b) { return a.delta < b.delta; }));
}

TEST(Ranking, SignatureRankingAgreesWithFeatures) {
  auto data = generate_synthetic({4, 50, 64, 10.0, 2});
  const auto store = build_prototypes(data.features, data.head);
  const auto cfg = plan_grid(64, 4);
  for (const auto& [cat, proto] : store) {
    const auto members = members_of(data.features, cat);
    std::vector<Signature> sigs;
    for (const auto& o : members.objects) {
      auto s = describe_object(o.features, proto, cfg);
      s.id = o.id;
      sigs.push_back(s);
    }
    const auto a = rank_members(members, proto);
    const auto b = rank_signatures(sigs);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].id, b[i].id) << "category " << cat << " rank " << i + 1;
      EXPECT_NEAR(a[i].delta, b[i].delta, 1e-6 * (1 + a[i].delta));
    }
  }
}

TEST(Organization, RhoAndGammaAgree) {
  Rng rng(10);
  const auto p = testing_support::random_prototype(100, rng);
  const auto set = testing_support::random_feature_set(40, 100, 1, rng);
  const auto cfg = plan_grid(100, 4);
  std::vector<Signature> sigs;
  for (const auto& o : set.objects) {
    auto s = describe_object(o.features, p, cfg);
    s.id = o.id;
    sigs.push_back(s);
  }
  const auto rho = map_rho(set, p);
  const auto gamma = map_gamma(sigs);
  ASSERT_EQ(rho.size(), gamma.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    EXPECT_EQ(rho[i].object_id, gamma[i].object_id);
    EXPECT_EQ(gamma[i].source, PointSource::signature);
    EXPECT_NEAR(rho[i].z, gamma[i].z, 1e-6 * (1 + std::abs(rho[i].z)));
    EXPECT_NEAR(rho[i].delta, gamma[i].delta, 1e-6 * (1 + rho[i].delta));
  }

  const auto ab = map_gamma({describe_abstract_prototype(p, cfg)});
  EXPECT_NEAR(ab[0].z, semantic_value(p.mean, p), 1e-9 * (1 + std::abs(ab[0].z)));
  EXPECT_EQ(ab[0].delta, 0.0);
  EXPECT_TRUE(map_rho(FeatureSet{}, p).empty());
  EXPECT_TRUE(map_gamma({}).empty());
}

TEST(Continuity, IdenticalObjectsAreZero) {
  const auto p = proto_with({1, -1}, {0, 0});
  FeatureSet s;
  s.m = 2;
  s.objects = {{"a", 0, {1, 2}}, {"b", 0, {1, 2}}};
  const auto rep = verify_continuity_bound(s, p, 100, 0);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.lower_violations, 0u);
}

TEST(Continuity, UpperBoundHolds) {
  Rng rng(44);
  for (int t = 0; t < 5; ++t) {
    const auto p = testing_support::random_prototype(32, rng);
    const auto s = testing_support::random_feature_set(60, 32, 1, rng);
    const auto rep = verify_continuity_bound(s, p, 20000, t);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_LE(rep.max_ratio, 2.0 + 1e-12);
  }
}

TEST(Continuity, LowerBoundCounterexample) {
  // Same z and same delta, but the objects are apart.
  const auto p = proto_with({1, 1}, {0, 0});
  const Vector f1{1, 0}, f2{0, 1};
  const double d = object_distance(f1, f2, p);
  EXPECT_EQ(d, 2.0);
  FeatureSet s;
  s.m = 2;
  s.objects = {{"a", 0, f1}, {"b", 0, f2}};
  const auto rho = map_rho(s, p);
  EXPECT_EQ(organization_l1(rho[0], rho[1]), 0.0);
}

TEST(KMeans, EveryPointItsOwnCluster) {
  std::vector<Vector> pts{{0, 0}, {5, 5}, {10, 0}, {3, 9}};
  const auto r = kmeans(pts, 4, 1);
  EXPECT_EQ(std::set<std::size_t>(r.assignments.begin(), r.assignments.end()).size(), 4u);
  EXPECT_EQ(r.inertia, 0.0);
}

TEST(KMeans, TwoObviousPairs) {
  std::vector<Vector> pts{{0, 0}, {0.1, 0}, {10, 10}, {10, 10.1}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = kmeans(pts, 2, seed);
    EXPECT_EQ(r.assignments[0], r.assignments[1]);
    EXPECT_EQ(r.assignments[2], r.assignments[3]);
    EXPECT_NE(r.assignments[0], r.assignments[2]);
    EXPECT_TRUE(r.converged);
  }
}

TEST(KMeans, DeterministicAndValidated) {
  Rng rng(3);
  std::vector<Vector> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(testing_support::random_vector(5, rng));
  const auto a = kmeans(pts, 6, 42), b = kmeans(pts, 6, 42);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.inertia, b.inertia);
  EXPECT_THROW(kmeans({}, 1, 0), ValidationError);
  EXPECT_THROW(kmeans(pts, 0, 0), ValidationError);
  EXPECT_THROW(kmeans(pts, 201, 0), ValidationError);
  pts[3].push_back(1.0);
  EXPECT_THROW(kmeans(pts, 2, 0), DimensionMismatch);
}

TEST(ClusterMetrics, PerfectAndRelabelled) {
  const std::vector<std::size_t> t{0, 0, 1, 1, 2, 2}, p{5, 5, 3, 3, 9, 9};
  const auto r = cluster_metrics(t, p);
  EXPECT_DOUBLE_EQ(r.homogeneity, 1.0);
  EXPECT_DOUBLE_EQ(r.completeness, 1.0);
  EXPECT_DOUBLE_EQ(r.v_measure, 1.0);
  EXPECT_DOUBLE_EQ(r.ari, 1.0);
  EXPECT_NEAR(r.ami, 1.0, 1e-12);
}

TEST(ClusterMetrics, SingleCluster) {
  const std::vector<std::size_t> t{0, 0, 1, 1, 2, 2}, p(6, 0);
  const auto r = cluster_metrics(t, p);
  EXPECT_EQ(r.homogeneity, 0.0);
  EXPECT_EQ(r.completeness, 1.0);
  EXPECT_NEAR(r.ari, 0.0, 1e-15);
  EXPECT_NEAR(r.ami, 0.0, 1e-12);
  EXPECT_THROW(cluster_metrics(t, std::vector<std::size_t>(5, 0)), DimensionMismatch);
}

TEST(ClusterMetrics, MatchOracles) {
  Rng rng(2024);
  std::uniform_int_distribution<std::size_t> nd(2, 40), kd(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = nd(rng);
    const auto t = random_labels(n, kd(rng), rng);
    const auto p = random_labels(n, kd(rng), rng);
    const auto r = cluster_metrics(t, p);
    const auto hcv = oracle::hcv(t, p);
    ASSERT_NEAR(r.homogeneity, hcv.h, 1e-12) << trial;
    ASSERT_NEAR(r.completeness, hcv.c, 1e-12) << trial;
    ASSERT_NEAR(r.v_measure, hcv.v, 1e-12) << trial;
    ASSERT_NEAR(r.ari, oracle::ari_pairs(t, p), 1e-12) << trial;
    ASSERT_NEAR(r.ami, oracle::ami(t, p, oracle::emi_combinatorial(t, p)), 1e-12) << trial;
  }
}

TEST(ClusterMetrics, ExpectedMiMatchesPermutationAverage) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + trial % 6;  // up to 8! orderings
    const auto t = random_labels(n, 3, rng);
    const auto p = random_labels(n, 3, rng);
    const auto c = detail::contingency(t, p);
    EXPECT_NEAR(detail::expected_mutual_information(c), oracle::emi_permutations(t, p), 1e-12) << trial;
  }
}

TEST(ClusterMetrics, AllSingletons) {
  const std::vector<std::size_t> t{0, 1, 2, 3};
  const auto r = cluster_metrics(t, t);
  EXPECT_EQ(r.ami, 1.0);
  EXPECT_EQ(r.ari, 1.0);
}

TEST(Sweep, CountsDeterminismAndSeparatedData) {
  auto data = generate_synthetic({5, 40, 16, 20.0, 9});
  std::vector<Vector> pts;
  std::vector<std::size_t> labels;
  for (const auto& o : data.features.objects) {
    pts.push_back(o.features);
    labels.push_back(o.label);
  }
  const std::vector<std::size_t> ks{3, 4, 5};
  const auto a = cluster_eval_sweep(pts, labels, ks, 7);
  const auto b = cluster_eval_sweep(pts, labels, ks, 7);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].k, ks[i]);
    EXPECT_EQ(a[i].n_points, 40 * ks[i]);
    EXPECT_EQ(a[i].ari, b[i].ari);
  }
  EXPECT_GE(a[0].ari, 0.99);
  EXPECT_GE(a[0].v_measure, 0.99);
  const std::vector<std::size_t> bad{6};
  EXPECT_THROW(cluster_eval_sweep(pts, labels, bad, 0), ValidationError);
}
