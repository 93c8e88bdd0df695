#pragma once

// Batch property suites over a feature set and head: value/distance
// preservation, signature taxonomies, pseudometric axioms, cross-domain
// ranking and organization agreement, and the continuity upper bound.
// Built only from the public operations of the other headers.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gsdp/analysis.hpp"
#include "gsdp/descriptor.hpp"
#include "gsdp/interchange.hpp"
#include "gsdp/prototype.hpp"

namespace gsdp {

inline constexpr double kPreservationTol = 1e-6;
inline constexpr double kTriangleRelTol = 1e-9;

/// |got - want| <= 1e-6 (1 + |want|)
inline bool preserved(double got, double want) {
  return std::abs(got - want) <= kPreservationTol * (1.0 + std::abs(want));
}

inline bool triangle_holds(double ac, double ab, double bc) {
  const double rhs = ab + bc;
  return ac <= rhs + kTriangleRelTol * std::max(1.0, rhs);
}

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::size_t r = kDefaultBlockSide;
  std::uint64_t seed = 0;
  std::size_t triples = 10000;
  std::size_t continuity_pairs = 100000;
};

namespace detail {

inline SuiteResult make_result(std::string name, std::size_t failures, std::size_t checks,
                               std::string extra = {}) {
  std::ostringstream os;
  os << (checks - failures) << "/" << checks << " checks";
  if (!extra.empty()) os << "; " << extra;
  return {std::move(name), failures == 0 && checks > 0, os.str()};
}

}  // namespace detail

inline std::vector<SuiteResult> run_property_suites(const FeatureSet& set, const HeadParams& head,
                                                    const VerifyOptions& opt = {}) {
  set.validate();
  head.validate();
  detail::require_dim(head.m, set.m, "verify: head vs features");

  std::vector<SuiteResult> out;
  std::vector<std::size_t> skipped;
  const auto store = build_prototypes(set, head, &skipped);
  {
    std::size_t bad = 0;
    for (const auto& [cat, p] : store) {
      const auto typical = select_typical(set, head, cat);
      if (typical.size() != p.n_typical) ++bad;
    }
    out.push_back(detail::make_result("prototype-construction", bad, store.size(),
                                      std::to_string(skipped.size()) + " categories without typical members"));
  }
  if (store.empty()) return out;

  const auto config = plan_grid(set.m, opt.r);
  std::vector<const ObjectRecord*> covered;
  for (const auto& o : set.objects) {
    if (store.contains(o.label)) covered.push_back(&o);
  }

  // Preservation of semantic value and prototypical distance.
  std::size_t fail_z = 0, fail_d = 0, checks = 0;
  std::vector<Signature> sigs;
  sigs.reserve(covered.size());
  for (const auto* o : covered) {
    const auto& p = store.at(o->label);
    auto s = describe_object(o->features, p, config);
    s.id = o->id;
    if (!preserved(recover_semantic_value(s), semantic_value(o->features, p))) ++fail_z;
    if (!preserved(recover_prototypical_distance(s), prototypical_distance(o->features, p))) ++fail_d;
    ++checks;
    sigs.push_back(std::move(s));
  }
  for (const auto& [cat, p] : store) {
    const double z = semantic_value(p.mean, p);
    if (!preserved(recover_semantic_value(describe_abstract_prototype(p, config)), z)) ++fail_z;
    if (!preserved(recover_semantic_value(describe_category(p, config)), z)) ++fail_z;
    checks += 2;
  }
  out.push_back(detail::make_result("semantic-value-preservation", fail_z, checks));
  out.push_back(detail::make_result("prototypical-distance-preservation", fail_d, covered.size()));

  // Taxonomy degeneracies.
  {
    std::size_t bad = 0, n = 0;
    for (const auto& [cat, p] : store) {
      const auto abs_sig = describe_abstract_prototype(p, config);
      for (double v : abs_sig.difference()) bad += v != 0.0 ? 1 : 0;
      auto flat = p;
      std::fill(flat.stddev.begin(), flat.stddev.end(), 0.0);
      if (describe_category(flat, config).values != abs_sig.values) ++bad;
      if (describe_object(p.mean, p, config).values != abs_sig.values) ++bad;
      n += abs_sig.difference().size() + 2;
    }
    out.push_back(detail::make_result("signature-taxonomies", bad, n));
  }

  // Pseudometric axioms on random same-category triples.
  {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, covered.size() - 1);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < opt.triples; ++t) {
      const auto* a = covered[pick(rng)];
      const auto& p = store.at(a->label);
      const auto* b = covered[pick(rng)];
      const auto* c = covered[pick(rng)];
      const double ab = object_distance(a->features, b->features, p);
      const double ba = object_distance(b->features, a->features, p);
      const double bc = object_distance(b->features, c->features, p);
      const double ac = object_distance(a->features, c->features, p);
      const double aa = object_distance(a->features, a->features, p);
      if (ab != ba || ab < 0 || bc < 0 || ac < 0 || aa != 0.0 || !triangle_holds(ac, ab, bc)) ++bad;
    }
    out.push_back(detail::make_result("pseudometric-axioms", bad, opt.triples));
  }

  // Per-category ranking and organization agreement between domains.
  {
    std::size_t rank_bad = 0, org_bad = 0, org_n = 0;
    ContinuityReport total;
    std::size_t cats = 0;
    for (const auto& [cat, p] : store) {
      const auto members = members_of(set, cat);
      std::vector<Signature> msigs;
      for (const auto& s : sigs) {
        if (s.category == cat) msigs.push_back(s);
      }
      const auto by_features = rank_members(members, p);
      const auto by_sigs = rank_signatures(msigs);
      bool same = by_features.size() == by_sigs.size();
      for (std::size_t i = 0; same && i < by_features.size(); ++i) same = by_features[i].id == by_sigs[i].id;
      rank_bad += same ? 0 : 1;

      const auto rho = map_rho(members, p);
      const auto gamma = map_gamma(msigs);
      for (std::size_t i = 0; i < rho.size() && i < gamma.size(); ++i) {
        if (rho[i].object_id != gamma[i].object_id || !preserved(gamma[i].z, rho[i].z) ||
            !preserved(gamma[i].delta, rho[i].delta)) {
          ++org_bad;
        }
        ++org_n;
      }
      if (rho.size() != gamma.size()) ++org_bad;

      if (members.size() >= 2) {
        const auto per = std::max<std::size_t>(1, opt.continuity_pairs / store.size());
        const auto rep = verify_continuity_bound(members, p, per, opt.seed + cat);
        total.samples += rep.samples;
        total.violations += rep.violations;
        total.lower_violations += rep.lower_violations;
        total.max_ratio = std::max(total.max_ratio, rep.max_ratio);
        ++cats;
      }
    }
    out.push_back(detail::make_result("ranking-consistency", rank_bad, store.size()));
    out.push_back(detail::make_result("organization-agreement", org_bad, org_n));
    std::ostringstream extra;
    extra << "max l1/delta " << total.max_ratio << ", lower-bound misses " << total.lower_violations
          << " (reported only)";
    auto res = detail::make_result("continuity-upper-bound", total.violations, total.samples, extra.str());
    if (cats == 0) res = {"continuity-upper-bound", true, "skipped: no category with 2 members"};
    out.push_back(res);
  }
  return out;
}

inline bool all_passed(const std::vector<SuiteResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return !results.empty();
}

inline void print_suites(const std::vector<SuiteResult>& results, std::ostream& os) {
  for (const auto& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
  }
}

}  // namespace gsdp
