// gsdp: command-line frontend for prototype construction, signature
// description, typicality ranking, organization maps, clustering evaluation
// and the property-suite verifier.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 property failure.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsdp/gsdp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kPropertyFailure = 3 };

struct Common {
  std::string features;
  std::string head;
  std::string prototypes;
  std::string signatures;
  std::string out;
  std::size_t r = gsdp::kDefaultBlockSide;
  std::uint64_t seed = 0;
  std::string format = "binary";
};

gsdp::Format out_format(const Common& c) {
  return c.format == "csv" ? gsdp::Format::csv : gsdp::Format::binary;
}

std::string ext(const Common& c) { return c.format == "csv" ? ".csv" : ".bin"; }

fs::path prepare_out(const Common& c) {
  if (c.out.empty()) throw gsdp::ValidationError("--out is required");
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw gsdp::IoError("cannot create output directory " + c.out + ": " + ec.message());
  return fs::path(c.out);
}

void write_manifest(const fs::path& dir, const std::string& command, const Common& c,
                    const std::vector<fs::path>& outputs, json extra = json::object()) {
  json j;
  j["command"] = command;
  json inputs = json::object();
  if (!c.features.empty()) inputs["features"] = c.features;
  if (!c.head.empty()) inputs["head"] = c.head;
  if (!c.prototypes.empty()) inputs["prototypes"] = c.prototypes;
  if (!c.signatures.empty()) inputs["signatures"] = c.signatures;
  j["inputs"] = inputs;
  j["outputs"] = json::array();
  for (const auto& p : outputs) j["outputs"].push_back(p.filename().string());
  j["r"] = c.r;
  j["seed"] = c.seed;
  j["tool_version"] = gsdp::kVersion;
  for (auto& [k, v] : extra.items()) j[k] = v;
  gsdp::detail::write_file(dir / "manifest.json", j.dump(2) + "\n");
}

gsdp::FeatureSet load_features(const std::string& path) {
  return gsdp::read_feature_set(path, gsdp::format_from_path(path));
}

gsdp::HeadParams load_head(const std::string& path) {
  return gsdp::read_head(path, gsdp::format_from_path(path));
}

void add_common(CLI::App* cmd, Common& c, bool features, bool head, bool protos, bool r, bool seed,
                bool format, bool out) {
  if (features) cmd->add_option("--features", c.features, "Feature set (.csv or binary)");
  if (head) cmd->add_option("--head", c.head, "Classifier head (.csv or binary)");
  if (protos) cmd->add_option("--prototypes", c.prototypes, "Prototype store");
  if (r) cmd->add_option("--r", c.r, "Block side length")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 15));
  if (seed) cmd->add_option("--seed", c.seed, "Random seed");
  if (format) cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "binary"}));
  if (out) cmd->add_option("--out", c.out, "Output directory");
}

void require(const std::string& v, const char* flag) {
  if (v.empty()) throw gsdp::ValidationError(std::string(flag) + " is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global semantic descriptor toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gsdp::kVersion);

  Common c;

  // synth
  gsdp::SynthParams sp;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic feature set and fitted head");
  synth->add_option("--categories", sp.n_categories, "Number of categories")->default_val(5);
  synth->add_option("--per-category", sp.per_category, "Members per category")->default_val(100);
  synth->add_option("--m", sp.m, "Feature dimensionality")->default_val(64);
  synth->add_option("--separation", sp.separation, "Distance between category means")->default_val(10.0);
  add_common(synth, c, false, false, false, false, true, true, true);

  auto* proto = app.add_subcommand("prototype", "Build one prototype per category");
  add_common(proto, c, true, true, false, false, false, false, true);

  std::string taxonomy = "object";
  std::string assign = "predicted";
  auto* describe = app.add_subcommand("describe", "Compute signatures");
  add_common(describe, c, true, false, true, true, false, true, true);
  describe->add_option("--taxonomy", taxonomy, "object | abstract | category")
      ->check(CLI::IsMember({"object", "abstract", "category"}));
  describe->add_option("--assign", assign, "Prototype choice per object: predicted | label")
      ->check(CLI::IsMember({"predicted", "label"}));

  std::size_t category = 0;
  std::size_t top_k = 5;
  auto* rank = app.add_subcommand("rank", "Rank one category's members by prototypical distance");
  add_common(rank, c, true, false, true, false, false, false, true);
  rank->add_option("--category", category, "Category index")->required();
  rank->add_option("--k", top_k, "Closest/farthest count to print")->default_val(5);

  std::optional<std::size_t> org_category;
  auto* organize = app.add_subcommand("organize", "Export (semantic value, distance) points");
  add_common(organize, c, true, false, true, false, false, false, true);
  organize->add_option("--signatures", c.signatures, "Signature file (instead of --features)");
  organize->add_option("--category", org_category, "Restrict to one category");

  std::size_t k_min = 3;
  std::optional<std::size_t> k_max;
  auto* cluster = app.add_subcommand("cluster-eval", "k-means sweep with external cluster metrics");
  add_common(cluster, c, true, false, false, false, true, false, true);
  cluster->add_option("--signatures", c.signatures, "Cluster these signatures (labels from --features)");
  cluster->add_option("--k-min", k_min, "Smallest k")->default_val(3);
  cluster->add_option("--k-max", k_max, "Largest k (default: category count)");

  auto* verify = app.add_subcommand("verify", "Run the property suites");
  add_common(verify, c, true, true, false, true, true, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*synth) {
      sp.seed = c.seed;
      const auto dir = prepare_out(c);
      const auto data = gsdp::generate_synthetic(sp);
      const auto fpath = dir / ("features" + ext(c));
      const auto hpath = dir / ("head" + ext(c));
      gsdp::write_feature_set(data.features, fpath, out_format(c));
      gsdp::write_head(data.head, hpath, out_format(c));
      const double acc = gsdp::head_accuracy(data.features, data.head);
      write_manifest(dir, "synth", c, {fpath, gsdp::meta_sidecar_path(fpath), hpath},
                     {{"categories", sp.n_categories},
                      {"per_category", sp.per_category},
                      {"m", sp.m},
                      {"separation", sp.separation},
                      {"head_accuracy", acc}});
      std::cout << "wrote " << data.features.size() << " objects (m=" << sp.m
                << "), head accuracy " << acc << "\n";
      return kOk;
    }

    if (*proto) {
      require(c.features, "--features");
      require(c.head, "--head");
      const auto set = load_features(c.features);
      const auto head = load_head(c.head);
      const auto dir = prepare_out(c);
      std::vector<std::size_t> skipped;
      const auto store = gsdp::build_prototypes(set, head, &skipped);
      const auto ppath = dir / "prototypes.bin";
      gsdp::write_prototypes(store, ppath);
      json counts = json::object();
      for (const auto& [cat, p] : store) counts[std::to_string(cat)] = p.n_typical;
      write_manifest(dir, "prototype", c, {ppath},
                     {{"skipped_categories", skipped}, {"warnings", skipped.size()}, {"n_typical", counts}});
      for (auto s : skipped) std::cerr << "warning: category " << s << " has no typical members; skipped\n";
      std::cout << "built " << store.size() << " prototypes, " << skipped.size() << " warnings\n";
      return kOk;
    }

    if (*describe) {
      require(c.prototypes, "--prototypes");
      const auto store = gsdp::read_prototypes(c.prototypes);
      if (store.empty()) throw gsdp::ValidationError("prototype store is empty");
      const auto config = gsdp::plan_grid(store.dim(), c.r);
      std::vector<gsdp::Signature> sigs;
      std::size_t unassigned = 0;
      if (taxonomy == "object") {
        require(c.features, "--features");
        const auto set = load_features(c.features);
        gsdp::detail::require_dim(set.m, store.dim(), "features vs prototypes");
        for (const auto& o : set.objects) {
          const auto cat = assign == "label" ? o.label : gsdp::classify(o.features, store);
          if (!store.contains(cat)) {
            ++unassigned;
            continue;
          }
          auto s = gsdp::describe_object(o.features, store.at(cat), config);
          s.id = o.id;
          sigs.push_back(std::move(s));
        }
      } else {
        for (const auto& [cat, p] : store) {
          auto s = taxonomy == "abstract" ? gsdp::describe_abstract_prototype(p, config)
                                          : gsdp::describe_category(p, config);
          s.id = "prototype_" + std::to_string(cat);
          sigs.push_back(std::move(s));
        }
      }
      const auto dir = prepare_out(c);
      const auto spath = dir / ("signatures" + ext(c));
      gsdp::write_signatures(sigs, spath, out_format(c));
      write_manifest(dir, "describe", c, {spath},
                     {{"taxonomy", taxonomy},
                      {"assign", assign},
                      {"signature_length", config.signature_length()},
                      {"p", config.p},
                      {"q", config.q},
                      {"m_padded", config.m_padded},
                      {"unassigned_objects", unassigned}});
      std::cout << "wrote " << sigs.size() << " signatures of length " << config.signature_length() << "\n";
      return kOk;
    }

    if (*rank) {
      require(c.features, "--features");
      require(c.prototypes, "--prototypes");
      const auto set = load_features(c.features);
      const auto store = gsdp::read_prototypes(c.prototypes);
      const auto& p = store.at(category);
      const auto ranking = gsdp::rank_members(gsdp::members_of(set, category), p);
      const auto dir = prepare_out(c);
      const auto rpath = dir / "ranking.csv";
      gsdp::write_ranking_csv(ranking, rpath);
      write_manifest(dir, "rank", c, {rpath}, {{"category", category}, {"k", top_k}});
      std::cout << "closest " << top_k << ":\n";
      for (const auto& e : gsdp::closest(ranking, top_k)) std::cout << "  " << e.rank << " " << e.id << " " << e.delta << "\n";
      std::cout << "farthest " << top_k << ":\n";
      for (const auto& e : gsdp::farthest(ranking, top_k)) std::cout << "  " << e.rank << " " << e.id << " " << e.delta << "\n";
      return kOk;
    }

    if (*organize) {
      if (c.features.empty() == c.signatures.empty()) {
        throw gsdp::ValidationError("organize needs exactly one of --features or --signatures");
      }
      std::vector<gsdp::OrganizationPoint> pts;
      if (!c.features.empty()) {
        require(c.prototypes, "--prototypes");
        const auto set = load_features(c.features);
        const auto store = gsdp::read_prototypes(c.prototypes);
        for (const auto& [cat, p] : store) {
          if (org_category && *org_category != cat) continue;
          const auto rho = gsdp::map_rho(gsdp::members_of(set, cat), p);
          pts.push_back({"prototype_" + std::to_string(cat), gsdp::semantic_value(p.mean, p), 0.0,
                         gsdp::PointSource::features});
          pts.insert(pts.end(), rho.begin(), rho.end());
        }
      } else {
        auto sigs = gsdp::read_signatures(c.signatures, gsdp::format_from_path(c.signatures));
        if (org_category) {
          std::erase_if(sigs, [&](const auto& s) { return s.category != *org_category; });
        }
        pts = gsdp::map_gamma(sigs);
      }
      const auto dir = prepare_out(c);
      const auto opath = dir / "organization.csv";
      gsdp::write_organization_csv(pts, opath);
      write_manifest(dir, "organize", c, {opath}, {{"points", pts.size()}});
      std::cout << "wrote " << pts.size() << " organization points\n";
      return kOk;
    }

    if (*cluster) {
      require(c.features, "--features");
      const auto set = load_features(c.features);
      std::vector<gsdp::Vector> points;
      std::vector<std::size_t> labels;
      if (c.signatures.empty()) {
        for (const auto& o : set.objects) {
          points.push_back(o.features);
          labels.push_back(o.label);
        }
      } else {
        std::map<std::string, std::size_t> label_of;
        for (const auto& o : set.objects) label_of[o.id] = o.label;
        for (auto& s : gsdp::read_signatures(c.signatures, gsdp::format_from_path(c.signatures))) {
          auto it = label_of.find(s.id);
          if (it == label_of.end()) throw gsdp::ValidationError("signature '" + s.id + "' has no matching feature record");
          points.push_back(std::move(s.values));
          labels.push_back(it->second);
        }
      }
      std::vector<std::size_t> distinct(labels);
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      const std::size_t hi = k_max.value_or(distinct.size());
      if (k_min < 1 || k_min > hi) throw gsdp::ValidationError("empty k range");
      std::vector<std::size_t> ks;
      for (std::size_t k = k_min; k <= hi; ++k) ks.push_back(k);
      const auto reports = gsdp::cluster_eval_sweep(points, labels, ks, c.seed);
      const auto dir = prepare_out(c);
      const auto cpath = dir / "cluster_report.csv";
      gsdp::write_cluster_reports_csv(reports, cpath);
      write_manifest(dir, "cluster-eval", c, {cpath},
                     {{"k_min", k_min}, {"k_max", hi}, {"ami_variant", "permutation-model EMI, max-entropy normalization"},
                      {"space", c.signatures.empty() ? "features" : "signatures"}});
      for (const auto& r : reports) {
        std::cout << "k=" << r.k << " H=" << r.homogeneity << " C=" << r.completeness << " V=" << r.v_measure
                  << " ARI=" << r.ari << " AMI=" << r.ami << "\n";
      }
      return kOk;
    }

    if (*verify) {
      require(c.features, "--features");
      require(c.head, "--head");
      const auto set = load_features(c.features);
      const auto head = load_head(c.head);
      gsdp::VerifyOptions opt;
      opt.r = c.r;
      opt.seed = c.seed;
      const auto results = gsdp::run_property_suites(set, head, opt);
      gsdp::print_suites(results, std::cout);
      const bool ok = gsdp::all_passed(results);
      std::cout << (ok ? "all property suites passed\n" : "property suite failure\n");
      return ok ? kOk : kPropertyFailure;
    }
  } catch (const gsdp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const gsdp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}
