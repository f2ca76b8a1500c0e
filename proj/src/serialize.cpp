/*
 * Copyright 2026 The urtree Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "urtree/serialize.hpp"

#include <cmath>
#include <fstream>

#include "urtree/error.hpp"

namespace urtree {
namespace {

Json Bound(double v) { return std::isinf(v) ? Json(nullptr) : Json(v); }

double BoundFrom(const Json& j, double infinite) {
  return j.is_null() ? infinite : j.get<double>();
}

Json RegionsToJson(const Partition& partition) {
  Json regions = Json::array();
  for (const Region& r : partition.regions()) {
    Json bounds = Json::array();
    for (const Interval& b : r.bounds()) {
      bounds.push_back({{"lo", Bound(b.lo)}, {"hi", Bound(b.hi)}});
    }
    regions.push_back(std::move(bounds));
  }
  return regions;
}

Partition RegionsFromJson(const Json& j) {
  std::vector<Region> regions;
  for (const Json& r : j) {
    std::vector<Interval> bounds;
    for (const Json& b : r) {
      bounds.push_back({BoundFrom(b.at("lo"), -kInf), BoundFrom(b.at("hi"), kInf)});
    }
    regions.emplace_back(std::move(bounds));
  }
  return Partition::FromRegions(std::move(regions));
}

Json VectorToJson(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json SplitLogToJson(const std::vector<SplitRecord>& log) {
  Json out = Json::array();
  for (const SplitRecord& s : log) {
    out.push_back({{"region", s.region},
                   {"feature", s.feature},
                   {"threshold", s.threshold},
                   {"risk", s.risk}});
  }
  return out;
}

std::vector<SplitRecord> SplitLogFromJson(const Json& j) {
  std::vector<SplitRecord> out;
  for (const Json& s : j) {
    out.push_back({s.at("region").get<int>(), s.at("feature").get<int>(),
                   s.at("threshold").get<double>(), s.at("risk").get<double>()});
  }
  return out;
}

template <typename T>
Json Optional(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> OptionalFrom(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void ExpectModel(const Json& j, const char* kind) {
  check_schema_version(j);
  if (j.value("model", std::string()) != kind) {
    throw Error(std::string("expected a ") + kind + " model");
  }
}

const char* SamplingName(FeatureSampling s) {
  return s == FeatureSampling::kPerSplit ? "per_split" : "per_tree";
}

FeatureSampling SamplingFrom(const std::string& name) {
  if (name == "per_tree") return FeatureSampling::kPerTree;
  if (name == "per_split") return FeatureSampling::kPerSplit;
  throw Error("unknown feature_sampling " + name);
}

}  // namespace

void check_schema_version(const Json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw Error("missing schema_version");
  }
  const std::string v = j.at("schema_version").get<std::string>();
  const std::string supported = kSchemaVersion;
  const auto major = [](const std::string& s) { return s.substr(0, s.find('.')); };
  if (major(v) != major(supported)) {
    throw Error("unsupported schema_version " + v);
  }
}

Json tree_config_to_json(const TreeConfig& config) {
  return {{"min_leaf_fraction", config.min_leaf_fraction},
          {"max_leaves", Optional(config.max_leaves)},
          {"max_depth", Optional(config.max_depth)},
          {"features_per_split", Optional(config.features_per_split)},
          {"seed", config.seed},
          {"traversal", "depth_first"}};
}

TreeConfig tree_config_from_json(const Json& j) {
  TreeConfig c;
  c.min_leaf_fraction = j.at("min_leaf_fraction").get<double>();
  c.max_leaves = OptionalFrom<int>(j, "max_leaves");
  c.max_depth = OptionalFrom<int>(j, "max_depth");
  c.features_per_split = OptionalFrom<int>(j, "features_per_split");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.Validate();
  return c;
}

Json tree_to_json(const UncertainTree& tree) {
  return {{"schema_version", kSchemaVersion},
          {"model", "uncertain_tree"},
          {"p", tree.num_features()},
          {"sigma", tree.sigma().values()},
          {"regions", RegionsToJson(tree.partition())},
          {"gamma", VectorToJson(tree.gamma())},
          {"split_log", SplitLogToJson(tree.split_log())},
          {"n_train", tree.n_train()},
          {"config", tree_config_to_json(tree.config())}};
}

Json tree_to_json(const StandardTree& tree) {
  return {{"schema_version", kSchemaVersion},
          {"model", "standard_tree"},
          {"p", tree.num_features()},
          {"regions", RegionsToJson(tree.partition())},
          {"gamma", VectorToJson(tree.leaf_values())},
          {"split_log", SplitLogToJson(tree.split_log())},
          {"n_train", tree.n_train()},
          {"config", tree_config_to_json(tree.config())}};
}

UncertainTree uncertain_tree_from_json(const Json& j) {
  ExpectModel(j, "uncertain_tree");
  UncertainTree tree(RegionsFromJson(j.at("regions")), VectorFromJson(j.at("gamma")),
                     SigmaVector(j.at("sigma").get<std::vector<double>>()),
                     SplitLogFromJson(j.at("split_log")), j.at("n_train").get<int>(),
                     tree_config_from_json(j.at("config")));
  if (tree.num_features() != j.at("p").get<std::size_t>()) {
    throw Error("dimension mismatch");
  }
  return tree;
}

StandardTree standard_tree_from_json(const Json& j) {
  ExpectModel(j, "standard_tree");
  StandardTree tree(RegionsFromJson(j.at("regions")), VectorFromJson(j.at("gamma")),
                    SplitLogFromJson(j.at("split_log")), j.at("n_train").get<int>(),
                    tree_config_from_json(j.at("config")));
  if (tree.num_features() != j.at("p").get<std::size_t>()) {
    throw Error("dimension mismatch");
  }
  return tree;
}

Json forest_to_json(const Forest& forest) {
  const ForestConfig& c = forest.config();
  Json trees = Json::array();
  for (const ForestMember& m : forest.members()) {
    Json t = std::visit([](const auto& tree) { return tree_to_json(tree); }, m.tree);
    t["feature_subset"] = m.features;
    t["tree_seed"] = m.seed;
    trees.push_back(std::move(t));
  }
  return {{"schema_version", kSchemaVersion},
          {"model", "forest"},
          {"p", forest.num_features()},
          {"config",
           {{"tau", c.tau},
            {"mtry", c.ResolvedMtry(forest.num_features())},
            {"bootstrap", c.bootstrap},
            {"feature_sampling", SamplingName(c.feature_sampling)},
            {"seed", c.seed},
            {"variant", c.variant == TreeVariant::kUncertain ? "uncertain" : "standard"},
            {"tree_config", tree_config_to_json(c.tree_config)}}},
          {"trees", std::move(trees)}};
}

Forest forest_from_json(const Json& j) {
  ExpectModel(j, "forest");
  const Json& jc = j.at("config");
  ForestConfig c;
  c.tau = jc.at("tau").get<int>();
  c.mtry = OptionalFrom<int>(jc, "mtry");
  c.bootstrap = jc.at("bootstrap").get<bool>();
  if (jc.contains("feature_sampling")) {
    c.feature_sampling = SamplingFrom(jc.at("feature_sampling").get<std::string>());
  }
  c.seed = jc.at("seed").get<std::uint64_t>();
  const std::string variant = jc.at("variant").get<std::string>();
  if (variant != "standard" && variant != "uncertain") {
    throw Error("unknown forest variant " + variant);
  }
  c.variant = variant == "uncertain" ? TreeVariant::kUncertain : TreeVariant::kStandard;
  c.tree_config = tree_config_from_json(jc.at("tree_config"));

  std::vector<ForestMember> members;
  for (const Json& t : j.at("trees")) {
    ForestMember m{c.variant == TreeVariant::kUncertain
                       ? std::variant<StandardTree, UncertainTree>(uncertain_tree_from_json(t))
                       : std::variant<StandardTree, UncertainTree>(standard_tree_from_json(t)),
                   t.at("feature_subset").get<std::vector<int>>(),
                   t.at("tree_seed").get<std::uint64_t>()};
    members.push_back(std::move(m));
  }
  return Forest(c, j.at("p").get<int>(), std::move(members));
}

Json model_to_json(const ModelFile& file) {
  Json j = std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Forest>) {
          return forest_to_json(m);
        } else {
          return tree_to_json(m);
        }
      },
      file.model);
  j["feature_names"] = file.feature_names;
  return j;
}

ModelFile model_from_json(const Json& j) {
  check_schema_version(j);
  const std::string kind = j.value("model", std::string());
  ModelFile out{[&]() -> Model {
                  if (kind == "uncertain_tree") return uncertain_tree_from_json(j);
                  if (kind == "standard_tree") return standard_tree_from_json(j);
                  if (kind == "forest") return forest_from_json(j);
                  throw Error("unknown model kind '" + kind + "'");
                }(),
                {}};
  if (j.contains("feature_names")) {
    out.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  }
  return out;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error("malformed model file: " + std::string(e.what()));
  }
  try {
    return model_from_json(j);
  } catch (const Json::exception& e) {
    throw Error("malformed model file: " + std::string(e.what()));
  }
}

void save_model(const ModelFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << model_to_json(file).dump(2) << '\n';
}

Json bench_config_to_json(const BenchConfig& config) {
  Json methods = Json::array();
  for (const MethodSpec& m : config.methods) methods.push_back(m.Name());
  Json noise = nullptr;
  if (config.noise) {
    noise = {{"lo_frac", config.noise->lo_frac},
             {"hi_frac", config.noise->hi_frac},
             {"seed", config.noise->seed}};
  }
  return {{"methods", std::move(methods)},
          {"sigma_policy",
           {{"kind", config.sigma_policy.Name()}, {"fixed", config.sigma_policy.fixed}}},
          {"noise", std::move(noise)},
          {"folds", config.folds},
          {"cv_seed", config.cv_seed},
          {"tree_config", tree_config_to_json(config.tree_config)},
          {"mtry", Optional(config.mtry)},
          {"bootstrap", config.bootstrap},
          {"feature_sampling", SamplingName(config.feature_sampling)}};
}

BenchConfig bench_config_from_json(const Json& j) {
  BenchConfig c;
  for (const Json& m : j.at("methods")) c.methods.push_back(MethodSpec::Parse(m.get<std::string>()));
  const Json& sp = j.at("sigma_policy");
  const std::string kind = sp.at("kind").get<std::string>();
  if (kind == "empirical_std") {
    c.sigma_policy = SigmaPolicy::EmpiricalStd();
  } else if (kind == "half_empirical_std") {
    c.sigma_policy = SigmaPolicy::HalfEmpiricalStd();
  } else if (kind == "fixed") {
    c.sigma_policy = SigmaPolicy::Fixed(sp.at("fixed").get<std::vector<double>>());
  } else {
    throw Error("unknown sigma policy " + kind);
  }
  if (!j.at("noise").is_null()) {
    const Json& nz = j.at("noise");
    c.noise = NoiseSpec{nz.at("lo_frac").get<double>(), nz.at("hi_frac").get<double>(),
                        nz.at("seed").get<std::uint64_t>()};
  }
  c.folds = j.at("folds").get<int>();
  c.cv_seed = j.at("cv_seed").get<std::uint64_t>();
  c.tree_config = tree_config_from_json(j.at("tree_config"));
  c.mtry = OptionalFrom<int>(j, "mtry");
  c.bootstrap = j.at("bootstrap").get<bool>();
  if (j.contains("feature_sampling")) {
    c.feature_sampling = SamplingFrom(j.at("feature_sampling").get<std::string>());
  }
  return c;
}

Json report_to_json(const CVReport& report) {
  Json results = Json::array();
  for (const MethodResult& r : report.results) {
    results.push_back({{"method", r.method},
                       {"fold_rmse", r.fold_rmse},
                       {"mean", r.mean},
                       {"std", r.std}});
  }
  return {{"schema_version", kSchemaVersion},
          {"report", "cross_validation"},
          {"dataset", {{"name", report.dataset}, {"n", report.n}, {"p", report.p}}},
          {"config", bench_config_to_json(report.config)},
          {"folds", report.folds},
          {"results", std::move(results)}};
}

}  // namespace urtree
