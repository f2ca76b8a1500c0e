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


#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "urtree/error.hpp"
#include "urtree/serialize.hpp"

using urtree::Json;
using urtree::Matrix;
using urtree::SigmaVector;
using urtree::Vector;

namespace {

struct Data {
  Matrix X;
  Vector y;
};

Data Make(std::uint64_t seed) {
  urtree::Rng rng(seed);
  Data d{support::RandomMatrix(rng, 90, 3, -1, 1), Vector(90)};
  for (int i = 0; i < 90; ++i) d.y(i) = d.X(i, 0) * d.X(i, 1) + 0.2 * rng.Normal();
  return d;
}

Json RoundTrip(const Json& j) { return Json::parse(j.dump()); }

}  // namespace

TEST_CASE("uncertain tree round trip") {
  const Data d = Make(1);
  urtree::TreeConfig config;
  config.max_depth = 3;
  const auto tree = urtree::fit_uncertain_tree(d.X, d.y, SigmaVector({0.1, 0.0, 0.3}), config);
  const Json j = urtree::tree_to_json(tree);
  CHECK(j["model"] == "uncertain_tree");
  CHECK(j["regions"][0][0]["lo"].is_null());
  const auto back = urtree::uncertain_tree_from_json(RoundTrip(j));
  CHECK(back.partition() == tree.partition());
  CHECK(back.gamma() == tree.gamma());
  CHECK(back.sigma() == tree.sigma());
  CHECK(back.split_log() == tree.split_log());
  CHECK(back.config() == tree.config());
  CHECK(back.n_train() == 90);
  CHECK(back.Predict(d.X) == tree.Predict(d.X));
}

TEST_CASE("standard tree and forest round trip") {
  const Data d = Make(2);
  const auto tree = urtree::fit_standard_tree(d.X, d.y);
  const auto tb = urtree::standard_tree_from_json(RoundTrip(urtree::tree_to_json(tree)));
  CHECK(tb.Predict(d.X) == tree.Predict(d.X));
  CHECK(tb.leaf_values() == tree.leaf_values());

  urtree::ForestConfig fc;
  fc.tau = 4;
  fc.seed = 31;
  fc.variant = urtree::TreeVariant::kUncertain;
  fc.feature_sampling = urtree::FeatureSampling::kPerSplit;
  const auto forest = urtree::fit_forest(d.X, d.y, SigmaVector({0.1, 0.1, 0.1}), fc);
  const Json fj = urtree::forest_to_json(forest);
  CHECK(fj["trees"].size() == 4);
  CHECK(fj["trees"][0].contains("feature_subset"));
  CHECK(fj["trees"][0].contains("tree_seed"));
  const auto fb = urtree::forest_from_json(RoundTrip(fj));
  CHECK(fb.Predict(d.X) == forest.Predict(d.X));
  CHECK(fb.config().feature_sampling == urtree::FeatureSampling::kPerSplit);
  CHECK(fb.config().seed == 31);
}

TEST_CASE("model files on disk") {
  const Data d = Make(3);
  const auto tree = urtree::fit_uncertain_tree(d.X, d.y, SigmaVector({0.2, 0.2, 0.2}));
  const auto path = std::filesystem::temp_directory_path() / "urtree_model_roundtrip.json";
  urtree::save_model({tree, {"a", "b", "c"}}, path.string());
  const auto file = urtree::load_model(path.string());
  CHECK(file.feature_names == std::vector<std::string>{"a", "b", "c"});
  CHECK(std::get<urtree::UncertainTree>(file.model).Predict(d.X) == tree.Predict(d.X));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(urtree::load_model(path.string()), urtree::Error);
}

TEST_CASE("schema versions") {
  CHECK_NOTHROW(urtree::check_schema_version(Json{{"schema_version", "1.7"}}));
  CHECK_THROWS_AS(urtree::check_schema_version(Json{{"schema_version", "2.0"}}), urtree::Error);
  CHECK_THROWS_AS(urtree::check_schema_version(Json::object()), urtree::Error);
  const Data d = Make(4);
  Json j = urtree::tree_to_json(urtree::fit_standard_tree(d.X, d.y));
  j["schema_version"] = "9.0";
  CHECK_THROWS_AS(urtree::model_from_json(j), urtree::Error);
}

TEST_CASE("bench config survives json") {
  urtree::BenchConfig c;
  c.methods = {urtree::MethodSpec::Parse("standard_rf(100)"), urtree::MethodSpec::Parse("hybrid_tree")};
  c.sigma_policy = urtree::SigmaPolicy::Fixed({0.5, 1.5});
  c.noise = urtree::NoiseSpec{0.05, 0.2, 77};
  c.folds = 3;
  c.cv_seed = 0xfeedfacecafebeefULL;
  c.tree_config.max_leaves = 6;
  c.mtry = 2;
  c.bootstrap = false;
  c.feature_sampling = urtree::FeatureSampling::kPerSplit;
  CHECK(urtree::bench_config_from_json(RoundTrip(urtree::bench_config_to_json(c))) == c);
}
