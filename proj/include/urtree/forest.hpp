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

#ifndef URTREE_FOREST_HPP_
#define URTREE_FOREST_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "urtree/linalg.hpp"
#include "urtree/prob.hpp"
#include "urtree/tree.hpp"

namespace urtree {

enum class TreeVariant { kStandard, kUncertain };

// Where the mtry features are drawn: afresh at every region expansion (each
// tree then sees all features), or once per tree.
enum class FeatureSampling { kPerSplit, kPerTree };

struct ForestConfig {
  int tau = 100;
  // Features drawn per split (or per tree); unset means 3, or ceil(p / 3)
  // when p < 9.
  std::optional<int> mtry;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  TreeConfig tree_config;
  TreeVariant variant = TreeVariant::kStandard;
  FeatureSampling feature_sampling = FeatureSampling::kPerSplit;

  int ResolvedMtry(int p) const;
  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

// A fitted tree living on a subset of the features.
struct ForestMember {
  std::variant<StandardTree, UncertainTree> tree;
  // Ascending feature indices of the full input the tree was trained on.
  std::vector<int> features;
  std::uint64_t seed = 0;

  double Predict(std::span<const double> x) const;
};

class Forest {
 public:
  Forest(ForestConfig config, int num_features, std::vector<ForestMember> members);

  // Mean of the member predictions.
  double Predict(std::span<const double> x) const;
  Vector Predict(const Matrix& X) const;

  const ForestConfig& config() const { return config_; }
  int num_features() const { return num_features_; }
  const std::vector<ForestMember>& members() const { return members_; }

 private:
  ForestConfig config_;
  int num_features_;
  std::vector<ForestMember> members_;
};

// Tree t draws its bootstrap sample and features (per tree or per split) from a stream
// seeded by (config.seed, t), so the result does not depend on `threads`.
// `sigma` is required for the uncertain variant.
Forest fit_forest(const Matrix& X, const Vector& y,
                  const std::optional<SigmaVector>& sigma,
                  const ForestConfig& config, int threads = 1);

double predict_forest(const Forest& forest, std::span<const double> x);

}  // namespace urtree

#endif  // URTREE_FOREST_HPP_
