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

#include "urtree/forest.hpp"

#include <algorithm>
#include <numeric>

#include "urtree/error.hpp"
#include "urtree/parallel.hpp"
#include "urtree/rng.hpp"

namespace urtree {

int ForestConfig::ResolvedMtry(int p) const {
  const int m = mtry ? *mtry : (p < 9 ? (p + 2) / 3 : 3);
  if (m < 1) throw UsageError("mtry must be >= 1");
  if (m > p) throw UsageError("mtry must not exceed the number of features");
  return m;
}

double ForestMember::Predict(std::span<const double> x) const {
  std::vector<double> sub(features.size());
  for (std::size_t c = 0; c < features.size(); ++c) {
    if (static_cast<std::size_t>(features[c]) >= x.size()) {
      throw Error("dimension mismatch");
    }
    sub[c] = x[features[c]];
  }
  return std::visit([&](const auto& t) { return t.Predict(sub); }, tree);
}

Forest::Forest(ForestConfig config, int num_features,
               std::vector<ForestMember> members)
    : config_(config), num_features_(num_features), members_(std::move(members)) {
  if (members_.empty()) throw Error("forest needs at least one tree");
}

double Forest::Predict(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(num_features_)) {
    throw Error("dimension mismatch");
  }
  double sum = 0.0;
  for (const ForestMember& m : members_) sum += m.Predict(x);
  return sum / static_cast<double>(members_.size());
}

Vector Forest::Predict(const Matrix& X) const {
  if (X.cols() != num_features_) throw Error("dimension mismatch");
  Vector out(X.rows());
  std::vector<double> row(static_cast<std::size_t>(num_features_));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (int j = 0; j < num_features_; ++j) row[j] = X(i, j);
    out(i) = Predict(row);
  }
  return out;
}

double predict_forest(const Forest& forest, std::span<const double> x) {
  return forest.Predict(x);
}

Forest fit_forest(const Matrix& X, const Vector& y,
                  const std::optional<SigmaVector>& sigma,
                  const ForestConfig& config, int threads) {
  if (config.tau < 1) throw UsageError("tau must be >= 1");
  if (X.rows() != y.size()) throw Error("dimension mismatch");
  const int p = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  const int mtry = config.ResolvedMtry(p);
  config.tree_config.Validate();
  if (config.variant == TreeVariant::kUncertain) {
    if (!sigma) throw Error("uncertain forest needs sigma");
    if (sigma->size() != static_cast<std::size_t>(p)) throw Error("dimension mismatch");
  }

  std::vector<std::optional<ForestMember>> slots(static_cast<std::size_t>(config.tau));
  ParallelFor(slots.size(), threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = DeriveSeed(config.seed, {t});
    Rng rng(tree_seed);

    const bool per_tree = config.feature_sampling == FeatureSampling::kPerTree;
    const int width = per_tree ? mtry : p;
    std::vector<int> pool(p);
    std::iota(pool.begin(), pool.end(), 0);
    if (per_tree) {
      for (int c = 0; c < mtry; ++c) {
        const auto pick = c + static_cast<int>(rng.Below(static_cast<std::uint64_t>(p - c)));
        std::swap(pool[c], pool[pick]);
      }
    }
    std::vector<int> features(pool.begin(), pool.begin() + width);
    std::sort(features.begin(), features.end());
    TreeConfig tree_config = config.tree_config;
    if (!per_tree) {
      tree_config.features_per_split = mtry;
      tree_config.seed = DeriveSeed(tree_seed, {0});
    }

    std::vector<int> rows(n);
    if (config.bootstrap) {
      for (int& r : rows) r = static_cast<int>(rng.Below(static_cast<std::uint64_t>(n)));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    Matrix sub_X(n, width);
    Vector sub_y(n);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < width; ++c) sub_X(i, c) = X(rows[i], features[c]);
      sub_y(i) = y(rows[i]);
    }

    ForestMember member{
        config.variant == TreeVariant::kUncertain
            ? std::variant<StandardTree, UncertainTree>(fit_uncertain_tree(
                  sub_X, sub_y, sigma->Select(features), tree_config))
            : std::variant<StandardTree, UncertainTree>(
                  fit_standard_tree(sub_X, sub_y, tree_config)),
        std::move(features), tree_seed};
    slots[t] = std::move(member);
  });

  std::vector<ForestMember> members;
  members.reserve(slots.size());
  for (auto& s : slots) members.push_back(std::move(*s));
  return Forest(config, p, std::move(members));
}

}  // namespace urtree
