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

#include "urtree/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "urtree/error.hpp"
#include "urtree/forest.hpp"
#include "urtree/parallel.hpp"
#include "urtree/rng.hpp"

namespace urtree {

std::vector<double> empirical_std(const Matrix& X) {
  if (X.rows() < 2) throw Error("need at least two observations");
  std::vector<double> out(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double ss = (X.col(j).array() - mean).square().sum();
    out[j] = std::sqrt(ss / static_cast<double>(X.rows() - 1));
  }
  return out;
}

std::string SigmaPolicy::Name() const {
  switch (kind) {
    case Kind::kEmpiricalStd:
      return "empirical_std";
    case Kind::kHalfEmpiricalStd:
      return "half_empirical_std";
    case Kind::kFixed:
      return "fixed";
  }
  return "unknown";
}

SigmaVector sigma_from_policy(const SigmaPolicy& policy, const Matrix& X) {
  switch (policy.kind) {
    case SigmaPolicy::Kind::kEmpiricalStd:
      return SigmaVector(empirical_std(X));
    case SigmaPolicy::Kind::kHalfEmpiricalStd: {
      std::vector<double> s = empirical_std(X);
      for (double& v : s) v *= 0.5;
      return SigmaVector(std::move(s));
    }
    case SigmaPolicy::Kind::kFixed:
      if (policy.fixed.size() != static_cast<std::size_t>(X.cols())) {
        throw Error("dimension mismatch");
      }
      return SigmaVector(policy.fixed);
  }
  throw Error("unknown sigma policy");
}

Dataset inject_noise(const Dataset& data, const NoiseSpec& spec) {
  if (!(spec.lo_frac >= 0.0 && spec.lo_frac < spec.hi_frac)) {
    throw Error("noise bounds must satisfy 0 <= lo < hi");
  }
  const std::vector<double> scale = empirical_std(data.X);
  Dataset out = data;
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    const std::string key = static_cast<std::size_t>(j) < data.feature_names.size()
                                ? data.feature_names[j]
                                : "x" + std::to_string(j);
    Rng rng(DeriveSeed(spec.seed, {HashString(key)}));
    const double lo = spec.lo_frac * scale[j];
    const double hi = spec.hi_frac * scale[j];
    if (scale[j] == 0.0) continue;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double sign = rng.Rademacher();
      out.X(i, j) += sign * rng.Uniform(lo, hi);
    }
  }
  return out;
}

std::vector<std::vector<int>> kfold_indices(int n, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("need at least two folds");
  if (n < k) throw Error("fewer observations than folds");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.Below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<int>> folds(k);
  int start = 0;
  for (int f = 0; f < k; ++f) {
    const int size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + start, order.begin() + start + size);
    std::sort(folds[f].begin(), folds[f].end());
    start += size;
  }
  return folds;
}

double rmse(const Vector& prediction, const Vector& truth) {
  if (prediction.size() != truth.size()) throw Error("dimension mismatch");
  if (truth.size() == 0) throw Error("empty input");
  return std::sqrt((prediction - truth).squaredNorm() /
                   static_cast<double>(truth.size()));
}

MethodSpec MethodSpec::Parse(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (c != ' ') text.push_back(c);
  }
  std::string base = text;
  std::optional<int> tau;
  if (const auto open = text.find('('); open != std::string::npos) {
    if (text.back() != ')') throw UsageError("unknown method: " + raw);
    base = text.substr(0, open);
    const std::string inner = text.substr(open + 1, text.size() - open - 2);
    try {
      std::size_t used = 0;
      tau = std::stoi(inner, &used);
      if (used != inner.size()) throw UsageError("unknown method: " + raw);
    } catch (const std::logic_error&) {
      throw UsageError("unknown method: " + raw);
    }
    if (*tau < 1) throw UsageError("tau must be >= 1");
  }
  MethodSpec m;
  if (base == "standard_tree") {
    m.kind = Kind::kStandardTree;
  } else if (base == "hybrid_tree") {
    m.kind = Kind::kHybridTree;
  } else if (base == "uncertain_tree") {
    m.kind = Kind::kUncertainTree;
  } else if (base == "standard_rf") {
    m.kind = Kind::kStandardForest;
    m.tau = tau.value_or(100);
  } else if (base == "uncertain_rf") {
    m.kind = Kind::kUncertainForest;
    m.tau = tau.value_or(15);
  } else {
    throw UsageError("unknown method: " + raw);
  }
  if (tau && m.tau == 0) throw UsageError("unknown method: " + raw);
  return m;
}

std::string MethodSpec::Name() const {
  switch (kind) {
    case Kind::kStandardTree:
      return "standard_tree";
    case Kind::kHybridTree:
      return "hybrid_tree";
    case Kind::kUncertainTree:
      return "uncertain_tree";
    case Kind::kStandardForest:
      return "standard_rf(" + std::to_string(tau) + ")";
    case Kind::kUncertainForest:
      return "uncertain_rf(" + std::to_string(tau) + ")";
  }
  return "unknown";
}

const MethodResult& CVReport::Result(const std::string& method) const {
  for (const auto& r : results) {
    if (r.method == method) return r;
  }
  throw Error("no result for method " + method);
}

void RowAccessAudit::Record(Phase phase, int fold, std::span<const int> rows) {
  std::lock_guard lock(mutex_);
  entries_.push_back({phase, fold, std::vector<int>(rows.begin(), rows.end())});
}

std::vector<int> RowAccessAudit::Rows(Phase phase, int fold) const {
  std::lock_guard lock(mutex_);
  std::vector<int> out;
  for (const auto& e : entries_) {
    if (e.phase == phase && e.fold == fold) {
      out.insert(out.end(), e.rows.begin(), e.rows.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

Vector FitAndPredict(const MethodSpec& method, const Dataset& train,
                     const Matrix& test_X, const BenchConfig& config,
                     std::uint64_t seed) {
  using Kind = MethodSpec::Kind;
  const auto sigma = [&] { return sigma_from_policy(config.sigma_policy, train.X); };
  switch (method.kind) {
    case Kind::kStandardTree:
      return fit_standard_tree(train.X, train.y, config.tree_config).Predict(test_X);
    case Kind::kHybridTree: {
      const StandardTree tree = fit_standard_tree(train.X, train.y, config.tree_config);
      return uncertainize(tree, train.X, train.y, sigma()).Predict(test_X);
    }
    case Kind::kUncertainTree:
      return fit_uncertain_tree(train.X, train.y, sigma(), config.tree_config)
          .Predict(test_X);
    case Kind::kStandardForest:
    case Kind::kUncertainForest: {
      ForestConfig fc;
      fc.tau = method.tau;
      fc.mtry = config.mtry;
      fc.bootstrap = config.bootstrap;
      fc.feature_sampling = config.feature_sampling;
      fc.seed = seed;
      fc.tree_config = config.tree_config;
      fc.variant = method.kind == Kind::kUncertainForest ? TreeVariant::kUncertain
                                                        : TreeVariant::kStandard;
      std::optional<SigmaVector> s;
      if (fc.variant == TreeVariant::kUncertain) s = sigma();
      return fit_forest(train.X, train.y, s, fc).Predict(test_X);
    }
  }
  throw Error("unknown method");
}

}  // namespace

CVReport run_benchmark(const Dataset& data, const BenchConfig& config,
                       int threads, RowAccessAudit* audit) {
  if (config.methods.empty()) throw UsageError("no methods requested");
  config.tree_config.Validate();
  for (const MethodSpec& method : config.methods) {
    if (method.kind == MethodSpec::Kind::kStandardForest ||
        method.kind == MethodSpec::Kind::kUncertainForest) {
      ForestConfig fc;
      fc.mtry = config.mtry;
      fc.ResolvedMtry(static_cast<int>(data.p()));
    }
  }
  const int n = static_cast<int>(data.n());
  const Dataset working = config.noise ? inject_noise(data, *config.noise) : data;

  CVReport report;
  report.dataset = data.name;
  report.n = data.n();
  report.p = data.p();
  report.config = config;
  report.folds = kfold_indices(n, config.folds, config.cv_seed);
  for (const auto& fold : report.folds) {
    const auto train_n = static_cast<double>(n - static_cast<int>(fold.size()));
    if (config.tree_config.min_leaf_fraction * train_n < 1.0) {
      throw Error("fold too small for min_leaf rule");
    }
  }

  const std::size_t k = report.folds.size();
  const std::size_t m = config.methods.size();
  std::vector<double> scores(k * m, 0.0);
  ParallelFor(k * m, threads, [&](std::size_t cell) {
    const int f = static_cast<int>(cell / m);
    const std::size_t method_index = cell % m;
    const std::vector<int>& test_rows = report.folds[f];
    std::vector<int> train_rows;
    train_rows.reserve(static_cast<std::size_t>(n) - test_rows.size());
    for (int i = 0, t = 0; i < n; ++i) {
      if (t < static_cast<int>(test_rows.size()) && test_rows[t] == i) {
        ++t;
      } else {
        train_rows.push_back(i);
      }
    }
    if (audit) audit->Record(RowAccessAudit::Phase::kFit, f, train_rows);
    const Dataset train = working.Rows(train_rows);
    if (audit) audit->Record(RowAccessAudit::Phase::kScore, f, test_rows);
    const Dataset test = working.Rows(test_rows);
    const std::uint64_t seed =
        DeriveSeed(config.cv_seed, {static_cast<std::uint64_t>(f), method_index});
    const Vector prediction =
        FitAndPredict(config.methods[method_index], train, test.X, config, seed);
    scores[cell] = rmse(prediction, test.y);
  });

  for (std::size_t mi = 0; mi < m; ++mi) {
    MethodResult r;
    r.method = config.methods[mi].Name();
    for (std::size_t f = 0; f < k; ++f) r.fold_rmse.push_back(scores[f * m + mi]);
    const double kk = static_cast<double>(k);
    r.mean = std::accumulate(r.fold_rmse.begin(), r.fold_rmse.end(), 0.0) / kk;
    double ss = 0.0;
    for (double s : r.fold_rmse) ss += (s - r.mean) * (s - r.mean);
    r.std = std::sqrt(ss / kk);
    report.results.push_back(std::move(r));
  }
  return report;
}

std::string format_report_table(const CVReport& report) {
  std::size_t width = std::string("method").size();
  for (const auto& r : report.results) width = std::max(width, r.method.size());
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %s\n", static_cast<int>(width), "method",
                "RMSE mean (std)");
  out << line;
  for (const auto& r : report.results) {
    std::snprintf(line, sizeof line, "%-*s  %.4f (%.4f)\n", static_cast<int>(width),
                  r.method.c_str(), r.mean, r.std);
    out << line;
  }
  return out.str();
}

}  // namespace urtree
