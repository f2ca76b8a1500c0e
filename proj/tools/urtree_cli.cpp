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

// urtree: fit, predict, benchmark and diagnose uncertain regression trees.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "urtree/bench.hpp"
#include "urtree/dataset.hpp"
#include "urtree/error.hpp"
#include "urtree/forest.hpp"
#include "urtree/parallel.hpp"
#include "urtree/partition.hpp"
#include "urtree/serialize.hpp"
#include "urtree/tree.hpp"

namespace {

using urtree::Json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "table";
};

struct DataOptions {
  std::string path;
  std::string target;
  std::optional<int> target_index;
};

struct SigmaOptions {
  std::string policy = "empirical";
  std::string file;
};

struct TreeOptions {
  double min_leaf_frac = 0.1;
  std::optional<int> max_leaves;
  std::optional<int> max_depth;
};

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

urtree::CsvLoad LoadData(const DataOptions& d) {
  if (d.target_index) return urtree::load_csv(d.path, *d.target_index);
  if (d.target.empty()) throw urtree::UsageError("--target or --target-index is required");
  return urtree::load_csv(d.path, d.target);
}

std::vector<double> ReadNumbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw urtree::Error("cannot open " + path);
  std::vector<double> out;
  std::string token;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& c : text) {
    if (c == ',' || c == ';' || c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  std::istringstream tokens(text);
  while (tokens >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw urtree::Error("unparseable sigma value '" + token + "'");
    }
  }
  return out;
}

urtree::SigmaPolicy PolicyFrom(const SigmaOptions& s) {
  if (s.policy == "empirical") return urtree::SigmaPolicy::EmpiricalStd();
  if (s.policy == "half") return urtree::SigmaPolicy::HalfEmpiricalStd();
  if (s.policy == "file") {
    if (s.file.empty()) throw urtree::UsageError("--sigma file needs --sigma-file");
    return urtree::SigmaPolicy::Fixed(ReadNumbers(s.file));
  }
  throw urtree::UsageError("unknown --sigma " + s.policy);
}

urtree::TreeConfig TreeConfigFrom(const TreeOptions& t) {
  urtree::TreeConfig c;
  c.min_leaf_fraction = t.min_leaf_frac;
  c.max_leaves = t.max_leaves;
  c.max_depth = t.max_depth;
  c.Validate();
  return c;
}

Json DataJson(const urtree::Dataset& d, const urtree::CsvLoad& load) {
  return {{"name", d.name},
          {"n", d.n()},
          {"p", d.p()},
          {"target", d.target_name},
          {"features", d.feature_names},
          {"rejected_rows", load.rejected_rows},
          {"dropped_columns", load.dropped_columns}};
}

Json TheoremJson(const urtree::SigmaVector& sigma, const urtree::Partition& partition) {
  const auto bound = urtree::invertibility_bound(partition, static_cast<int>(partition.dim()));
  Json features = Json::array();
  bool all = true;
  for (std::size_t j = 0; j < bound.size(); ++j) {
    const bool pass = sigma[j] < bound[j];
    all = all && pass;
    features.push_back({{"feature", j},
                        {"sigma", sigma[j]},
                        {"bound", std::isinf(bound[j]) ? Json("inf") : Json(bound[j])},
                        {"pass", pass}});
  }
  return {{"holds", all}, {"features", std::move(features)}};
}

void PrintTheoremTable(std::ostream& os, const Json& theorem, const std::vector<std::string>& names,
                       const std::vector<int>& subset) {
  for (const Json& f : theorem.at("features")) {
    const auto j = f.at("feature").get<std::size_t>();
    const std::size_t global = subset.empty() ? j : static_cast<std::size_t>(subset[j]);
    const std::string name = global < names.size() ? names[global] : "x" + std::to_string(global);
    const Json& b = f.at("bound");
    char line[256];
    std::snprintf(line, sizeof line, "  %-16s sigma=%-12.6g bound=%-12s %s\n", name.c_str(),
                  f.at("sigma").get<double>(),
                  b.is_string() ? "+inf" : FormatDouble(b.get<double>()).c_str(),
                  f.at("pass").get<bool>() ? "pass" : "FAIL");
    os << line;
  }
  os << "  invertibility guaranteed: " << (theorem.at("holds").get<bool>() ? "yes" : "no")
     << "\n";
}

void Emit(const GlobalOptions& g, const Json& j, const std::string& table) {
  if (g.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << table;
  }
}

int RunFit(const GlobalOptions& g, const DataOptions& data_opts, const std::string& method,
           const SigmaOptions& sigma_opts, const TreeOptions& tree_opts,
           std::optional<int> tau, std::optional<int> mtry, bool no_bootstrap,
           bool per_split, const std::string& out_path) {
  const urtree::CsvLoad load = LoadData(data_opts);
  const urtree::Dataset& d = load.dataset;
  const urtree::TreeConfig tree_config = TreeConfigFrom(tree_opts);
  const bool needs_sigma = method == "utree" || method == "urf" || method == "hybrid";
  if (method != "tree" && method != "utree" && method != "rf" && method != "urf" &&
      method != "hybrid") {
    throw urtree::UsageError("unknown --method " + method);
  }
  std::optional<urtree::SigmaVector> sigma;
  if (needs_sigma) sigma = urtree::sigma_from_policy(PolicyFrom(sigma_opts), d.X);

  urtree::ModelFile file{urtree::Model(urtree::StandardTree(
                             urtree::Partition::Root(d.p()), urtree::Vector::Zero(1), {},
                             0, tree_config)),
                         d.feature_names};
  Json summary = {{"command", "fit"},
                  {"method", method},
                  {"data", DataJson(d, load)},
                  {"seed", g.seed},
                  {"tree_config", urtree::tree_config_to_json(tree_config)},
                  {"sigma_policy", needs_sigma ? sigma_opts.policy : "none"}};
  std::ostringstream table;
  table << "method: " << method << "\n";
  urtree::Vector fitted;
  if (method == "tree" || method == "utree" || method == "hybrid") {
    if (method == "tree") {
      urtree::StandardTree tree = urtree::fit_standard_tree(d.X, d.y, tree_config);
      fitted = tree.Predict(d.X);
      summary["leaves"] = tree.num_leaves();
      summary["theorem"] = TheoremJson(urtree::SigmaVector::Zeros(d.p()), tree.partition());
      file.model = std::move(tree);
    } else {
      urtree::UncertainTree tree =
          method == "utree"
              ? urtree::fit_uncertain_tree(d.X, d.y, *sigma, tree_config)
              : urtree::uncertainize(urtree::fit_standard_tree(d.X, d.y, tree_config), d.X,
                                     d.y, *sigma);
      fitted = tree.Predict(d.X);
      summary["leaves"] = tree.num_leaves();
      summary["sigma"] = sigma->values();
      summary["theorem"] = TheoremJson(tree.sigma(), tree.partition());
      file.model = std::move(tree);
    }
    table << "leaves (K): " << summary["leaves"].get<std::size_t>() << "\n";
  } else {
    urtree::ForestConfig fc;
    fc.tau = tau.value_or(method == "urf" ? 15 : 100);
    fc.mtry = mtry;
    fc.bootstrap = !no_bootstrap;
    if (!per_split) fc.feature_sampling = urtree::FeatureSampling::kPerTree;
    fc.seed = g.seed;
    fc.tree_config = tree_config;
    fc.variant = method == "urf" ? urtree::TreeVariant::kUncertain : urtree::TreeVariant::kStandard;
    fc.ResolvedMtry(static_cast<int>(d.p()));
    urtree::Forest forest = urtree::fit_forest(d.X, d.y, sigma, fc, g.threads);
    fitted = forest.Predict(d.X);
    Json leaves = Json::array();
    Json theorems = Json::array();
    for (const auto& m : forest.members()) {
      std::visit(
          [&](const auto& t) {
            leaves.push_back(t.num_leaves());
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, urtree::UncertainTree>) {
              theorems.push_back(TheoremJson(t.sigma(), t.partition()));
            } else {
              theorems.push_back(TheoremJson(urtree::SigmaVector::Zeros(t.num_features()),
                                             t.partition()));
            }
          },
          m.tree);
    }
    summary["tau"] = fc.tau;
    summary["mtry"] = fc.ResolvedMtry(static_cast<int>(d.p()));
    summary["bootstrap"] = fc.bootstrap;
    summary["leaves"] = leaves;
    if (sigma) summary["sigma"] = sigma->values();
    std::size_t holds = 0;
    for (const Json& t : theorems) holds += t.at("holds").get<bool>() ? 1 : 0;
    summary["theorem"] = {{"trees_holding", holds}, {"trees", std::move(theorems)}};
    table << "trees: " << fc.tau << " (mtry " << summary["mtry"].get<int>() << ")\n";
    table << "leaves per tree:";
    for (const Json& k : leaves) table << ' ' << k.get<std::size_t>();
    table << "\n";
    file.model = std::move(forest);
  }
  const double root_risk = (d.y.array() - d.y.mean()).square().sum();
  const double training_risk = (d.y - fitted).squaredNorm();
  summary["training_risk"] = training_risk;
  summary["root_risk"] = root_risk;
  table << "training risk (SSE): " << FormatDouble(training_risk) << "\n";
  table << "root risk (SSE):     " << FormatDouble(root_risk) << "\n";
  table << "invertibility bound check:\n";
  if (summary["theorem"].contains("features")) {
    PrintTheoremTable(table, summary["theorem"], d.feature_names, {});
  } else {
    table << "  trees with guaranteed invertibility: "
          << summary["theorem"]["trees_holding"].get<std::size_t>() << " / "
          << summary["theorem"]["trees"].size() << "\n";
  }
  if (!out_path.empty()) {
    urtree::save_model(file, out_path);
    summary["out"] = out_path;
    table << "model written to " << out_path << "\n";
  }
  Emit(g, summary, table.str());
  return 0;
}

int RunPredict(const GlobalOptions& g, const std::string& model_path,
               const std::string& data_path) {
  const urtree::ModelFile file = urtree::load_model(model_path);
  urtree::Dataset d;
  if (data_path.empty() || data_path == "-") {
    d = urtree::load_features_csv(std::cin, file.feature_names);
  } else {
    std::ifstream in(data_path);
    if (!in) throw urtree::Error("cannot open " + data_path);
    d = urtree::load_features_csv(in, file.feature_names);
  }
  const urtree::Vector pred =
      std::visit([&](const auto& m) { return m.Predict(d.X); }, file.model);
  if (g.format == "json") {
    Json j = {{"command", "predict"},
              {"model", model_path},
              {"n", pred.size()},
              {"predictions", std::vector<double>(pred.data(), pred.data() + pred.size())}};
    std::cout << j.dump(2) << '\n';
  } else {
    for (Eigen::Index i = 0; i < pred.size(); ++i) std::cout << FormatDouble(pred(i)) << '\n';
  }
  return 0;
}

int RunBench(const GlobalOptions& g, const DataOptions& data_opts,
             const std::string& methods, const SigmaOptions& sigma_opts,
             const TreeOptions& tree_opts, bool noise, double noise_lo, double noise_hi,
             std::optional<std::uint64_t> noise_seed, int folds, std::optional<int> mtry,
             bool no_bootstrap, bool per_split, const std::string& out_path) {
  const urtree::CsvLoad load = LoadData(data_opts);
  urtree::BenchConfig config;
  std::stringstream list(methods);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (!item.empty()) config.methods.push_back(urtree::MethodSpec::Parse(item));
  }
  config.sigma_policy = PolicyFrom(sigma_opts);
  if (noise) config.noise = urtree::NoiseSpec{noise_lo, noise_hi, noise_seed.value_or(g.seed)};
  config.folds = folds;
  config.cv_seed = g.seed;
  config.tree_config = TreeConfigFrom(tree_opts);
  config.mtry = mtry;
  config.bootstrap = !no_bootstrap;
  if (!per_split) config.feature_sampling = urtree::FeatureSampling::kPerTree;
  const urtree::CVReport report = urtree::run_benchmark(load.dataset, config, g.threads);
  Json j = urtree::report_to_json(report);
  j["data"] = DataJson(load.dataset, load);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw urtree::Error("cannot write " + out_path);
    out << j.dump(2) << '\n';
  }
  std::ostringstream table;
  table << "dataset: " << report.dataset << " (n=" << report.n << ", p=" << report.p
        << "), " << config.folds << "-fold CV, seed " << config.cv_seed << ", sigma "
        << config.sigma_policy.Name() << (config.noise ? ", noised" : "") << "\n";
  table << urtree::format_report_table(report);
  Emit(g, j, table.str());
  return 0;
}

int RunCheck(const GlobalOptions& g, const std::string& model_path,
             const DataOptions& data_opts) {
  const urtree::ModelFile file = urtree::load_model(model_path);
  std::optional<urtree::CsvLoad> load;
  if (!data_opts.path.empty()) load = LoadData(data_opts);

  struct Item {
    urtree::Partition partition;
    urtree::SigmaVector sigma;
    std::vector<int> subset;
  };
  std::vector<Item> items;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, urtree::UncertainTree>) {
          items.push_back({m.partition(), m.sigma(), {}});
        } else if constexpr (std::is_same_v<T, urtree::StandardTree>) {
          items.push_back({m.partition(), urtree::SigmaVector::Zeros(m.num_features()), {}});
        } else {
          for (const auto& member : m.members()) {
            std::visit(
                [&](const auto& t) {
                  using U = std::decay_t<decltype(t)>;
                  if constexpr (std::is_same_v<U, urtree::UncertainTree>) {
                    items.push_back({t.partition(), t.sigma(), member.features});
                  } else {
                    items.push_back({t.partition(),
                                     urtree::SigmaVector::Zeros(t.num_features()),
                                     member.features});
                  }
                },
                member.tree);
          }
        }
      },
      file.model);

  Json out = {{"command", "check-invertibility"}, {"model", model_path}};
  Json reports = Json::array();
  const bool table_mode = g.format != "json";
  for (std::size_t t = 0; t < items.size(); ++t) {
    const Item& item = items[t];
    Json r = TheoremJson(item.sigma, item.partition);
    r["leaves"] = item.partition.size();
    if (!item.subset.empty()) r["feature_subset"] = item.subset;
    if (load) {
      urtree::Matrix X = load->dataset.X;
      if (!item.subset.empty()) X = load->dataset.Columns(item.subset).X;
      if (static_cast<std::size_t>(X.cols()) != item.partition.dim()) {
        throw urtree::Error("dimension mismatch between model and data");
      }
      const auto P = urtree::build_membership(X, item.sigma, item.partition);
      const int rank = urtree::numerical_rank(P.matrix());
      r["rank"] = rank;
      r["full_rank"] = rank == static_cast<int>(item.partition.size());
    }
    if (table_mode) {
      std::cout << (items.size() > 1 ? "tree " + std::to_string(t) + ": " : std::string())
                << "K=" << item.partition.size() << "\n";
      PrintTheoremTable(std::cout, r, file.feature_names, item.subset);
      if (load) {
        std::cout << "  rank(P) = " << r["rank"].get<int>() << " (K = "
                  << item.partition.size() << "): "
                  << (r["full_rank"].get<bool>() ? "full rank" : "RANK DEFICIENT") << "\n";
      }
    }
    reports.push_back(std::move(r));
  }
  out["trees"] = std::move(reports);
  if (!table_mode) std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertain regression trees and forests"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  g.threads = urtree::DefaultThreads();
  app.add_option("--seed", g.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (default: $URTREE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  auto add_data = [](CLI::App* cmd, DataOptions& d, bool required) {
    auto* opt = cmd->add_option("data", d.path, "CSV/TSV file with a header row");
    if (required) opt->required();
    cmd->add_option("--target", d.target, "Target column name");
    cmd->add_option("--target-index", d.target_index, "Target column index (0-based)");
  };
  auto add_sigma = [](CLI::App* cmd, SigmaOptions& s) {
    cmd->add_option("--sigma", s.policy, "empirical | half | file")
        ->check(CLI::IsMember({"empirical", "half", "file"}))
        ->capture_default_str();
    cmd->add_option("--sigma-file", s.file, "File with one sigma per feature");
  };
  auto add_tree = [](CLI::App* cmd, TreeOptions& t) {
    cmd->add_option("--min-leaf-frac", t.min_leaf_frac, "Minimum leaf share of training rows")
        ->capture_default_str();
    cmd->add_option("--max-leaves", t.max_leaves, "Optional leaf cap");
    cmd->add_option("--max-depth", t.max_depth, "Optional depth cap");
  };

  DataOptions fit_data;
  SigmaOptions fit_sigma;
  TreeOptions fit_tree;
  std::string fit_method = "utree";
  std::optional<int> fit_tau;
  std::optional<int> fit_mtry;
  bool fit_no_bootstrap = false;
  std::string fit_sampling = "split";
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "Fit a model and write it as JSON");
  add_data(fit, fit_data, true);
  fit->add_option("--method", fit_method, "tree | utree | rf | urf | hybrid")
      ->check(CLI::IsMember({"tree", "utree", "rf", "urf", "hybrid"}))
      ->capture_default_str();
  add_sigma(fit, fit_sigma);
  add_tree(fit, fit_tree);
  fit->add_option("--tau", fit_tau, "Trees in a forest")->check(CLI::PositiveNumber);
  fit->add_option("--mtry", fit_mtry, "Features drawn per split (or per tree)")->check(CLI::PositiveNumber);
  fit->add_flag("--no-bootstrap", fit_no_bootstrap, "Train forest trees on all rows");
  fit->add_option("--feature-sampling", fit_sampling,
                  "Draw mtry features once per tree or at every split")
      ->check(CLI::IsMember({"tree", "split"}))
      ->capture_default_str();
  fit->add_option("--out", fit_out, "Model output path");

  std::string predict_model;
  std::string predict_data;
  auto* predict = app.add_subcommand("predict", "Predict one value per input row");
  predict->add_option("model", predict_model, "Model JSON")->required();
  predict->add_option("data", predict_data, "CSV/TSV with feature columns ('-' or empty: stdin)");

  DataOptions bench_data;
  SigmaOptions bench_sigma;
  TreeOptions bench_tree;
  std::string bench_methods = "standard_tree,hybrid_tree,uncertain_tree";
  bool bench_noise = false;
  double noise_lo = 0.1;
  double noise_hi = 0.25;
  std::optional<std::uint64_t> noise_seed;
  int bench_folds = 5;
  std::optional<int> bench_mtry;
  bool bench_no_bootstrap = false;
  std::string bench_sampling = "split";
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Cross-validated RMSE comparison");
  add_data(bench, bench_data, true);
  bench->add_option("--methods", bench_methods,
                    "Comma list of standard_tree, standard_rf(tau), hybrid_tree, "
                    "uncertain_tree, uncertain_rf(tau)")
      ->capture_default_str();
  add_sigma(bench, bench_sigma);
  add_tree(bench, bench_tree);
  bench->add_flag("--noise", bench_noise, "Add Rademacher x Uniform noise before CV");
  bench->add_option("--noise-lo", noise_lo, "Lower noise bound (fraction of std)")
      ->capture_default_str();
  bench->add_option("--noise-hi", noise_hi, "Upper noise bound (fraction of std)")
      ->capture_default_str();
  bench->add_option("--noise-seed", noise_seed, "Noise seed (default: --seed)");
  bench->add_option("--folds", bench_folds, "Number of folds")->capture_default_str();
  bench->add_option("--mtry", bench_mtry, "Features drawn per split (or per tree)")->check(CLI::PositiveNumber);
  bench->add_flag("--no-bootstrap", bench_no_bootstrap, "Train forest trees on all rows");
  bench->add_option("--feature-sampling", bench_sampling,
                    "Draw mtry features once per tree or at every split")
      ->check(CLI::IsMember({"tree", "split"}))
      ->capture_default_str();
  bench->add_option("--out", bench_out, "Also write the JSON report here");

  std::string check_model;
  DataOptions check_data;
  auto* check = app.add_subcommand("check-invertibility",
                                   "Per-feature sigma bound and rank of P on data");
  check->add_option("model", check_model, "Model JSON")->required();
  add_data(check, check_data, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit) {
      return RunFit(g, fit_data, fit_method, fit_sigma, fit_tree, fit_tau, fit_mtry,
                    fit_no_bootstrap, fit_sampling == "split", fit_out);
    }
    if (*predict) return RunPredict(g, predict_model, predict_data);
    if (*bench) {
      return RunBench(g, bench_data, bench_methods, bench_sigma, bench_tree, bench_noise,
                      noise_lo, noise_hi, noise_seed, bench_folds, bench_mtry,
                      bench_no_bootstrap, bench_sampling == "split", bench_out);
    }
    if (*check) return RunCheck(g, check_model, check_data);
  } catch (const urtree::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
