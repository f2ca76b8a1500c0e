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

#ifndef URTREE_SERIALIZE_HPP_
#define URTREE_SERIALIZE_HPP_

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "urtree/bench.hpp"
#include "urtree/forest.hpp"
#include "urtree/tree.hpp"

namespace urtree {

// Major.minor; loaders accept any minor of the current major.
inline constexpr const char* kSchemaVersion = "1.0";

using Json = nlohmann::json;
using Model = std::variant<StandardTree, UncertainTree, Forest>;

// A fitted model plus the column names it expects at prediction time.
struct ModelFile {
  Model model;
  std::vector<std::string> feature_names;
};

Json tree_config_to_json(const TreeConfig& config);
TreeConfig tree_config_from_json(const Json& j);

// Regions encode -inf / +inf bounds as null.
Json tree_to_json(const UncertainTree& tree);
Json tree_to_json(const StandardTree& tree);
UncertainTree uncertain_tree_from_json(const Json& j);
StandardTree standard_tree_from_json(const Json& j);

Json forest_to_json(const Forest& forest);
Forest forest_from_json(const Json& j);

Json model_to_json(const ModelFile& file);
ModelFile model_from_json(const Json& j);

ModelFile load_model(const std::string& path);
void save_model(const ModelFile& file, const std::string& path);

Json bench_config_to_json(const BenchConfig& config);
BenchConfig bench_config_from_json(const Json& j);
Json report_to_json(const CVReport& report);

// Throws unless `version` has the supported major number.
void check_schema_version(const Json& j);

}  // namespace urtree

#endif  // URTREE_SERIALIZE_HPP_
