/*
   Copyright 2026 The InfoAE Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef INFOAE_CONFIG_HPP_
#define INFOAE_CONFIG_HPP_

#include <infoae/eval.hpp>
#include <infoae/trainer.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace infoae {

struct RunConfig {
   TrainConfig train;
   EvalConfig eval;

   friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class KeyScope {
   kTrain, ///< stored in checkpoints
   kEval,
};

struct ConfigKey {
   std::string name;
   std::string description;
   KeyScope scope;
   std::function<std::string(const RunConfig&)> get;
   std::function<void(RunConfig&, const std::string&)> set;
};

/// All recognised keys in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Throws ArgumentError for unknown keys or unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// "key=value" lines; blank lines and '#' comments are ignored.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text,
                                                                   const std::string& origin = "<config>");

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Every train-scope key with its value, in registry order.
std::vector<std::pair<std::string, std::string>> train_config_entries(const TrainConfig& cfg);

/// Rebuilds a TrainConfig from defaults plus stored entries.
TrainConfig train_config_from_entries(const std::vector<std::pair<std::string, std::string>>& entries);

/// Round-trippable text form of a real.
std::string format_real(double value);

} // namespace infoae

#endif // INFOAE_CONFIG_HPP_
