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

#include <infoae/config.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace infoae {

std::string format_real(double value)
{
   char buffer[32];
   const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general);
   return std::string(buffer, result.ptr);
}

namespace {

std::string trim(const std::string& s)
{
   const auto begin = s.find_first_not_of(" \t\r\n");
   if (begin == std::string::npos)
   {
      return {};
   }
   const auto end = s.find_last_not_of(" \t\r\n");
   return s.substr(begin, end - begin + 1);
}

template <typename Integer>
Integer parse_integer(const std::string& key, const std::string& text)
{
   Integer value{};
   const char* first = text.data();
   const char* last = text.data() + text.size();
   const auto [ptr, ec] = std::from_chars(first, last, value);
   if (ec != std::errc() || ptr != last || text.empty())
   {
      throw ArgumentError(key + ": expected an integer, got '" + text + "'");
   }
   return value;
}

double parse_real(const std::string& key, const std::string& text)
{
   std::size_t used = 0;
   double value = 0.0;
   try
   {
      value = std::stod(text, &used);
   }
   catch (const std::exception&)
   {
      used = 0;
   }
   if (used == 0 || used != text.size())
   {
      throw ArgumentError(key + ": expected a number, got '" + text + "'");
   }
   return value;
}

bool parse_bool(const std::string& key, const std::string& text)
{
   if (text == "true" || text == "1" || text == "on")
   {
      return true;
   }
   if (text == "false" || text == "0" || text == "off")
   {
      return false;
   }
   throw ArgumentError(key + ": expected true or false, got '" + text + "'");
}

template <typename Field>
ConfigKey integer_key(std::string name, std::string description, KeyScope scope, Field field)
{
   return {name, std::move(description), scope,
           [field](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); },
           [field, name](RunConfig& c, const std::string& v) {
              auto& slot = field(c);
              slot = parse_integer<std::remove_reference_t<decltype(slot)>>(name, v);
           }};
}

template <typename Field>
ConfigKey real_key(std::string name, std::string description, KeyScope scope, Field field)
{
   return {name, std::move(description), scope,
           [field](const RunConfig& c) { return format_real(field(const_cast<RunConfig&>(c))); },
           [field, name](RunConfig& c, const std::string& v) { field(c) = parse_real(name, v); }};
}

template <typename Field>
ConfigKey path_key(std::string name, std::string description, KeyScope scope, Field field)
{
   return {name, std::move(description), scope,
           [field](const RunConfig& c) { return field(const_cast<RunConfig&>(c)).string(); },
           [field, name](RunConfig& c, const std::string& v) {
              if (v.empty())
              {
                 throw ArgumentError(name + ": path must not be empty");
              }
              field(c) = v;
           }};
}

std::vector<ConfigKey> build_registry()
{
   constexpr KeyScope T = KeyScope::kTrain;
   constexpr KeyScope E = KeyScope::kEval;
   std::vector<ConfigKey> keys;
   keys.push_back(path_key("data.train_images", "IDX3 training images (optionally gzip)", T,
                           [](RunConfig& c) -> auto& { return c.train.train_images; }));
   keys.push_back(integer_key("data.train_limit", "use only the first N training images (0 = all)", T,
                              [](RunConfig& c) -> auto& { return c.train.train_limit; }));
   keys.push_back(path_key("data.test_images", "IDX3 evaluation images", E,
                           [](RunConfig& c) -> auto& { return c.eval.test_images; }));
   keys.push_back(path_key("data.test_labels", "IDX1 evaluation labels", E,
                           [](RunConfig& c) -> auto& { return c.eval.test_labels; }));

   keys.push_back(integer_key("train.seed", "seed for initialization, sampling and shuffling", T,
                              [](RunConfig& c) -> auto& { return c.train.seed; }));
   keys.push_back(integer_key("train.batch_size", "images per step (>= 2)", T,
                              [](RunConfig& c) -> auto& { return c.train.batch_size; }));
   keys.push_back(integer_key("train.epochs", "passes over the training set", T,
                              [](RunConfig& c) -> auto& { return c.train.epochs; }));
   keys.push_back(integer_key("train.steps", "stop after this many steps in total (-1 = from epochs)", T,
                              [](RunConfig& c) -> auto& { return c.train.steps; }));
   keys.push_back(real_key("train.lr", "Adam learning rate", T,
                           [](RunConfig& c) -> auto& { return c.train.adam.learning_rate; }));
   keys.push_back(real_key("train.adam_beta1", "Adam first-moment decay", T,
                           [](RunConfig& c) -> auto& { return c.train.adam.beta1; }));
   keys.push_back(real_key("train.adam_beta2", "Adam second-moment decay", T,
                           [](RunConfig& c) -> auto& { return c.train.adam.beta2; }));
   keys.push_back(real_key("train.adam_epsilon", "Adam denominator offset", T,
                           [](RunConfig& c) -> auto& { return c.train.adam.epsilon; }));
   keys.push_back(integer_key("train.checkpoint_every", "periodic checkpoint interval in steps (0 = off)", T,
                              [](RunConfig& c) -> auto& { return c.train.checkpoint_every; }));
   keys.push_back(path_key("train.out_dir", "directory for metrics.tsv and checkpoints", T,
                           [](RunConfig& c) -> auto& { return c.train.out_dir; }));

   keys.push_back(real_key("loss.alpha", "weight of C_lg + C_le", T,
                           [](RunConfig& c) -> auto& { return c.train.loss.weights.alpha; }));
   keys.push_back(real_key("loss.beta", "weight of E_l + D_le + D_lg", T,
                           [](RunConfig& c) -> auto& { return c.train.loss.weights.beta; }));
   keys.push_back(real_key("loss.gamma", "weight of R_l", T,
                           [](RunConfig& c) -> auto& { return c.train.loss.weights.gamma; }));
   keys.push_back(real_key("loss.epsilon", "probability clamp before logarithms", T,
                           [](RunConfig& c) -> auto& { return c.train.loss.epsilon; }));
   keys.push_back({"loss.non_saturating", "use -log p instead of log(1 - p) for generator-side terms", T,
                   [](const RunConfig& c) { return std::string(c.train.loss.non_saturating ? "true" : "false"); },
                   [](RunConfig& c, const std::string& v) {
                      c.train.loss.non_saturating = parse_bool("loss.non_saturating", v);
                   }});

   keys.push_back({"eval.mapping", "cluster-to-label mapping: optimal or majority", E,
                   [](const RunConfig& c) { return to_string(c.eval.mapping); },
                   [](RunConfig& c, const std::string& v) { c.eval.mapping = parse_mapping_mode(v); }});
   keys.push_back(integer_key("eval.limit", "evaluate only the first N test images (0 = all)", E,
                              [](RunConfig& c) -> auto& { return c.eval.limit; }));
   keys.push_back(integer_key("eval.n_styles", "rows of the generated sample grid", E,
                              [](RunConfig& c) -> auto& { return c.eval.n_styles; }));
   keys.push_back(integer_key("eval.n_steps", "interpolation steps between the two endpoints", E,
                              [](RunConfig& c) -> auto& { return c.eval.n_steps; }));
   keys.push_back(integer_key("eval.idx_a", "test-set index of the first interpolation endpoint", E,
                              [](RunConfig& c) -> auto& { return c.eval.idx_a; }));
   keys.push_back(integer_key("eval.idx_b", "test-set index of the second interpolation endpoint", E,
                              [](RunConfig& c) -> auto& { return c.eval.idx_b; }));

   struct ArchField {
      const char* name;
      const char* description;
      Index ArchConfig::*field;
   };
   const ArchField widths[] = {
      {"arch.conv1_channels", "first conv stage width (E, D_i, S)", &ArchConfig::conv1_channels},
      {"arch.conv2_channels", "second conv stage width (E, D_i, S)", &ArchConfig::conv2_channels},
      {"arch.conv3_channels", "third conv stage width (E, D_i)", &ArchConfig::conv3_channels},
      {"arch.conv1_kernel", "first conv stage kernel", &ArchConfig::conv1_kernel},
      {"arch.conv2_kernel", "second conv stage kernel", &ArchConfig::conv2_kernel},
      {"arch.conv3_kernel", "third conv stage kernel", &ArchConfig::conv3_kernel},
      {"arch.decoder_channels", "decoder channels at 7x7", &ArchConfig::decoder_channels},
      {"arch.decoder_hidden_channels", "decoder channels at 14x14", &ArchConfig::decoder_hidden_channels},
      {"arch.decoder_kernel", "decoder transposed-conv kernel (even)", &ArchConfig::decoder_kernel},
      {"arch.mlp_hidden", "hidden width of G and C", &ArchConfig::mlp_hidden},
      {"arch.critic_features", "per-branch feature width of S", &ArchConfig::critic_features},
   };
   for (const ArchField& f : widths)
   {
      keys.push_back(integer_key(f.name, f.description, T,
                                 [field = f.field](RunConfig& c) -> auto& { return c.train.arch.*field; }));
   }
   struct ArchReal {
      const char* name;
      const char* description;
      double ArchConfig::*field;
   };
   const ArchReal reals[] = {
      {"arch.leaky_slope", "LeakyReLU negative slope", &ArchConfig::leaky_slope},
      {"arch.init_stddev", "weight initialization standard deviation", &ArchConfig::init_stddev},
      {"arch.mlp_init_stddev", "initialization standard deviation for G and C", &ArchConfig::mlp_init_stddev},
      {"arch.bn_momentum", "batch-norm running-average retention", &ArchConfig::bn_momentum},
      {"arch.bn_epsilon", "batch-norm variance offset", &ArchConfig::bn_epsilon},
   };
   for (const ArchReal& f : reals)
   {
      keys.push_back(real_key(f.name, f.description, T,
                              [field = f.field](RunConfig& c) -> auto& { return c.train.arch.*field; }));
   }
   return keys;
}

const ConfigKey& find_key(const std::string& key)
{
   for (const ConfigKey& k : config_keys())
   {
      if (k.name == key)
      {
         return k;
      }
   }
   throw ArgumentError("unknown config key '" + key + "'");
}

} // namespace

const std::vector<ConfigKey>& config_keys()
{
   static const std::vector<ConfigKey> keys = build_registry();
   return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value)
{
   find_key(key).set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key)
{
   return find_key(key).get(cfg);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text, const std::string& origin)
{
   std::vector<std::pair<std::string, std::string>> entries;
   std::istringstream in(text);
   std::string line;
   int number = 0;
   while (std::getline(in, line))
   {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos)
      {
         line.erase(hash);
      }
      line = trim(line);
      if (line.empty())
      {
         continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
      {
         throw ArgumentError(origin + ":" + std::to_string(number) + ": expected key=value");
      }
      entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
   }
   return entries;
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path)
{
   std::ifstream in(path);
   if (!in)
   {
      throw IoError("cannot open config file " + path.string());
   }
   std::stringstream buffer;
   buffer << in.rdbuf();
   for (const auto& [key, value] : parse_config_text(buffer.str(), path.string()))
   {
      try
      {
         set_config_value(cfg, key, value);
      }
      catch (const ArgumentError& e)
      {
         throw ArgumentError(path.string() + ": " + e.what());
      }
   }
}

std::vector<std::pair<std::string, std::string>> train_config_entries(const TrainConfig& cfg)
{
   RunConfig run;
   run.train = cfg;
   std::vector<std::pair<std::string, std::string>> out;
   for (const ConfigKey& key : config_keys())
   {
      if (key.scope == KeyScope::kTrain)
      {
         out.emplace_back(key.name, key.get(run));
      }
   }
   return out;
}

TrainConfig train_config_from_entries(const std::vector<std::pair<std::string, std::string>>& entries)
{
   RunConfig run;
   for (const auto& [key, value] : entries)
   {
      if (find_key(key).scope != KeyScope::kTrain)
      {
         throw ArgumentError("'" + key + "' is not a training key");
      }
      set_config_value(run, key, value);
   }
   return run.train;
}

} // namespace infoae
