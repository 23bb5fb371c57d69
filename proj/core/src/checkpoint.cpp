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

#include <infoae/checkpoint.hpp>
#include <infoae/config.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace infoae {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace {

struct BlobRef {
   std::string name;
   Tensor<float>* tensor;
};

// Every tensor a checkpoint stores, in file order.
std::vector<BlobRef> blob_refs(ModelState<float>& state)
{
   std::vector<BlobRef> refs;
   const auto min_params = state.min_parameters();
   const auto max_params = state.max_parameters();
   for (auto* p : min_params)
   {
      refs.push_back({p->name, &p->value});
   }
   for (auto* p : max_params)
   {
      refs.push_back({p->name, &p->value});
   }
   for (auto* b : state.buffers())
   {
      refs.push_back({b->name, &b->value});
   }
   auto add_slots = [&refs](const std::string& group, const std::vector<nn::Parameter<float>*>& params,
                            MomentSlots<float>& slots) {
      for (std::size_t ii = 0; ii < params.size(); ++ii)
      {
         refs.push_back({group + ".m/" + params[ii]->name, &slots.first.at(ii)});
      }
      for (std::size_t ii = 0; ii < params.size(); ++ii)
      {
         refs.push_back({group + ".v/" + params[ii]->name, &slots.second.at(ii)});
      }
   };
   add_slots("opt_min", min_params, state.opt_min);
   add_slots("opt_max", max_params, state.opt_max);

   std::set<std::string> seen;
   for (const BlobRef& ref : refs)
   {
      if (!seen.insert(ref.name).second)
      {
         throw ArgumentError("duplicate tensor name in model state: " + ref.name);
      }
   }
   return refs;
}

std::string shape_text(const Shape& shape)
{
   std::string out;
   for (std::size_t ii = 0; ii < shape.size(); ++ii)
   {
      out += (ii ? "x" : "") + std::to_string(shape[ii]);
   }
   return out.empty() ? "scalar" : out;
}

template <typename T>
void write_pod(std::ostream& out, T value)
{
   out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& what)
{
   T value{};
   in.read(reinterpret_cast<char*>(&value), sizeof(T));
   if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
   {
      throw CorruptionError("checkpoint truncated while reading " + what);
   }
   return value;
}

} // namespace

std::vector<std::string> checkpoint_blob_names(const ModelState<float>& state)
{
   std::vector<std::string> names;
   for (const BlobRef& ref : blob_refs(const_cast<ModelState<float>&>(state)))
   {
      names.push_back(ref.name);
   }
   return names;
}

void save_checkpoint(const ModelState<float>& state_in, const TrainConfig& cfg,
                     const std::vector<std::string>& metrics_tail, const std::filesystem::path& path)
{
   auto& state = const_cast<ModelState<float>&>(state_in);
   const std::vector<BlobRef> refs = blob_refs(state);

   std::ostringstream manifest;
   manifest << kCheckpointMagic << '\n';
   manifest << "format_version=" << kCheckpointFormatVersion << '\n';
   manifest << "step=" << state.step << '\n';
   manifest << "rng=" << serialize_rng(state.rng) << '\n';
   for (const auto& [key, value] : train_config_entries(cfg))
   {
      manifest << "config." << key << '=' << value << '\n';
   }
   for (const std::string& line : metrics_tail)
   {
      manifest << "metric=" << line << '\n';
   }
   for (const BlobRef& ref : refs)
   {
      manifest << "blob=" << ref.name << ' ' << shape_text(ref.tensor->shape()) << '\n';
   }
   manifest << kCheckpointDelimiter << '\n';

   const std::filesystem::path temp = path.string() + ".tmp";
   {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      if (!out)
      {
         throw IoError("cannot write checkpoint " + temp.string());
      }
      const std::string text = manifest.str();
      out.write(text.data(), static_cast<std::streamsize>(text.size()));
      for (const BlobRef& ref : refs)
      {
         write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ref.name.size()));
         out.write(ref.name.data(), static_cast<std::streamsize>(ref.name.size()));
         write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ref.tensor->size()));
         out.write(reinterpret_cast<const char*>(ref.tensor->data()),
                   static_cast<std::streamsize>(ref.tensor->size() * sizeof(float)));
      }
      if (!out)
      {
         throw IoError("failed writing checkpoint " + temp.string());
      }
   }
   std::error_code ec;
   std::filesystem::rename(temp, path, ec);
   if (ec)
   {
      throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
   }
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
   std::ifstream in(path, std::ios::binary);
   if (!in)
   {
      throw IoError("cannot open checkpoint " + path.string());
   }
   std::string line;
   if (!std::getline(in, line) || line != kCheckpointMagic)
   {
      throw FormatError(path.string() + ": not an InfoAE checkpoint");
   }

   bool have_version = false;
   bool have_step = false;
   bool have_rng = false;
   std::int64_t step = 0;
   std::string rng_text;
   std::vector<std::pair<std::string, std::string>> config_entries;
   std::vector<std::string> metrics;
   std::vector<std::pair<std::string, std::string>> blobs; // (name, shape)
   bool delimited = false;
   while (std::getline(in, line))
   {
      if (line == kCheckpointDelimiter)
      {
         delimited = true;
         break;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
      {
         throw FormatError(path.string() + ": malformed manifest line '" + line + "'");
      }
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "format_version")
      {
         if (value != std::to_string(kCheckpointFormatVersion))
         {
            throw VersionError(path.string() + ": checkpoint format version " + value + ", this build reads " +
                               std::to_string(kCheckpointFormatVersion));
         }
         have_version = true;
      }
      else if (key == "step")
      {
         try
         {
            step = std::stoll(value);
         }
         catch (const std::exception&)
         {
            throw FormatError(path.string() + ": bad step '" + value + "'");
         }
         have_step = true;
      }
      else if (key == "rng")
      {
         rng_text = value;
         have_rng = true;
      }
      else if (key.rfind("config.", 0) == 0)
      {
         config_entries.emplace_back(key.substr(7), value);
      }
      else if (key == "metric")
      {
         metrics.push_back(value);
      }
      else if (key == "blob")
      {
         const auto space = value.rfind(' ');
         if (space == std::string::npos)
         {
            throw FormatError(path.string() + ": malformed blob entry '" + value + "'");
         }
         blobs.emplace_back(value.substr(0, space), value.substr(space + 1));
      }
      else
      {
         throw FormatError(path.string() + ": unknown manifest key '" + key + "'");
      }
   }
   if (!have_version)
   {
      throw VersionError(path.string() + ": manifest lacks format_version");
   }
   if (!delimited || !have_step || !have_rng)
   {
      throw FormatError(path.string() + ": incomplete manifest");
   }

   Checkpoint ckpt;
   try
   {
      ckpt.config = train_config_from_entries(config_entries);
   }
   catch (const ArgumentError& e)
   {
      throw FormatError(path.string() + ": " + e.what());
   }
   ckpt.state = init_networks<float>(ckpt.config.arch, ckpt.config.seed);
   ckpt.state.step = step;
   ckpt.state.rng = deserialize_rng(rng_text);
   ckpt.metrics_tail = std::move(metrics);

   const std::vector<BlobRef> refs = blob_refs(ckpt.state);
   std::map<std::string, Tensor<float>*> by_name;
   for (const BlobRef& ref : refs)
   {
      by_name[ref.name] = ref.tensor;
   }
   if (blobs.size() != refs.size())
   {
      throw FormatError(path.string() + ": manifest lists " + std::to_string(blobs.size()) + " blobs, model has " +
                        std::to_string(refs.size()));
   }
   std::set<std::string> loaded;
   for (const auto& [name, shape] : blobs)
   {
      const auto it = by_name.find(name);
      if (it == by_name.end())
      {
         throw FormatError(path.string() + ": unexpected blob '" + name + "'");
      }
      if (shape != shape_text(it->second->shape()))
      {
         throw FormatError(path.string() + ": blob '" + name + "' has shape " + shape + ", expected " +
                           shape_text(it->second->shape()));
      }
      const auto length = read_pod<std::uint32_t>(in, "blob name length");
      if (length > 4096)
      {
         throw CorruptionError(path.string() + ": implausible blob name length");
      }
      std::string stored(length, '\0');
      in.read(stored.data(), length);
      if (in.gcount() != static_cast<std::streamsize>(length) || stored != name)
      {
         throw CorruptionError(path.string() + ": blob '" + name + "' missing or out of order");
      }
      const auto count = read_pod<std::uint64_t>(in, name);
      Tensor<float>& target = *it->second;
      if (count != static_cast<std::uint64_t>(target.size()))
      {
         throw CorruptionError(path.string() + ": blob '" + name + "' holds " + std::to_string(count) +
                               " values, expected " + std::to_string(target.size()));
      }
      in.read(reinterpret_cast<char*>(target.data()), static_cast<std::streamsize>(count * sizeof(float)));
      if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float)))
      {
         throw CorruptionError(path.string() + ": blob '" + name + "' truncated");
      }
      loaded.insert(name);
   }
   if (loaded.size() != refs.size())
   {
      throw FormatError(path.string() + ": manifest repeats blob names");
   }
   if (in.peek() != std::char_traits<char>::eof())
   {
      throw CorruptionError(path.string() + ": trailing bytes after the last blob");
   }
   return ckpt;
}

} // namespace infoae
