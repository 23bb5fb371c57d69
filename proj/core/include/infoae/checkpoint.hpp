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

#ifndef INFOAE_CHECKPOINT_HPP_
#define INFOAE_CHECKPOINT_HPP_

#include <infoae/networks.hpp>
#include <infoae/trainer.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace infoae {

inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr const char* kCheckpointMagic = "INFOAE-CHECKPOINT";
inline constexpr const char* kCheckpointDelimiter = "--- blobs ---";

struct Checkpoint {
   ModelState<float> state;
   TrainConfig config;
   std::vector<std::string> metrics_tail;
};

/// File layout:
///   INFOAE-CHECKPOINT
///   key=value manifest lines (format_version, step, rng, config.*, metric, blob)
///   --- blobs ---
///   per blob: u32 name length, name bytes, u64 element count, f32 values
/// All integers and reals are little-endian; tensors are row-major.
void save_checkpoint(const ModelState<float>& state, const TrainConfig& cfg,
                     const std::vector<std::string>& metrics_tail, const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Names of every blob a checkpoint of this state holds, in file order.
std::vector<std::string> checkpoint_blob_names(const ModelState<float>& state);

} // namespace infoae

#endif // INFOAE_CHECKPOINT_HPP_
