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

#ifndef INFOAE_RNG_HPP_
#define INFOAE_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace infoae {

/// All randomness in the toolkit flows through a 64-bit Mersenne twister.
/// Draws are reproducible for a given standard library; the engine state
/// is serialized into checkpoints so resumed runs continue the same stream.
using Rng = std::mt19937_64;

/// Engine keyed on a (seed, stream) pair, e.g. (run seed, epoch).
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform draw on [0, 1) with 24-bit resolution, exactly representable in float.
inline double uniform_unit(Rng& rng)
{
   return static_cast<double>(rng() >> 40) * 0x1.0p-24;
}

/// Uniform draw on [-1, 1).
inline double uniform_signed(Rng& rng)
{
   return 2.0 * uniform_unit(rng) - 1.0;
}

std::string serialize_rng(const Rng& rng);
Rng deserialize_rng(const std::string& text);

} // namespace infoae

#endif // INFOAE_RNG_HPP_
