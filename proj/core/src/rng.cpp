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

#include <infoae/errors.hpp>
#include <infoae/rng.hpp>

#include <sstream>

namespace infoae {

Rng make_rng(std::uint64_t seed, std::uint64_t stream)
{
   std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
   return Rng(seq);
}

std::string serialize_rng(const Rng& rng)
{
   std::ostringstream out;
   out << rng;
   return out.str();
}

Rng deserialize_rng(const std::string& text)
{
   std::istringstream in(text);
   Rng rng;
   in >> rng;
   if (in.fail())
   {
      throw FormatError("malformed random engine state");
   }
   return rng;
}

} // namespace infoae
