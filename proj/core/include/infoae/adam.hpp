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

#ifndef INFOAE_ADAM_HPP_
#define INFOAE_ADAM_HPP_

#include <infoae/networks.hpp>

#include <cstdint>
#include <vector>

namespace infoae {

struct AdamConfig {
   double learning_rate = 2e-4;
   double beta1 = 0.5;
   double beta2 = 0.999;
   double epsilon = 1e-8;

   void validate() const;

   friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

/// One bias-corrected Adam step at time t >= 1 over a parameter group:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2,
///   p -= lr (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
/// Gradients are read from each parameter's grad field.
template <typename Scalar>
void adam_update(const std::vector<nn::Parameter<Scalar>*>& params, MomentSlots<Scalar>& slots, const AdamConfig& cfg,
                 std::int64_t t);

} // namespace infoae

#endif // INFOAE_ADAM_HPP_
