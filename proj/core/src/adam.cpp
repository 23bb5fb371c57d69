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

#include <infoae/adam.hpp>

#include <cmath>
#include <string>

namespace infoae {

void AdamConfig::validate() const
{
   if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
   {
      throw ArgumentError("learning rate must be finite and non-negative");
   }
   if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
   {
      throw ArgumentError("Adam betas must lie in [0, 1)");
   }
   if (!(epsilon > 0.0))
   {
      throw ArgumentError("Adam epsilon must be positive");
   }
}

template <typename Scalar>
void adam_update(const std::vector<nn::Parameter<Scalar>*>& params, MomentSlots<Scalar>& slots, const AdamConfig& cfg,
                 std::int64_t t)
{
   if (t < 1)
   {
      throw ArgumentError("Adam time step must be >= 1, got " + std::to_string(t));
   }
   if (slots.first.size() != params.size() || slots.second.size() != params.size())
   {
      throw ArgumentError("Adam slots do not match the parameter group");
   }
   const double b1 = cfg.beta1;
   const double b2 = cfg.beta2;
   const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t));
   const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t));
   for (std::size_t ii = 0; ii < params.size(); ++ii)
   {
      nn::Parameter<Scalar>& p = *params[ii];
      Tensor<Scalar>& m = slots.first[ii];
      Tensor<Scalar>& v = slots.second[ii];
      if (m.shape() != p.value.shape() || v.shape() != p.value.shape() || p.grad.shape() != p.value.shape())
      {
         throw ArgumentError("Adam slot shape mismatch for " + p.name);
      }
      const Index n = p.value.size();
      Scalar* value = p.value.data();
      const Scalar* grad = p.grad.data();
      Scalar* first = m.data();
      Scalar* second = v.data();
      for (Index jj = 0; jj < n; ++jj)
      {
         const double g = grad[jj];
         const double m_new = b1 * first[jj] + (1.0 - b1) * g;
         const double v_new = b2 * second[jj] + (1.0 - b2) * g * g;
         first[jj] = static_cast<Scalar>(m_new);
         second[jj] = static_cast<Scalar>(v_new);
         const double step = cfg.learning_rate * (m_new / correction1) / (std::sqrt(v_new / correction2) + cfg.epsilon);
         value[jj] = static_cast<Scalar>(value[jj] - step);
      }
   }
}

template void adam_update(const std::vector<nn::Parameter<float>*>&, MomentSlots<float>&, const AdamConfig&,
                          std::int64_t);
template void adam_update(const std::vector<nn::Parameter<double>*>&, MomentSlots<double>&, const AdamConfig&,
                          std::int64_t);

} // namespace infoae
