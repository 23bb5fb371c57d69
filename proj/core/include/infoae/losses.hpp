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

#ifndef INFOAE_LOSSES_HPP_
#define INFOAE_LOSSES_HPP_

#include <infoae/data.hpp>
#include <infoae/networks.hpp>

#include <array>
#include <string_view>

namespace infoae {

inline constexpr double kDefaultLossEpsilon = 1e-7;

struct LossWeights {
   double alpha = 1.0; ///< classification terms C_lg + C_le
   double beta = 1.0;  ///< adversarial terms E_l + D_le + D_lg
   double gamma = 0.4; ///< reconstruction R_l

   friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct LossConfig {
   LossWeights weights;
   /// Probabilities are clamped to [epsilon, 1 - epsilon] before every log.
   double epsilon = kDefaultLossEpsilon;
   /// Replace "minimize log(1 - p)" by "minimize -log p" in E_l, D_lg and D_le.
   bool non_saturating = false;

   friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

/// Per-step scalar values of every loss term and their weighted total.
struct StepMetrics {
   double r_l = 0.0;
   double d_il = 0.0;
   double d_lg = 0.0;
   double d_le = 0.0;
   double e_l = 0.0;
   double s_l = 0.0;
   double c_lg = 0.0;
   double c_le = 0.0;
   double t_l = 0.0;

   static constexpr std::array<std::string_view, 9> kNames = {"R_l",  "D_il", "D_lg", "D_le", "E_l",
                                                               "S_l",  "C_lg", "C_le", "T_l"};

   std::array<double, 9> values() const { return {r_l, d_il, d_lg, d_le, e_l, s_l, c_lg, c_le, t_l}; }

   friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

/// A batch-mean loss and its gradient with respect to the loss input.
template <typename Scalar>
struct LossValue {
   double value = 0.0;
   Tensor<Scalar> grad;
};

/// A loss over a (real, fake) score pair with one gradient per input.
template <typename Scalar>
struct PairLossValue {
   double value = 0.0;
   Tensor<Scalar> grad_real;
   Tensor<Scalar> grad_fake;
};

/// mean(log p), p = clamp(sigmoid(logit)); gradient with respect to logits.
template <typename Scalar>
LossValue<Scalar> mean_log_prob(const ScoreBatch<Scalar>& scores, double epsilon = kDefaultLossEpsilon);

/// mean(log(1 - p)), p = clamp(sigmoid(logit)); gradient with respect to logits.
template <typename Scalar>
LossValue<Scalar> mean_log_one_minus_prob(const ScoreBatch<Scalar>& scores, double epsilon = kDefaultLossEpsilon);

/// R_l: batch mean of the per-sample Euclidean norm of x_hat - x.
template <typename Scalar>
LossValue<Scalar> recon_loss(const ImageBatch<Scalar>& x_hat, const ImageBatch<Scalar>& x);

/// R_l over raw (batch, ...) tensors; non-finite inputs propagate into the value.
template <typename Scalar>
LossValue<Scalar> recon_loss(const Tensor<Scalar>& x_hat, const Tensor<Scalar>& x);

/// D_il = log D_i(x) + log(1 - D_i(x_g)); maximized by D_i.
template <typename Scalar>
PairLossValue<Scalar> disc_loss(const ScoreBatch<Scalar>& d_real, const ScoreBatch<Scalar>& d_fake,
                                double epsilon = kDefaultLossEpsilon);

/// D_lg = log(1 - D_i(D(z_g))); minimized by D and G.
template <typename Scalar>
LossValue<Scalar> dec_gen_loss(const ScoreBatch<Scalar>& d_fake, double epsilon = kDefaultLossEpsilon);

/// D_le = log(1 - D_i(D(E(x)))); minimized by E and D.
template <typename Scalar>
LossValue<Scalar> dec_rec_loss(const ScoreBatch<Scalar>& d_rec, double epsilon = kDefaultLossEpsilon);

/// E_l = log(1 - S(z_e, x)); minimized by E.
template <typename Scalar>
LossValue<Scalar> enc_adv_loss(const ScoreBatch<Scalar>& s_fake, double epsilon = kDefaultLossEpsilon);

/// S_l = log S(z_g, x_g) + log(1 - S(z_e, x)); maximized by S. Generator-side
/// pairs are the critic's "real" class.
template <typename Scalar>
PairLossValue<Scalar> critic_loss(const ScoreBatch<Scalar>& s_real, const ScoreBatch<Scalar>& s_fake,
                                  double epsilon = kDefaultLossEpsilon);

/// Cross-entropy -sum c log(c_hat) from logits; serves C_lg and C_le.
template <typename Scalar>
LossValue<Scalar> class_loss(const CategoricalBatch<Scalar>& c, const ClassProbBatch<Scalar>& c_hat,
                             double epsilon = kDefaultLossEpsilon);

/// T_l = alpha (C_lg + C_le) + beta (E_l + D_le + D_lg) + gamma R_l.
double total_loss(const StepMetrics& metrics, const LossWeights& weights);

} // namespace infoae

#endif // INFOAE_LOSSES_HPP_
