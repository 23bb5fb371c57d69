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

#include <infoae/losses.hpp>

#include <cmath>

namespace infoae {

namespace {

// log(sigmoid(t)) without overflow.
double log_sigmoid(double t)
{
   return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

double sigmoid(double t)
{
   return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

void require_epsilon(double epsilon)
{
   if (!(epsilon > 0.0 && epsilon < 0.5))
   {
      throw ArgumentError("loss epsilon must lie in (0, 0.5)");
   }
}

// mean over the batch of log(clamp(sigmoid(sign * logit))). Clamping to
// [eps, 1 - eps] is a clamp of the log to [log eps, log1p(-eps)]; the
// gradient vanishes where the clamp is active.
template <typename Scalar>
LossValue<Scalar> mean_clamped_log_sigmoid(const ScoreBatch<Scalar>& scores, double sign, double epsilon)
{
   require_epsilon(epsilon);
   const double floor = std::log(epsilon);
   const double ceil = std::log1p(-epsilon);
   const Index n = scores.batch_size();
   if (n <= 0)
   {
      throw ArgumentError("loss over an empty batch");
   }
   LossValue<Scalar> out{0.0, Tensor<Scalar>({n})};
   for (Index ii = 0; ii < n; ++ii)
   {
      const double t = sign * static_cast<double>(scores.logits()[ii]);
      const double raw = log_sigmoid(t);
      if (raw <= floor)
      {
         out.value += floor;
      }
      else if (raw >= ceil)
      {
         out.value += ceil;
      }
      else
      {
         out.value += raw;
         // d/dl log sigmoid(sign * l) = sign * sigmoid(-sign * l)
         out.grad[ii] = static_cast<Scalar>(sign * sigmoid(-t) / static_cast<double>(n));
      }
   }
   out.value /= static_cast<double>(n);
   return out;
}

template <typename Scalar>
void require_same_batch(const ScoreBatch<Scalar>& a, const ScoreBatch<Scalar>& b)
{
   if (a.batch_size() != b.batch_size())
   {
      throw ArgumentError("score batches differ in size: " + std::to_string(a.batch_size()) + " vs " +
                          std::to_string(b.batch_size()));
   }
}

} // namespace

template <typename Scalar>
LossValue<Scalar> mean_log_prob(const ScoreBatch<Scalar>& scores, double epsilon)
{
   return mean_clamped_log_sigmoid(scores, 1.0, epsilon);
}

template <typename Scalar>
LossValue<Scalar> mean_log_one_minus_prob(const ScoreBatch<Scalar>& scores, double epsilon)
{
   return mean_clamped_log_sigmoid(scores, -1.0, epsilon);
}

template <typename Scalar>
LossValue<Scalar> recon_loss(const ImageBatch<Scalar>& x_hat, const ImageBatch<Scalar>& x)
{
   return recon_loss(x_hat.tensor(), x.tensor());
}

template <typename Scalar>
LossValue<Scalar> recon_loss(const Tensor<Scalar>& a, const Tensor<Scalar>& b)
{
   if (a.shape() != b.shape() || a.rank() == 0 || a.dim(0) == 0)
   {
      throw ArgumentError("recon_loss: shape " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
   }
   const Index n = a.dim(0);
   const Index stride = a.size() / n;
   LossValue<Scalar> out{0.0, Tensor<Scalar>(a.shape())};
   for (Index s = 0; s < n; ++s)
   {
      double squared = 0.0;
      for (Index ii = s * stride; ii < (s + 1) * stride; ++ii)
      {
         const double d = static_cast<double>(a[ii]) - static_cast<double>(b[ii]);
         squared += d * d;
      }
      const double norm = std::sqrt(squared);
      out.value += norm;
      // The norm is not differentiable at zero; take the zero subgradient.
      if (norm > 0.0)
      {
         const double scale = 1.0 / (norm * static_cast<double>(n));
         for (Index ii = s * stride; ii < (s + 1) * stride; ++ii)
         {
            out.grad[ii] = static_cast<Scalar>((static_cast<double>(a[ii]) - static_cast<double>(b[ii])) * scale);
         }
      }
   }
   out.value /= static_cast<double>(n);
   return out;
}

template <typename Scalar>
PairLossValue<Scalar> disc_loss(const ScoreBatch<Scalar>& d_real, const ScoreBatch<Scalar>& d_fake, double epsilon)
{
   require_same_batch(d_real, d_fake);
   LossValue<Scalar> real = mean_log_prob(d_real, epsilon);
   LossValue<Scalar> fake = mean_log_one_minus_prob(d_fake, epsilon);
   return {real.value + fake.value, std::move(real.grad), std::move(fake.grad)};
}

template <typename Scalar>
LossValue<Scalar> dec_gen_loss(const ScoreBatch<Scalar>& d_fake, double epsilon)
{
   return mean_log_one_minus_prob(d_fake, epsilon);
}

template <typename Scalar>
LossValue<Scalar> dec_rec_loss(const ScoreBatch<Scalar>& d_rec, double epsilon)
{
   return mean_log_one_minus_prob(d_rec, epsilon);
}

template <typename Scalar>
LossValue<Scalar> enc_adv_loss(const ScoreBatch<Scalar>& s_fake, double epsilon)
{
   return mean_log_one_minus_prob(s_fake, epsilon);
}

template <typename Scalar>
PairLossValue<Scalar> critic_loss(const ScoreBatch<Scalar>& s_real, const ScoreBatch<Scalar>& s_fake, double epsilon)
{
   return disc_loss(s_real, s_fake, epsilon);
}

template <typename Scalar>
LossValue<Scalar> class_loss(const CategoricalBatch<Scalar>& c, const ClassProbBatch<Scalar>& c_hat, double epsilon)
{
   require_epsilon(epsilon);
   if (c.batch_size() != c_hat.batch_size())
   {
      throw ArgumentError("class_loss: code batch " + std::to_string(c.batch_size()) + " vs prediction batch " +
                          std::to_string(c_hat.batch_size()));
   }
   const double floor = std::log(epsilon);
   const double ceil = std::log1p(-epsilon);
   const Index n = c.batch_size();
   const Tensor<Scalar>& logits = c_hat.logits();
   LossValue<Scalar> out{0.0, Tensor<Scalar>(logits.shape())};
   for (Index row = 0; row < n; ++row)
   {
      double peak = logits(row, 0);
      for (Index col = 1; col < kNumCategories; ++col)
      {
         peak = std::max(peak, static_cast<double>(logits(row, col)));
      }
      double total = 0.0;
      for (Index col = 0; col < kNumCategories; ++col)
      {
         total += std::exp(static_cast<double>(logits(row, col)) - peak);
      }
      const double log_norm = peak + std::log(total);
      const int target = c.class_of(row);
      const double log_p = static_cast<double>(logits(row, target)) - log_norm;
      if (log_p <= floor)
      {
         out.value -= floor;
         continue;
      }
      if (log_p >= ceil)
      {
         out.value -= ceil;
         continue;
      }
      out.value -= log_p;
      for (Index col = 0; col < kNumCategories; ++col)
      {
         const double p = std::exp(static_cast<double>(logits(row, col)) - log_norm);
         const double indicator = col == target ? 1.0 : 0.0;
         out.grad(row, col) = static_cast<Scalar>((p - indicator) / static_cast<double>(n));
      }
   }
   out.value /= static_cast<double>(n);
   return out;
}

double total_loss(const StepMetrics& m, const LossWeights& w)
{
   return w.alpha * (m.c_lg + m.c_le) + w.beta * (m.e_l + m.d_le + m.d_lg) + w.gamma * m.r_l;
}

#define INFOAE_INSTANTIATE_LOSSES(Scalar)                                                                              \
   template LossValue<Scalar> mean_log_prob(const ScoreBatch<Scalar>&, double);                                        \
   template LossValue<Scalar> mean_log_one_minus_prob(const ScoreBatch<Scalar>&, double);                              \
   template LossValue<Scalar> recon_loss(const ImageBatch<Scalar>&, const ImageBatch<Scalar>&);                        \
   template LossValue<Scalar> recon_loss(const Tensor<Scalar>&, const Tensor<Scalar>&);                                \
   template PairLossValue<Scalar> disc_loss(const ScoreBatch<Scalar>&, const ScoreBatch<Scalar>&, double);             \
   template LossValue<Scalar> dec_gen_loss(const ScoreBatch<Scalar>&, double);                                         \
   template LossValue<Scalar> dec_rec_loss(const ScoreBatch<Scalar>&, double);                                         \
   template LossValue<Scalar> enc_adv_loss(const ScoreBatch<Scalar>&, double);                                         \
   template PairLossValue<Scalar> critic_loss(const ScoreBatch<Scalar>&, const ScoreBatch<Scalar>&, double);           \
   template LossValue<Scalar> class_loss(const CategoricalBatch<Scalar>&, const ClassProbBatch<Scalar>&, double);

INFOAE_INSTANTIATE_LOSSES(float)
INFOAE_INSTANTIATE_LOSSES(double)

#undef INFOAE_INSTANTIATE_LOSSES

} // namespace infoae
