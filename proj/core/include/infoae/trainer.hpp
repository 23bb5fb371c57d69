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

#ifndef INFOAE_TRAINER_HPP_
#define INFOAE_TRAINER_HPP_

#include <infoae/adam.hpp>
#include <infoae/data.hpp>
#include <infoae/losses.hpp>
#include <infoae/networks.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace infoae {

/// Everything train() needs. There is deliberately no label path here.
struct TrainConfig {
   ArchConfig arch;
   LossConfig loss;
   AdamConfig adam;
   Index batch_size = 100;
   std::int64_t epochs = 100;
   /// Stop after this many steps in total; negative means epochs x steps-per-epoch.
   std::int64_t steps = -1;
   std::uint64_t seed = 0;
   /// Write a checkpoint every this many steps; 0 disables periodic checkpoints.
   std::int64_t checkpoint_every = 0;
   std::filesystem::path train_images = "data/mnist/train-images-idx3-ubyte";
   /// Use only the first this-many training images; 0 uses all.
   Index train_limit = 0;
   std::filesystem::path out_dir = "runs/default";

   void validate() const;

   /// Total steps for a data set of `count` images.
   std::int64_t total_steps(Index count) const;

   friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Activations and traces of every path through the six networks for one batch.
template <typename Scalar>
struct ForwardPass {
   Tensor<Scalar> x;
   Tensor<Scalar> z;
   Tensor<Scalar> c;

   Tensor<Scalar> z_e;       ///< E(x)
   Tensor<Scalar> x_rec;     ///< D(z_e)
   Tensor<Scalar> z_g;       ///< G(z, c)
   Tensor<Scalar> x_gen;     ///< D(z_g)
   Tensor<Scalar> c_gen;     ///< C(z_g), logits
   Tensor<Scalar> z_e_gen;   ///< E(x_gen)
   Tensor<Scalar> c_enc;     ///< C(E(x_gen)), logits
   Tensor<Scalar> s_gen;     ///< S(z_g, x_gen)
   Tensor<Scalar> s_enc;     ///< S(z_e, x)
   Tensor<Scalar> d_real;    ///< D_i(x)
   Tensor<Scalar> d_gen;     ///< D_i(x_gen)
   Tensor<Scalar> d_rec;     ///< D_i(x_rec)

   nn::Trace<Scalar> enc_x;
   nn::Trace<Scalar> dec_rec;
   nn::Trace<Scalar> gen;
   nn::Trace<Scalar> dec_gen;
   nn::Trace<Scalar> cls_gen;
   nn::Trace<Scalar> enc_gen;
   nn::Trace<Scalar> cls_enc;
   CriticTrace<Scalar> critic_gen;
   CriticTrace<Scalar> critic_enc;
   nn::Trace<Scalar> disc_real;
   nn::Trace<Scalar> disc_gen;
   nn::Trace<Scalar> disc_rec;
};

/// Loss values with their gradients at the network outputs.
template <typename Scalar>
struct Objective {
   StepMetrics metrics;
   LossValue<Scalar> r_l;
   PairLossValue<Scalar> d_il; ///< (real = D_i(x), fake = D_i(x_gen))
   LossValue<Scalar> d_lg;
   LossValue<Scalar> d_le;
   LossValue<Scalar> e_l;
   PairLossValue<Scalar> s_l; ///< (real = S(z_g, x_gen), fake = S(z_e, x))
   LossValue<Scalar> c_lg;
   LossValue<Scalar> c_le;
};

/// Runs every forward path in training mode. Batch-norm running statistics
/// advance once per network application.
template <typename Scalar>
ForwardPass<Scalar> forward_all(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, const LatentBatch<Scalar>& z,
                                const CategoricalBatch<Scalar>& c);

/// Evaluates all loss terms of a forward pass. With non_saturating set,
/// E_l, D_lg and D_le hold -mean(log p) in place of mean(log(1 - p)).
template <typename Scalar>
Objective<Scalar> evaluate_objective(const ForwardPass<Scalar>& fwd, const LossConfig& cfg);

/// Throws NonFiniteLossError naming the first non-finite term.
void check_finite(const StepMetrics& metrics, std::int64_t step);

/// Gradients of -D_il and -S_l into D_i and S parameters. Inputs are detached.
template <typename Scalar>
void accumulate_max_gradients(ModelState<Scalar>& state, const ForwardPass<Scalar>& fwd,
                              const Objective<Scalar>& objective);

/// Gradients of T_l into E, D, G and C parameters. D_i and S pass gradients
/// through at their current values without accumulating into their own.
template <typename Scalar>
void accumulate_min_gradients(ModelState<Scalar>& state, const ForwardPass<Scalar>& fwd,
                              const Objective<Scalar>& objective, const LossWeights& weights);

/// One joint update with caller-provided noise and codes.
template <typename Scalar>
StepMetrics train_step(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, const LatentBatch<Scalar>& z,
                       const CategoricalBatch<Scalar>& c, const TrainConfig& cfg);

/// One joint update; z and c are drawn from state.rng.
template <typename Scalar>
StepMetrics train_step(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, const TrainConfig& cfg);

/// One metrics-log line (no trailing newline).
std::string format_metrics_line(std::int64_t step, const StepMetrics& metrics);

/// Parses a metrics-log line; throws FormatError.
std::pair<std::int64_t, StepMetrics> parse_metrics_line(const std::string& line);

struct TrainResult {
   ModelState<float> state;
   std::vector<std::string> metrics_tail;
   std::filesystem::path final_checkpoint;
   std::int64_t steps_run = 0;
};

/// Per-step observer; receives the completed step index and its metrics.
using StepCallback = std::function<void(std::int64_t, const StepMetrics&)>;

/// Trains from scratch, or continues from `resume`. Writes
/// out_dir/metrics.tsv, out_dir/step_NNNNNNNN.ckpt every checkpoint_every
/// steps and out_dir/final.ckpt.
TrainResult train(const TrainConfig& cfg, const std::optional<std::filesystem::path>& resume = std::nullopt,
                  const StepCallback& on_step = {});

inline constexpr const char* kMetricsFileName = "metrics.tsv";
inline constexpr const char* kFinalCheckpointName = "final.ckpt";
std::string periodic_checkpoint_name(std::int64_t step);

} // namespace infoae

#endif // INFOAE_TRAINER_HPP_
