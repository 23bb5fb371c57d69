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
#include <infoae/trainer.hpp>

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

namespace infoae {

using nn::Backprop;
using nn::Mode;

void TrainConfig::validate() const
{
   arch.validate();
   adam.validate();
   if (!(adam.learning_rate > 0.0))
   {
      throw ArgumentError("train.lr must be positive");
   }
   if (batch_size < 2)
   {
      throw ArgumentError("train.batch_size must be at least 2 (batch norm)");
   }
   if (epochs < 1)
   {
      throw ArgumentError("train.epochs must be positive");
   }
   if (checkpoint_every < 0)
   {
      throw ArgumentError("train.checkpoint_every must be non-negative");
   }
   if (train_limit < 0)
   {
      throw ArgumentError("data.train_limit must be non-negative");
   }
   if (!(loss.epsilon > 0.0 && loss.epsilon < 0.5))
   {
      throw ArgumentError("loss.epsilon must lie in (0, 0.5)");
   }
}

std::int64_t TrainConfig::total_steps(Index count) const
{
   const std::int64_t per_epoch = count / batch_size;
   const std::int64_t full = epochs * per_epoch;
   return steps >= 0 ? std::min(steps, full) : full;
}

namespace {

template <typename Scalar>
Tensor<Scalar> scaled(const Tensor<Scalar>& t, double factor)
{
   Tensor<Scalar> out = t;
   scale_inplace(out, static_cast<Scalar>(factor));
   return out;
}

template <typename Scalar>
Tensor<Scalar> sum(Tensor<Scalar> a, const Tensor<Scalar>& b)
{
   add_inplace(a, b);
   return a;
}

template <typename Scalar>
LossValue<Scalar> negated(LossValue<Scalar> loss)
{
   loss.value = -loss.value;
   scale_inplace(loss.grad, Scalar(-1));
   return loss;
}

// Loss for a generator-side player that wants the score judged real.
template <typename Scalar>
LossValue<Scalar> fooling_loss(const Tensor<Scalar>& logits, const LossConfig& cfg)
{
   const ScoreBatch<Scalar> scores(logits);
   return cfg.non_saturating ? negated(mean_log_prob(scores, cfg.epsilon))
                             : mean_log_one_minus_prob(scores, cfg.epsilon);
}

} // namespace

template <typename Scalar>
ForwardPass<Scalar> forward_all(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, const LatentBatch<Scalar>& z,
                                const CategoricalBatch<Scalar>& c)
{
   if (z.batch_size() != x.batch_size() || c.batch_size() != x.batch_size())
   {
      throw ArgumentError("forward_all: images, noise and codes must share a batch size");
   }
   if (x.batch_size() < 2)
   {
      throw ArgumentError("training batches need at least 2 samples (batch norm)");
   }
   const Mode mode = Mode::kTrain;
   ForwardPass<Scalar> f;
   f.x = x.tensor();
   f.z = z.tensor();
   f.c = c.tensor();

   f.z_e = state.encoder.forward(f.x, mode, &f.enc_x);
   f.x_rec = state.decoder.forward(f.z_e, mode, &f.dec_rec);
   f.z_g = state.generator.forward(concat_columns(f.z, f.c), mode, &f.gen);
   f.x_gen = state.decoder.forward(f.z_g, mode, &f.dec_gen);
   f.c_gen = state.classifier.forward(f.z_g, mode, &f.cls_gen);
   f.z_e_gen = state.encoder.forward(f.x_gen, mode, &f.enc_gen);
   f.c_enc = state.classifier.forward(f.z_e_gen, mode, &f.cls_enc);
   f.s_gen = state.critic.forward(f.z_g, f.x_gen, mode, &f.critic_gen);
   f.s_enc = state.critic.forward(f.z_e, f.x, mode, &f.critic_enc);
   f.d_real = state.discriminator.forward(f.x, mode, &f.disc_real);
   f.d_gen = state.discriminator.forward(f.x_gen, mode, &f.disc_gen);
   f.d_rec = state.discriminator.forward(f.x_rec, mode, &f.disc_rec);
   return f;
}

template <typename Scalar>
Objective<Scalar> evaluate_objective(const ForwardPass<Scalar>& f, const LossConfig& cfg)
{
   Objective<Scalar> o;
   const CategoricalBatch<Scalar> codes(f.c);
   o.r_l = recon_loss(f.x_rec, f.x);
   o.d_il = disc_loss(ScoreBatch<Scalar>(f.d_real), ScoreBatch<Scalar>(f.d_gen), cfg.epsilon);
   o.d_lg = fooling_loss(f.d_gen, cfg);
   o.d_le = fooling_loss(f.d_rec, cfg);
   o.e_l = fooling_loss(f.s_enc, cfg);
   o.s_l = critic_loss(ScoreBatch<Scalar>(f.s_gen), ScoreBatch<Scalar>(f.s_enc), cfg.epsilon);
   o.c_lg = class_loss(codes, ClassProbBatch<Scalar>(f.c_gen), cfg.epsilon);
   o.c_le = class_loss(codes, ClassProbBatch<Scalar>(f.c_enc), cfg.epsilon);

   StepMetrics& m = o.metrics;
   m.r_l = o.r_l.value;
   m.d_il = o.d_il.value;
   m.d_lg = o.d_lg.value;
   m.d_le = o.d_le.value;
   m.e_l = o.e_l.value;
   m.s_l = o.s_l.value;
   m.c_lg = o.c_lg.value;
   m.c_le = o.c_le.value;
   m.t_l = total_loss(m, cfg.weights);
   return o;
}

void check_finite(const StepMetrics& metrics, std::int64_t step)
{
   const auto values = metrics.values();
   for (std::size_t ii = 0; ii < values.size(); ++ii)
   {
      if (!std::isfinite(values[ii]))
      {
         throw NonFiniteLossError(std::string(StepMetrics::kNames[ii]), values[ii], step);
      }
   }
}

template <typename Scalar>
void accumulate_max_gradients(ModelState<Scalar>& state, const ForwardPass<Scalar>& f, const Objective<Scalar>& o)
{
   const Backprop params_only{true, false};
   state.critic.backward(f.critic_gen, scaled(o.s_l.grad_real, -1.0), true, false, false);
   state.critic.backward(f.critic_enc, scaled(o.s_l.grad_fake, -1.0), true, false, false);
   state.discriminator.backward(f.disc_real, scaled(o.d_il.grad_real, -1.0), params_only);
   state.discriminator.backward(f.disc_gen, scaled(o.d_il.grad_fake, -1.0), params_only);
}

template <typename Scalar>
void accumulate_min_gradients(ModelState<Scalar>& state, const ForwardPass<Scalar>& f, const Objective<Scalar>& o,
                              const LossWeights& w)
{
   const Backprop both{true, true};
   const Backprop params_only{true, false};
   const Backprop pass_through{false, true};

   // Classifier on both code paths.
   Tensor<Scalar> grad_z_g = state.classifier.backward(f.cls_gen, scaled(o.c_lg.grad, w.alpha), both);
   Tensor<Scalar> grad_z_e_gen = state.classifier.backward(f.cls_enc, scaled(o.c_le.grad, w.alpha), both);
   Tensor<Scalar> grad_x_gen = state.encoder.backward(f.enc_gen, grad_z_e_gen, both);

   // Through the frozen adversaries.
   add_inplace(grad_x_gen, state.discriminator.backward(f.disc_gen, scaled(o.d_lg.grad, w.beta), pass_through));
   Tensor<Scalar> grad_x_rec = state.discriminator.backward(f.disc_rec, scaled(o.d_le.grad, w.beta), pass_through);
   Tensor<Scalar> grad_z_e =
      state.critic.backward(f.critic_enc, scaled(o.e_l.grad, w.beta), false, true, false).first;

   // Decoder on both latent paths, then the encoder and generator roots.
   add_inplace(grad_x_rec, scaled(o.r_l.grad, w.gamma));
   add_inplace(grad_z_e, state.decoder.backward(f.dec_rec, grad_x_rec, both));
   add_inplace(grad_z_g, state.decoder.backward(f.dec_gen, grad_x_gen, both));
   state.encoder.backward(f.enc_x, grad_z_e, params_only);
   state.generator.backward(f.gen, grad_z_g, params_only);
}

template <typename Scalar>
StepMetrics train_step(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, const LatentBatch<Scalar>& z,
                       const CategoricalBatch<Scalar>& c, const TrainConfig& cfg)
{
   cfg.adam.validate();
   const std::int64_t t = state.step + 1;
   ForwardPass<Scalar> f = forward_all(state, x, z, c);
   const Objective<Scalar> o = evaluate_objective(f, cfg.loss);
   check_finite(o.metrics, t);

   state.zero_grad();
   accumulate_max_gradients(state, f, o);
   accumulate_min_gradients(state, f, o, cfg.loss.weights);
   adam_update(state.max_parameters(), state.opt_max, cfg.adam, t);
   adam_update(state.min_parameters(), state.opt_min, cfg.adam, t);
   state.step = t;
   return o.metrics;
}

template <typename Scalar>
StepMetrics train_step(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, const TrainConfig& cfg)
{
   const LatentBatch<Scalar> z = sample_noise<Scalar>(x.batch_size(), state.rng);
   const CategoricalBatch<Scalar> c = sample_categories<Scalar>(x.batch_size(), state.rng);
   return train_step(state, x, z, c, cfg);
}

std::string format_metrics_line(std::int64_t step, const StepMetrics& metrics)
{
   std::string line = std::to_string(step);
   char buffer[32];
   for (double v : metrics.values())
   {
      std::snprintf(buffer, sizeof(buffer), "\t%.9g", v);
      line += buffer;
   }
   return line;
}

std::pair<std::int64_t, StepMetrics> parse_metrics_line(const std::string& line)
{
   std::istringstream in(line);
   std::int64_t step = 0;
   std::array<double, 9> v{};
   in >> step;
   for (double& value : v)
   {
      in >> value;
   }
   if (!in || !(in >> std::ws).eof())
   {
      throw FormatError("malformed metrics line: " + line);
   }
   return {step, StepMetrics{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]}};
}

std::string periodic_checkpoint_name(std::int64_t step)
{
   char buffer[32];
   std::snprintf(buffer, sizeof(buffer), "step_%08lld.ckpt", static_cast<long long>(step));
   return buffer;
}

namespace {

constexpr std::size_t kMetricsTail = 10;

// Keeps lines of an existing log up to and including `last_step`.
std::vector<std::string> read_log_prefix(const std::filesystem::path& path, std::int64_t last_step)
{
   std::vector<std::string> kept;
   std::ifstream in(path);
   std::string line;
   while (std::getline(in, line))
   {
      if (line.empty())
      {
         continue;
      }
      if (parse_metrics_line(line).first > last_step)
      {
         break;
      }
      kept.push_back(line);
   }
   return kept;
}

} // namespace

TrainResult train(const TrainConfig& cfg_in, const std::optional<std::filesystem::path>& resume,
                  const StepCallback& on_step)
{
   TrainConfig cfg = cfg_in;
   TrainResult result;
   std::deque<std::string> tail;
   if (resume)
   {
      Checkpoint ckpt = load_checkpoint(*resume);
      // The run continues under the stored configuration; only the stopping
      // point and output location follow the caller.
      const std::int64_t steps = cfg.steps;
      const std::int64_t epochs = cfg.epochs;
      const std::int64_t every = cfg.checkpoint_every;
      const std::filesystem::path out_dir = cfg.out_dir;
      cfg = ckpt.config;
      cfg.steps = steps;
      cfg.epochs = epochs;
      cfg.checkpoint_every = every;
      cfg.out_dir = out_dir;
      result.state = std::move(ckpt.state);
      tail.assign(ckpt.metrics_tail.begin(), ckpt.metrics_tail.end());
   }
   cfg.validate();
   if (!resume)
   {
      result.state = init_networks<float>(cfg.arch, cfg.seed);
   }

   ImageSet raw = load_idx_images(cfg.train_images);
   if (cfg.train_limit > 0 && cfg.train_limit < raw.count)
   {
      raw = take_images(raw, cfg.train_limit);
   }
   const ImageBatch<float> images = normalize<float>(raw);
   if (raw.count < cfg.batch_size)
   {
      throw ArgumentError("batch size " + std::to_string(cfg.batch_size) + " exceeds the " +
                          std::to_string(raw.count) + " training images");
   }
   const std::int64_t per_epoch = raw.count / cfg.batch_size;
   const std::int64_t total = cfg.total_steps(raw.count);

   std::error_code ec;
   std::filesystem::create_directories(cfg.out_dir, ec);
   if (ec)
   {
      throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
   }
   const std::filesystem::path log_path = cfg.out_dir / kMetricsFileName;
   std::vector<std::string> prefix;
   if (resume)
   {
      prefix = read_log_prefix(log_path, result.state.step);
   }
   std::ofstream log(log_path, std::ios::trunc);
   if (!log)
   {
      throw IoError("cannot write metrics log " + log_path.string());
   }
   for (const std::string& line : prefix)
   {
      log << line << '\n';
   }
   log.flush();

   auto save = [&](const std::filesystem::path& path) {
      save_checkpoint(result.state, cfg, std::vector<std::string>(tail.begin(), tail.end()), path);
   };

   std::int64_t epoch = result.state.step / per_epoch;
   BatchIndices order;
   std::int64_t loaded_epoch = -1;
   while (result.state.step < total)
   {
      epoch = result.state.step / per_epoch;
      if (epoch != loaded_epoch)
      {
         order = batch_indices(raw.count, cfg.batch_size, cfg.seed, static_cast<std::uint64_t>(epoch));
         loaded_epoch = epoch;
      }
      const auto& indices = order[static_cast<std::size_t>(result.state.step % per_epoch)];
      const ImageBatch<float> batch = gather(images, std::span<const Index>(indices));
      const StepMetrics metrics = train_step(result.state, batch, cfg);
      const std::string line = format_metrics_line(result.state.step, metrics);
      log << line << '\n';
      if (!log)
      {
         throw IoError("failed writing metrics log " + log_path.string());
      }
      tail.push_back(line);
      if (tail.size() > kMetricsTail)
      {
         tail.pop_front();
      }
      ++result.steps_run;
      if (on_step)
      {
         on_step(result.state.step, metrics);
      }
      if (cfg.checkpoint_every > 0 && result.state.step % cfg.checkpoint_every == 0)
      {
         log.flush();
         save(cfg.out_dir / periodic_checkpoint_name(result.state.step));
      }
   }
   log.flush();
   result.final_checkpoint = cfg.out_dir / kFinalCheckpointName;
   save(result.final_checkpoint);
   result.metrics_tail.assign(tail.begin(), tail.end());
   return result;
}

#define INFOAE_INSTANTIATE_TRAINER(Scalar)                                                                             \
   template ForwardPass<Scalar> forward_all(ModelState<Scalar>&, const ImageBatch<Scalar>&, const LatentBatch<Scalar>&, \
                                            const CategoricalBatch<Scalar>&);                                          \
   template Objective<Scalar> evaluate_objective(const ForwardPass<Scalar>&, const LossConfig&);                       \
   template void accumulate_max_gradients(ModelState<Scalar>&, const ForwardPass<Scalar>&, const Objective<Scalar>&);  \
   template void accumulate_min_gradients(ModelState<Scalar>&, const ForwardPass<Scalar>&, const Objective<Scalar>&,   \
                                          const LossWeights&);                                                         \
   template StepMetrics train_step(ModelState<Scalar>&, const ImageBatch<Scalar>&, const LatentBatch<Scalar>&,         \
                                   const CategoricalBatch<Scalar>&, const TrainConfig&);                               \
   template StepMetrics train_step(ModelState<Scalar>&, const ImageBatch<Scalar>&, const TrainConfig&);

INFOAE_INSTANTIATE_TRAINER(float)
INFOAE_INSTANTIATE_TRAINER(double)

#undef INFOAE_INSTANTIATE_TRAINER

} // namespace infoae
