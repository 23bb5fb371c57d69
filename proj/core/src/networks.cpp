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

#include <infoae/networks.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace infoae {

using nn::BatchNorm;
using nn::Conv2d;
using nn::ConvTranspose2d;
using nn::Dense;
using nn::LeakyRelu;
using nn::Mode;
using nn::Reshape;
using nn::Sequential;
using nn::Tanh;

namespace {

constexpr Index kDecoderBase = kImageSide / 4;

Index same_padding(Index kernel)
{
   return (kernel - 1) / 2;
}

Index conv_extent(Index input, Index kernel)
{
   return (input + 2 * same_padding(kernel) - kernel) / 2 + 1;
}

// Shared by E and D_i: stride-2 convolutions with batch norm on all but the first.
template <typename Scalar>
Index add_conv_stack(Sequential<Scalar>& net, const std::string& prefix, const ArchConfig& arch, int stages)
{
   const Index channels[] = {1, arch.conv1_channels, arch.conv2_channels, arch.conv3_channels};
   const Index kernels[] = {arch.conv1_kernel, arch.conv2_kernel, arch.conv3_kernel};
   Index extent = kImageSide;
   for (int ss = 0; ss < stages; ++ss)
   {
      const std::string tag = std::to_string(ss + 1);
      net.add(Conv2d<Scalar>(prefix + ".conv" + tag, channels[ss], channels[ss + 1], kernels[ss], 2,
                             same_padding(kernels[ss])));
      if (ss > 0)
      {
         net.add(BatchNorm<Scalar>(prefix + ".bn" + tag, channels[ss + 1], arch.bn_momentum, arch.bn_epsilon));
      }
      net.add(LeakyRelu<Scalar>(arch.leaky_slope));
      extent = conv_extent(extent, kernels[ss]);
   }
   const Index flat = channels[stages] * extent * extent;
   net.add(Reshape<Scalar>({flat}));
   return flat;
}

void require_positive(Index value, const char* key)
{
   if (value <= 0)
   {
      throw ArgumentError(std::string("architecture: ") + key + " must be positive");
   }
}

} // namespace

void ArchConfig::validate() const
{
   require_positive(conv1_channels, "conv1_channels");
   require_positive(conv2_channels, "conv2_channels");
   require_positive(conv3_channels, "conv3_channels");
   require_positive(conv1_kernel, "conv1_kernel");
   require_positive(conv2_kernel, "conv2_kernel");
   require_positive(conv3_kernel, "conv3_kernel");
   require_positive(decoder_channels, "decoder_channels");
   require_positive(decoder_hidden_channels, "decoder_hidden_channels");
   require_positive(mlp_hidden, "mlp_hidden");
   require_positive(critic_features, "critic_features");
   // (7 - 1) * 2 - 2p + k = 14 needs p = (k - 2) / 2, hence an even kernel.
   if (decoder_kernel < 2 || decoder_kernel % 2 != 0)
   {
      throw ArgumentError("architecture: decoder_kernel must be even and at least 2");
   }
   Index extent = kImageSide;
   for (Index kernel : {conv1_kernel, conv2_kernel, conv3_kernel})
   {
      extent = conv_extent(extent, kernel);
      if (extent <= 0)
      {
         throw ArgumentError("architecture: encoder kernels collapse the feature map");
      }
   }
   if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
   {
      throw ArgumentError("architecture: leaky_slope must lie in [0, 1)");
   }
   if (!(init_stddev > 0.0) || !(mlp_init_stddev > 0.0))
   {
      throw ArgumentError("architecture: initialization standard deviations must be positive");
   }
   if (!(bn_momentum >= 0.0 && bn_momentum < 1.0) || !(bn_epsilon > 0.0))
   {
      throw ArgumentError("architecture: bn_momentum or bn_epsilon out of range");
   }
}

ArchConfig ArchConfig::reduced(Index factor)
{
   if (factor <= 0)
   {
      throw ArgumentError("reduction factor must be positive");
   }
   ArchConfig arch;
   auto shrink = [factor](Index& width) { width = std::max<Index>(1, width / factor); };
   shrink(arch.conv1_channels);
   shrink(arch.conv2_channels);
   shrink(arch.conv3_channels);
   shrink(arch.decoder_channels);
   shrink(arch.decoder_hidden_channels);
   shrink(arch.mlp_hidden);
   shrink(arch.critic_features);
   return arch;
}

// ---------------------------------------------------------------------------
// Typed batches

template <typename Scalar>
LatentBatch<Scalar>::LatentBatch(Tensor<Scalar> data) : data_(std::move(data))
{
   if (data_.rank() != 2 || data_.dim(0) <= 0 || data_.dim(1) != kLatentDim)
   {
      throw ArgumentError("latent batch must be (batch > 0, 100), got " + shape_string(data_.shape()));
   }
   if (!data_.all_finite())
   {
      throw ArgumentError("latent batch contains non-finite values");
   }
}

template <typename Scalar>
CategoricalBatch<Scalar>::CategoricalBatch(Tensor<Scalar> data) : data_(std::move(data))
{
   if (data_.rank() != 2 || data_.dim(0) <= 0 || data_.dim(1) != kNumCategories)
   {
      throw ArgumentError("categorical batch must be (batch > 0, 10), got " + shape_string(data_.shape()));
   }
   for (Index row = 0; row < data_.dim(0); ++row)
   {
      int ones = 0;
      for (Index col = 0; col < kNumCategories; ++col)
      {
         const Scalar v = data_(row, col);
         if (v == Scalar(1))
         {
            ++ones;
         }
         else if (v != Scalar(0))
         {
            throw ArgumentError("categorical batch row " + std::to_string(row) + " is not one-hot");
         }
      }
      if (ones != 1)
      {
         throw ArgumentError("categorical batch row " + std::to_string(row) + " is not one-hot");
      }
   }
}

template <typename Scalar>
CategoricalBatch<Scalar> CategoricalBatch<Scalar>::from_classes(const std::vector<int>& classes)
{
   Tensor<Scalar> data({static_cast<Index>(classes.size()), kNumCategories});
   for (std::size_t row = 0; row < classes.size(); ++row)
   {
      if (classes[row] < 0 || classes[row] >= kNumCategories)
      {
         throw ArgumentError("category " + std::to_string(classes[row]) + " out of range");
      }
      data(static_cast<Index>(row), classes[row]) = Scalar(1);
   }
   return CategoricalBatch(std::move(data));
}

template <typename Scalar>
int CategoricalBatch<Scalar>::class_of(Index row) const
{
   for (Index col = 0; col < kNumCategories; ++col)
   {
      if (data_(row, col) == Scalar(1))
      {
         return static_cast<int>(col);
      }
   }
   return -1;
}

template <typename Scalar>
ClassProbBatch<Scalar>::ClassProbBatch(Tensor<Scalar> logits) : logits_(std::move(logits))
{
   if (logits_.rank() != 2 || logits_.dim(1) != kNumCategories)
   {
      throw ArgumentError("class logits must be (batch, 10), got " + shape_string(logits_.shape()));
   }
   probs_ = Tensor<Scalar>(logits_.shape());
   for (Index row = 0; row < logits_.dim(0); ++row)
   {
      double peak = logits_(row, 0);
      for (Index col = 1; col < kNumCategories; ++col)
      {
         peak = std::max(peak, static_cast<double>(logits_(row, col)));
      }
      double total = 0.0;
      for (Index col = 0; col < kNumCategories; ++col)
      {
         total += std::exp(static_cast<double>(logits_(row, col)) - peak);
      }
      for (Index col = 0; col < kNumCategories; ++col)
      {
         probs_(row, col) = static_cast<Scalar>(std::exp(static_cast<double>(logits_(row, col)) - peak) / total);
      }
   }
}

template <typename Scalar>
int ClassProbBatch<Scalar>::argmax(Index row) const
{
   int best = 0;
   for (Index col = 1; col < kNumCategories; ++col)
   {
      if (logits_(row, col) > logits_(row, best))
      {
         best = static_cast<int>(col);
      }
   }
   return best;
}

template <typename Scalar>
ScoreBatch<Scalar>::ScoreBatch(Tensor<Scalar> logits) : logits_(std::move(logits))
{
   if (logits_.rank() == 2 && logits_.dim(1) == 1)
   {
      logits_.reshape({logits_.dim(0)});
   }
   if (logits_.rank() != 1)
   {
      throw ArgumentError("scores must be rank 1, got " + shape_string(logits_.shape()));
   }
}

template <typename Scalar>
ScoreBatch<Scalar> ScoreBatch<Scalar>::from_probs(const std::vector<double>& probs)
{
   Tensor<Scalar> logits({static_cast<Index>(probs.size())});
   for (std::size_t ii = 0; ii < probs.size(); ++ii)
   {
      const double p = probs[ii];
      if (!(p > 0.0 && p < 1.0))
      {
         throw ArgumentError("probability must lie in (0, 1)");
      }
      logits[static_cast<Index>(ii)] = static_cast<Scalar>(std::log(p) - std::log1p(-p));
   }
   return ScoreBatch(std::move(logits));
}

template <typename Scalar>
double ScoreBatch<Scalar>::prob(Index ii) const
{
   return 1.0 / (1.0 + std::exp(-static_cast<double>(logits_[ii])));
}

// ---------------------------------------------------------------------------
// Critic

template <typename Scalar>
Critic<Scalar>::Critic(Sequential<Scalar> image_branch, Sequential<Scalar> latent_branch, Sequential<Scalar> head)
   : image_(std::move(image_branch)), latent_(std::move(latent_branch)), head_(std::move(head))
{
}

template <typename Scalar>
Tensor<Scalar> Critic<Scalar>::forward(const Tensor<Scalar>& z, const Tensor<Scalar>& x, Mode mode,
                                       CriticTrace<Scalar>* trace)
{
   if (z.dim(0) != x.dim(0))
   {
      throw ArgumentError("critic: latent batch " + std::to_string(z.dim(0)) + " vs image batch " +
                          std::to_string(x.dim(0)));
   }
   Tensor<Scalar> image_features = image_.forward(x, mode, trace ? &trace->image : nullptr);
   Tensor<Scalar> latent_features = latent_.forward(z, mode, trace ? &trace->latent : nullptr);
   return head_.forward(concat_columns(image_features, latent_features), mode, trace ? &trace->head : nullptr);
}

template <typename Scalar>
Tensor<Scalar> Critic<Scalar>::infer(const Tensor<Scalar>& z, const Tensor<Scalar>& x) const
{
   if (z.dim(0) != x.dim(0))
   {
      throw ArgumentError("critic: latent batch " + std::to_string(z.dim(0)) + " vs image batch " +
                          std::to_string(x.dim(0)));
   }
   return head_.infer(concat_columns(image_.infer(x), latent_.infer(z)));
}

template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> Critic<Scalar>::backward(const CriticTrace<Scalar>& trace,
                                                                   const Tensor<Scalar>& grad_logits,
                                                                   bool accumulate_params, bool latent_grad,
                                                                   bool image_grad)
{
   const Tensor<Scalar> joint = head_.backward(trace.head, grad_logits, {accumulate_params, true});
   const Index image_width = joint.dim(1) / 2;
   auto [grad_image_features, grad_latent_features] = split_columns(joint, image_width);
   Tensor<Scalar> grad_x;
   Tensor<Scalar> grad_z;
   if (accumulate_params || image_grad)
   {
      grad_x = image_.backward(trace.image, grad_image_features, {accumulate_params, image_grad});
   }
   if (accumulate_params || latent_grad)
   {
      grad_z = latent_.backward(trace.latent, grad_latent_features, {accumulate_params, latent_grad});
   }
   return {std::move(grad_z), std::move(grad_x)};
}

template <typename Scalar>
std::vector<nn::Parameter<Scalar>*> Critic<Scalar>::parameters()
{
   std::vector<nn::Parameter<Scalar>*> out = image_.parameters();
   for (auto* p : latent_.parameters())
   {
      out.push_back(p);
   }
   for (auto* p : head_.parameters())
   {
      out.push_back(p);
   }
   return out;
}

template <typename Scalar>
std::vector<const nn::Parameter<Scalar>*> Critic<Scalar>::parameters() const
{
   std::vector<const nn::Parameter<Scalar>*> out;
   for (auto* p : const_cast<Critic*>(this)->parameters())
   {
      out.push_back(p);
   }
   return out;
}

template <typename Scalar>
std::vector<nn::Buffer<Scalar>*> Critic<Scalar>::buffers()
{
   std::vector<nn::Buffer<Scalar>*> out = image_.buffers();
   for (auto* b : latent_.buffers())
   {
      out.push_back(b);
   }
   for (auto* b : head_.buffers())
   {
      out.push_back(b);
   }
   return out;
}

template <typename Scalar>
std::vector<const nn::Buffer<Scalar>*> Critic<Scalar>::buffers() const
{
   std::vector<const nn::Buffer<Scalar>*> out;
   for (auto* b : const_cast<Critic*>(this)->buffers())
   {
      out.push_back(b);
   }
   return out;
}

template <typename Scalar>
void Critic<Scalar>::zero_grad()
{
   image_.zero_grad();
   latent_.zero_grad();
   head_.zero_grad();
}

template <typename Scalar>
void Critic<Scalar>::initialize(Rng& rng, double stddev)
{
   image_.initialize(rng, stddev);
   latent_.initialize(rng, stddev);
   head_.initialize(rng, stddev);
}

// ---------------------------------------------------------------------------
// Builders

template <typename Scalar>
Sequential<Scalar> build_encoder(const ArchConfig& arch)
{
   arch.validate();
   Sequential<Scalar> net("E");
   const Index flat = add_conv_stack(net, "E", arch, 3);
   net.add(Dense<Scalar>("E.fc", flat, kLatentDim));
   return net;
}

template <typename Scalar>
Sequential<Scalar> build_decoder(const ArchConfig& arch)
{
   arch.validate();
   const Index padding = (arch.decoder_kernel - 2) / 2;
   Sequential<Scalar> net("D");
   net.add(Dense<Scalar>("D.fc", kLatentDim, arch.decoder_channels * kDecoderBase * kDecoderBase));
   net.add(Reshape<Scalar>({arch.decoder_channels, kDecoderBase, kDecoderBase}));
   net.add(BatchNorm<Scalar>("D.bn0", arch.decoder_channels, arch.bn_momentum, arch.bn_epsilon));
   net.add(LeakyRelu<Scalar>(arch.leaky_slope));
   net.add(ConvTranspose2d<Scalar>("D.deconv1", arch.decoder_channels, arch.decoder_hidden_channels,
                                   arch.decoder_kernel, 2, padding));
   net.add(BatchNorm<Scalar>("D.bn1", arch.decoder_hidden_channels, arch.bn_momentum, arch.bn_epsilon));
   net.add(LeakyRelu<Scalar>(arch.leaky_slope));
   net.add(ConvTranspose2d<Scalar>("D.deconv2", arch.decoder_hidden_channels, 1, arch.decoder_kernel, 2, padding));
   net.add(Tanh<Scalar>());
   return net;
}

template <typename Scalar>
Sequential<Scalar> build_generator(const ArchConfig& arch)
{
   arch.validate();
   Sequential<Scalar> net("G");
   net.add(Dense<Scalar>("G.fc1", kLatentDim + kNumCategories, arch.mlp_hidden));
   net.add(LeakyRelu<Scalar>(arch.leaky_slope));
   net.add(Dense<Scalar>("G.fc2", arch.mlp_hidden, kLatentDim));
   return net;
}

template <typename Scalar>
Sequential<Scalar> build_classifier(const ArchConfig& arch)
{
   arch.validate();
   Sequential<Scalar> net("C");
   net.add(Dense<Scalar>("C.fc1", kLatentDim, arch.mlp_hidden));
   net.add(LeakyRelu<Scalar>(arch.leaky_slope));
   net.add(Dense<Scalar>("C.fc2", arch.mlp_hidden, kNumCategories));
   return net;
}

template <typename Scalar>
Sequential<Scalar> build_discriminator(const ArchConfig& arch)
{
   arch.validate();
   Sequential<Scalar> net("Di");
   const Index flat = add_conv_stack(net, "Di", arch, 3);
   net.add(Dense<Scalar>("Di.fc", flat, 1));
   return net;
}

template <typename Scalar>
Critic<Scalar> build_critic(const ArchConfig& arch)
{
   arch.validate();
   Sequential<Scalar> image("S.image");
   const Index flat = add_conv_stack(image, "S", arch, 2);
   image.add(Dense<Scalar>("S.image_fc", flat, arch.critic_features));
   image.add(LeakyRelu<Scalar>(arch.leaky_slope));

   Sequential<Scalar> latent("S.latent");
   latent.add(Dense<Scalar>("S.latent_fc", kLatentDim, arch.critic_features));
   latent.add(LeakyRelu<Scalar>(arch.leaky_slope));

   Sequential<Scalar> head("S.head");
   head.add(Dense<Scalar>("S.joint_fc", 2 * arch.critic_features, arch.critic_features));
   head.add(LeakyRelu<Scalar>(arch.leaky_slope));
   head.add(Dense<Scalar>("S.out", arch.critic_features, 1));
   return Critic<Scalar>(std::move(image), std::move(latent), std::move(head));
}

// ---------------------------------------------------------------------------
// ModelState

template <typename Scalar>
std::vector<nn::Parameter<Scalar>*> ModelState<Scalar>::min_parameters()
{
   std::vector<nn::Parameter<Scalar>*> out;
   for (auto* net : {&encoder, &decoder, &generator, &classifier})
   {
      for (auto* p : net->parameters())
      {
         out.push_back(p);
      }
   }
   return out;
}

template <typename Scalar>
std::vector<const nn::Parameter<Scalar>*> ModelState<Scalar>::min_parameters() const
{
   std::vector<const nn::Parameter<Scalar>*> out;
   for (auto* p : const_cast<ModelState*>(this)->min_parameters())
   {
      out.push_back(p);
   }
   return out;
}

template <typename Scalar>
std::vector<nn::Parameter<Scalar>*> ModelState<Scalar>::max_parameters()
{
   std::vector<nn::Parameter<Scalar>*> out = critic.parameters();
   for (auto* p : discriminator.parameters())
   {
      out.push_back(p);
   }
   return out;
}

template <typename Scalar>
std::vector<const nn::Parameter<Scalar>*> ModelState<Scalar>::max_parameters() const
{
   std::vector<const nn::Parameter<Scalar>*> out;
   for (auto* p : const_cast<ModelState*>(this)->max_parameters())
   {
      out.push_back(p);
   }
   return out;
}

template <typename Scalar>
std::vector<nn::Buffer<Scalar>*> ModelState<Scalar>::buffers()
{
   std::vector<nn::Buffer<Scalar>*> out;
   for (auto* net : {&encoder, &decoder, &generator, &classifier})
   {
      for (auto* b : net->buffers())
      {
         out.push_back(b);
      }
   }
   for (auto* b : critic.buffers())
   {
      out.push_back(b);
   }
   for (auto* b : discriminator.buffers())
   {
      out.push_back(b);
   }
   return out;
}

template <typename Scalar>
std::vector<const nn::Buffer<Scalar>*> ModelState<Scalar>::buffers() const
{
   std::vector<const nn::Buffer<Scalar>*> out;
   for (auto* b : const_cast<ModelState*>(this)->buffers())
   {
      out.push_back(b);
   }
   return out;
}

template <typename Scalar>
void ModelState<Scalar>::zero_grad()
{
   encoder.zero_grad();
   decoder.zero_grad();
   generator.zero_grad();
   classifier.zero_grad();
   discriminator.zero_grad();
   critic.zero_grad();
}

namespace {

template <typename Scalar>
MomentSlots<Scalar> zero_slots(const std::vector<nn::Parameter<Scalar>*>& params)
{
   MomentSlots<Scalar> slots;
   for (const auto* p : params)
   {
      slots.first.emplace_back(p->value.shape());
      slots.second.emplace_back(p->value.shape());
   }
   return slots;
}

} // namespace

template <typename Scalar>
ModelState<Scalar> init_networks(const ArchConfig& arch, std::uint64_t seed)
{
   arch.validate();
   ModelState<Scalar> state;
   state.arch = arch;
   state.encoder = build_encoder<Scalar>(arch);
   state.decoder = build_decoder<Scalar>(arch);
   state.generator = build_generator<Scalar>(arch);
   state.classifier = build_classifier<Scalar>(arch);
   state.discriminator = build_discriminator<Scalar>(arch);
   state.critic = build_critic<Scalar>(arch);

   Rng init_rng = make_rng(seed, 0);
   state.encoder.initialize(init_rng, arch.init_stddev);
   state.decoder.initialize(init_rng, arch.init_stddev);
   state.generator.initialize(init_rng, arch.mlp_init_stddev);
   state.classifier.initialize(init_rng, arch.mlp_init_stddev);
   state.critic.initialize(init_rng, arch.init_stddev);
   state.discriminator.initialize(init_rng, arch.init_stddev);

   state.opt_min = zero_slots(state.min_parameters());
   state.opt_max = zero_slots(state.max_parameters());
   state.step = 0;
   state.rng = make_rng(seed, 1);
   return state;
}

// ---------------------------------------------------------------------------
// Forward maps

template <typename Scalar>
LatentBatch<Scalar> encode(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, Mode mode)
{
   return LatentBatch<Scalar>(state.encoder.forward(x.tensor(), mode, nullptr));
}

template <typename Scalar>
LatentBatch<Scalar> encode(const ModelState<Scalar>& state, const ImageBatch<Scalar>& x)
{
   return LatentBatch<Scalar>(state.encoder.infer(x.tensor()));
}

template <typename Scalar>
ImageBatch<Scalar> decode(ModelState<Scalar>& state, const LatentBatch<Scalar>& z, Mode mode)
{
   return ImageBatch<Scalar>(state.decoder.forward(z.tensor(), mode, nullptr));
}

template <typename Scalar>
ImageBatch<Scalar> decode(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z)
{
   return ImageBatch<Scalar>(state.decoder.infer(z.tensor()));
}

template <typename Scalar>
LatentBatch<Scalar> generate_latent(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z,
                                    const CategoricalBatch<Scalar>& c)
{
   if (z.batch_size() != c.batch_size())
   {
      throw ArgumentError("generator: noise batch " + std::to_string(z.batch_size()) + " vs code batch " +
                          std::to_string(c.batch_size()));
   }
   return LatentBatch<Scalar>(state.generator.infer(concat_columns(z.tensor(), c.tensor())));
}

template <typename Scalar>
ClassProbBatch<Scalar> classify(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z)
{
   return ClassProbBatch<Scalar>(state.classifier.infer(z.tensor()));
}

template <typename Scalar>
ScoreBatch<Scalar> critic_score(ModelState<Scalar>& state, const LatentBatch<Scalar>& z, const ImageBatch<Scalar>& x,
                                Mode mode)
{
   return ScoreBatch<Scalar>(state.critic.forward(z.tensor(), x.tensor(), mode, nullptr));
}

template <typename Scalar>
ScoreBatch<Scalar> critic_score(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z,
                                const ImageBatch<Scalar>& x)
{
   return ScoreBatch<Scalar>(state.critic.infer(z.tensor(), x.tensor()));
}

template <typename Scalar>
ScoreBatch<Scalar> discriminate(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, Mode mode)
{
   return ScoreBatch<Scalar>(state.discriminator.forward(x.tensor(), mode, nullptr));
}

template <typename Scalar>
ScoreBatch<Scalar> discriminate(const ModelState<Scalar>& state, const ImageBatch<Scalar>& x)
{
   return ScoreBatch<Scalar>(state.discriminator.infer(x.tensor()));
}

template <typename Scalar>
LatentBatch<Scalar> sample_noise(Index n, Rng& rng)
{
   if (n <= 0)
   {
      throw ArgumentError("sample_noise: n must be positive");
   }
   Tensor<Scalar> z({n, kLatentDim});
   for (Scalar& v : z.values())
   {
      v = static_cast<Scalar>(uniform_signed(rng));
   }
   return LatentBatch<Scalar>(std::move(z));
}

template <typename Scalar>
CategoricalBatch<Scalar> sample_categories(Index n, Rng& rng)
{
   if (n <= 0)
   {
      throw ArgumentError("sample_categories: n must be positive");
   }
   std::uniform_int_distribution<int> pick(0, static_cast<int>(kNumCategories) - 1);
   std::vector<int> classes(static_cast<std::size_t>(n));
   for (int& c : classes)
   {
      c = pick(rng);
   }
   return CategoricalBatch<Scalar>::from_classes(classes);
}

#define INFOAE_INSTANTIATE_NETWORKS(Scalar)                                                                            \
   template class LatentBatch<Scalar>;                                                                                 \
   template class CategoricalBatch<Scalar>;                                                                            \
   template class ClassProbBatch<Scalar>;                                                                              \
   template class ScoreBatch<Scalar>;                                                                                  \
   template class Critic<Scalar>;                                                                                      \
   template struct ModelState<Scalar>;                                                                                 \
   template Sequential<Scalar> build_encoder<Scalar>(const ArchConfig&);                                               \
   template Sequential<Scalar> build_decoder<Scalar>(const ArchConfig&);                                               \
   template Sequential<Scalar> build_generator<Scalar>(const ArchConfig&);                                             \
   template Sequential<Scalar> build_classifier<Scalar>(const ArchConfig&);                                            \
   template Sequential<Scalar> build_discriminator<Scalar>(const ArchConfig&);                                         \
   template Critic<Scalar> build_critic<Scalar>(const ArchConfig&);                                                    \
   template ModelState<Scalar> init_networks<Scalar>(const ArchConfig&, std::uint64_t);                                \
   template LatentBatch<Scalar> encode(ModelState<Scalar>&, const ImageBatch<Scalar>&, Mode);                          \
   template LatentBatch<Scalar> encode(const ModelState<Scalar>&, const ImageBatch<Scalar>&);                          \
   template ImageBatch<Scalar> decode(ModelState<Scalar>&, const LatentBatch<Scalar>&, Mode);                          \
   template ImageBatch<Scalar> decode(const ModelState<Scalar>&, const LatentBatch<Scalar>&);                          \
   template LatentBatch<Scalar> generate_latent(const ModelState<Scalar>&, const LatentBatch<Scalar>&,                 \
                                                const CategoricalBatch<Scalar>&);                                      \
   template ClassProbBatch<Scalar> classify(const ModelState<Scalar>&, const LatentBatch<Scalar>&);                    \
   template ScoreBatch<Scalar> critic_score(ModelState<Scalar>&, const LatentBatch<Scalar>&,                           \
                                            const ImageBatch<Scalar>&, Mode);                                          \
   template ScoreBatch<Scalar> critic_score(const ModelState<Scalar>&, const LatentBatch<Scalar>&,                     \
                                            const ImageBatch<Scalar>&);                                                \
   template ScoreBatch<Scalar> discriminate(ModelState<Scalar>&, const ImageBatch<Scalar>&, Mode);                     \
   template ScoreBatch<Scalar> discriminate(const ModelState<Scalar>&, const ImageBatch<Scalar>&);                     \
   template LatentBatch<Scalar> sample_noise<Scalar>(Index, Rng&);                                                     \
   template CategoricalBatch<Scalar> sample_categories<Scalar>(Index, Rng&);

INFOAE_INSTANTIATE_NETWORKS(float)
INFOAE_INSTANTIATE_NETWORKS(double)

#undef INFOAE_INSTANTIATE_NETWORKS

} // namespace infoae
