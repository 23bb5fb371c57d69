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

#ifndef INFOAE_NETWORKS_HPP_
#define INFOAE_NETWORKS_HPP_

#include <infoae/data.hpp>
#include <infoae/layers.hpp>
#include <infoae/rng.hpp>
#include <infoae/tensor.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace infoae {

inline constexpr Index kLatentDim = 100;
inline constexpr Index kNumCategories = 10;

/// Widths and kernel sizes of the six networks.
///
/// Encoder E and discriminator D_i share a topology: three stride-2
/// convolutions (28 -> 14 -> 7 -> 4), batch norm on the middle two, then a
/// dense head. The decoder projects a latent to decoder_channels x 7 x 7 and
/// upsamples twice. G and C are one-hidden-layer perceptrons. The critic S
/// joins a two-stage convolutional image branch with a dense latent branch.
struct ArchConfig {
   Index conv1_channels = 32;
   Index conv2_channels = 64;
   Index conv3_channels = 128;
   Index conv1_kernel = 4;
   Index conv2_kernel = 4;
   Index conv3_kernel = 3;
   Index decoder_channels = 128;
   Index decoder_hidden_channels = 64;
   Index decoder_kernel = 4;
   Index mlp_hidden = 128;
   Index critic_features = 128;
   double leaky_slope = 0.2;
   double init_stddev = 0.02;
   /// Initialization standard deviation for the G and C perceptrons.
   double mlp_init_stddev = 0.1;
   double bn_momentum = 0.9;
   double bn_epsilon = 1e-5;

   /// Throws ArgumentError when the geometry cannot produce 28x28 images
   /// from 100-d latents over 10 categories.
   void validate() const;

   /// Every width divided by `factor` (kernels unchanged).
   static ArchConfig reduced(Index factor);

   friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

/// (batch, 100) latent codes: z ~ u(z), z_e = E(x), z_g = G(z, c), E(x_g).
template <typename Scalar>
class LatentBatch {
public:
   explicit LatentBatch(Tensor<Scalar> data);

   const Tensor<Scalar>& tensor() const noexcept { return data_; }
   Index batch_size() const noexcept { return data_.dim(0); }

private:
   Tensor<Scalar> data_;
};

/// (batch, 10) one-hot rows.
template <typename Scalar>
class CategoricalBatch {
public:
   explicit CategoricalBatch(Tensor<Scalar> data);

   static CategoricalBatch from_classes(const std::vector<int>& classes);

   const Tensor<Scalar>& tensor() const noexcept { return data_; }
   Index batch_size() const noexcept { return data_.dim(0); }
   int class_of(Index row) const;

private:
   Tensor<Scalar> data_;
};

/// Classifier output: logits and their row-wise softmax.
template <typename Scalar>
class ClassProbBatch {
public:
   explicit ClassProbBatch(Tensor<Scalar> logits);

   const Tensor<Scalar>& logits() const noexcept { return logits_; }
   const Tensor<Scalar>& probs() const noexcept { return probs_; }
   Index batch_size() const noexcept { return logits_.dim(0); }

   /// Most probable class of a row; ties go to the smaller index.
   int argmax(Index row) const;

private:
   Tensor<Scalar> logits_;
   Tensor<Scalar> probs_;
};

/// One discriminator or critic logit per sample; probabilities are only
/// materialized on request or inside the losses.
template <typename Scalar>
class ScoreBatch {
public:
   explicit ScoreBatch(Tensor<Scalar> logits);

   static ScoreBatch from_probs(const std::vector<double>& probs);

   const Tensor<Scalar>& logits() const noexcept { return logits_; }
   Index batch_size() const noexcept { return logits_.dim(0); }
   double prob(Index ii) const;

private:
   Tensor<Scalar> logits_;
};

template <typename Scalar>
struct CriticTrace {
   nn::Trace<Scalar> image;
   nn::Trace<Scalar> latent;
   nn::Trace<Scalar> head;
};

/// Self critic S(z, x): scores a (latent, image) pair. The joint head has no
/// batch norm, so in eval mode every pair is scored independently.
template <typename Scalar>
class Critic {
public:
   Critic() = default;
   Critic(nn::Sequential<Scalar> image_branch, nn::Sequential<Scalar> latent_branch, nn::Sequential<Scalar> head);

   /// Returns (batch, 1) logits.
   Tensor<Scalar> forward(const Tensor<Scalar>& z, const Tensor<Scalar>& x, nn::Mode mode, CriticTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& z, const Tensor<Scalar>& x) const;

   /// Gradients with respect to (z, x); either is empty when not requested.
   std::pair<Tensor<Scalar>, Tensor<Scalar>> backward(const CriticTrace<Scalar>& trace, const Tensor<Scalar>& grad_logits,
                                                      bool accumulate_params, bool latent_grad, bool image_grad);

   std::vector<nn::Parameter<Scalar>*> parameters();
   std::vector<const nn::Parameter<Scalar>*> parameters() const;
   std::vector<nn::Buffer<Scalar>*> buffers();
   std::vector<const nn::Buffer<Scalar>*> buffers() const;
   void zero_grad();
   void initialize(Rng& rng, double stddev);

   const nn::Sequential<Scalar>& image_branch() const noexcept { return image_; }
   const nn::Sequential<Scalar>& latent_branch() const noexcept { return latent_; }
   const nn::Sequential<Scalar>& head() const noexcept { return head_; }

private:
   nn::Sequential<Scalar> image_;
   nn::Sequential<Scalar> latent_;
   nn::Sequential<Scalar> head_;
};

template <typename Scalar>
nn::Sequential<Scalar> build_encoder(const ArchConfig& arch);
template <typename Scalar>
nn::Sequential<Scalar> build_decoder(const ArchConfig& arch);
template <typename Scalar>
nn::Sequential<Scalar> build_generator(const ArchConfig& arch);
template <typename Scalar>
nn::Sequential<Scalar> build_classifier(const ArchConfig& arch);
template <typename Scalar>
nn::Sequential<Scalar> build_discriminator(const ArchConfig& arch);
template <typename Scalar>
Critic<Scalar> build_critic(const ArchConfig& arch);

/// First and second moment estimates, one pair per parameter of a group.
template <typename Scalar>
struct MomentSlots {
   std::vector<Tensor<Scalar>> first;
   std::vector<Tensor<Scalar>> second;
};

/// Everything that evolves during training: the six networks, the two
/// optimizer groups, the step counter and the sampling engine.
template <typename Scalar>
struct ModelState {
   ArchConfig arch;
   nn::Sequential<Scalar> encoder;
   nn::Sequential<Scalar> decoder;
   nn::Sequential<Scalar> generator;
   nn::Sequential<Scalar> classifier;
   nn::Sequential<Scalar> discriminator;
   Critic<Scalar> critic;
   MomentSlots<Scalar> opt_min; ///< E, D, G, C
   MomentSlots<Scalar> opt_max; ///< S, D_i
   std::int64_t step = 0;
   Rng rng;

   /// Parameters minimizing the total loss, in the order E, D, G, C.
   std::vector<nn::Parameter<Scalar>*> min_parameters();
   std::vector<const nn::Parameter<Scalar>*> min_parameters() const;
   /// Parameters maximizing their adversarial losses, in the order S, D_i.
   std::vector<nn::Parameter<Scalar>*> max_parameters();
   std::vector<const nn::Parameter<Scalar>*> max_parameters() const;
   std::vector<nn::Buffer<Scalar>*> buffers();
   std::vector<const nn::Buffer<Scalar>*> buffers() const;
   void zero_grad();
};

/// Fresh state: N(0, init_stddev) weights, N(0, mlp_init_stddev) in G and
/// C, zero biases, unit batch-norm scale.
template <typename Scalar>
ModelState<Scalar> init_networks(const ArchConfig& arch, std::uint64_t seed);

template <typename Scalar>
LatentBatch<Scalar> encode(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, nn::Mode mode);
template <typename Scalar>
LatentBatch<Scalar> encode(const ModelState<Scalar>& state, const ImageBatch<Scalar>& x);

template <typename Scalar>
ImageBatch<Scalar> decode(ModelState<Scalar>& state, const LatentBatch<Scalar>& z, nn::Mode mode);
template <typename Scalar>
ImageBatch<Scalar> decode(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z);

/// z_g = G(z || c).
template <typename Scalar>
LatentBatch<Scalar> generate_latent(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z,
                                    const CategoricalBatch<Scalar>& c);

template <typename Scalar>
ClassProbBatch<Scalar> classify(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z);

template <typename Scalar>
ScoreBatch<Scalar> critic_score(ModelState<Scalar>& state, const LatentBatch<Scalar>& z, const ImageBatch<Scalar>& x,
                                nn::Mode mode);
template <typename Scalar>
ScoreBatch<Scalar> critic_score(const ModelState<Scalar>& state, const LatentBatch<Scalar>& z,
                                const ImageBatch<Scalar>& x);

template <typename Scalar>
ScoreBatch<Scalar> discriminate(ModelState<Scalar>& state, const ImageBatch<Scalar>& x, nn::Mode mode);
template <typename Scalar>
ScoreBatch<Scalar> discriminate(const ModelState<Scalar>& state, const ImageBatch<Scalar>& x);

/// z ~ U(-1, 1)^100.
template <typename Scalar>
LatentBatch<Scalar> sample_noise(Index n, Rng& rng);

/// c ~ Cat(K = 10, p = 0.1), one-hot.
template <typename Scalar>
CategoricalBatch<Scalar> sample_categories(Index n, Rng& rng);

} // namespace infoae

#endif // INFOAE_NETWORKS_HPP_
