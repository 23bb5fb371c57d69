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

#ifndef INFOAE_LAYERS_HPP_
#define INFOAE_LAYERS_HPP_

#include <infoae/rng.hpp>
#include <infoae/tensor.hpp>

#include <string>
#include <variant>
#include <vector>

namespace infoae::nn {

/// Train mode normalizes with batch statistics and updates running averages;
/// eval mode uses the running averages and leaves every layer untouched.
enum class Mode { kTrain, kEval };

template <typename Scalar>
struct Parameter {
   std::string name;
   Tensor<Scalar> value;
   Tensor<Scalar> grad;
};

/// Non-trainable state (batch-norm running statistics).
template <typename Scalar>
struct Buffer {
   std::string name;
   Tensor<Scalar> value;
};

/// Selects what a backward pass produces.
struct Backprop {
   bool accumulate_params = true; ///< add into Parameter::grad
   bool input_grad = true;        ///< return d(loss)/d(input); an empty tensor otherwise
};

/// Activations a layer keeps from its forward call for the matching backward call.
/// One forward call, one trace: a network applied twice in a step owns two traces.
template <typename Scalar>
struct LayerTrace {
   std::vector<Tensor<Scalar>> saved;
   Shape input_shape;
   Mode mode = Mode::kTrain;
};

/// y = x W^T + b on (batch, in) inputs.
template <typename Scalar>
class Dense {
public:
   Dense(const std::string& name, Index in_features, Index out_features);

   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {&weight_, &bias_}; }
   std::vector<Buffer<Scalar>*> buffers() { return {}; }
   void initialize(Rng& rng, double stddev);

   Index in_features() const noexcept { return weight_.value.dim(1); }
   Index out_features() const noexcept { return weight_.value.dim(0); }

private:
   Parameter<Scalar> weight_; // (out, in)
   Parameter<Scalar> bias_;   // (out)
};

/// Square-kernel strided convolution on NCHW inputs.
template <typename Scalar>
class Conv2d {
public:
   Conv2d(const std::string& name, Index in_channels, Index out_channels, Index kernel, Index stride, Index padding);

   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {&weight_, &bias_}; }
   std::vector<Buffer<Scalar>*> buffers() { return {}; }
   void initialize(Rng& rng, double stddev);

   Index output_extent(Index input_extent) const noexcept { return (input_extent + 2 * padding_ - kernel_) / stride_ + 1; }

private:
   Tensor<Scalar> apply(const Tensor<Scalar>& in, LayerTrace<Scalar>* trace) const;

   Parameter<Scalar> weight_; // (out, in, k, k)
   Parameter<Scalar> bias_;   // (out)
   Index kernel_;
   Index stride_;
   Index padding_;
};

/// Learnable upsampling: the adjoint of Conv2d with the same geometry.
template <typename Scalar>
class ConvTranspose2d {
public:
   ConvTranspose2d(const std::string& name, Index in_channels, Index out_channels, Index kernel, Index stride,
                   Index padding);

   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {&weight_, &bias_}; }
   std::vector<Buffer<Scalar>*> buffers() { return {}; }
   void initialize(Rng& rng, double stddev);

   Index output_extent(Index input_extent) const noexcept { return (input_extent - 1) * stride_ - 2 * padding_ + kernel_; }

private:
   Tensor<Scalar> apply(const Tensor<Scalar>& in, LayerTrace<Scalar>* trace) const;

   Parameter<Scalar> weight_; // (in, out, k, k)
   Parameter<Scalar> bias_;   // (out)
   Index kernel_;
   Index stride_;
   Index padding_;
};

/// Per-feature normalization of (batch, features) or per-channel of (batch, C, H, W).
/// running <- momentum * running + (1 - momentum) * batch_statistic.
template <typename Scalar>
class BatchNorm {
public:
   BatchNorm(const std::string& name, Index features, double momentum = 0.9, double epsilon = 1e-5);

   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {&scale_, &shift_}; }
   std::vector<Buffer<Scalar>*> buffers() { return {&running_mean_, &running_var_}; }
   void initialize(Rng& rng, double stddev);

private:
   Tensor<Scalar> normalize_with(const Tensor<Scalar>& in, const std::vector<double>& mean,
                                 const std::vector<double>& inv_std, LayerTrace<Scalar>* trace) const;

   Parameter<Scalar> scale_;
   Parameter<Scalar> shift_;
   Buffer<Scalar> running_mean_;
   Buffer<Scalar> running_var_;
   double momentum_;
   double epsilon_;
};

template <typename Scalar>
class LeakyRelu {
public:
   explicit LeakyRelu(double slope = 0.2) : slope_(static_cast<Scalar>(slope)) {}

   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {}; }
   std::vector<Buffer<Scalar>*> buffers() { return {}; }
   void initialize(Rng&, double) {}

private:
   Scalar slope_;
};

template <typename Scalar>
class Tanh {
public:
   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {}; }
   std::vector<Buffer<Scalar>*> buffers() { return {}; }
   void initialize(Rng&, double) {}
};

/// Reshapes every sample to `sample_shape`, keeping the batch axis.
template <typename Scalar>
class Reshape {
public:
   explicit Reshape(Shape sample_shape) : sample_shape_(std::move(sample_shape)) {}

   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace);
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;
   Tensor<Scalar> backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters() { return {}; }
   std::vector<Buffer<Scalar>*> buffers() { return {}; }
   void initialize(Rng&, double) {}

private:
   Shape sample_shape_;
};

template <typename Scalar>
using Layer = std::variant<Dense<Scalar>, Conv2d<Scalar>, ConvTranspose2d<Scalar>, BatchNorm<Scalar>, LeakyRelu<Scalar>,
                           Tanh<Scalar>, Reshape<Scalar>>;

template <typename Scalar>
struct Trace {
   std::vector<LayerTrace<Scalar>> layers;
};

/// A chain of layers. Copyable; copies share nothing.
template <typename Scalar>
class Sequential {
public:
   Sequential() = default;
   explicit Sequential(std::string name) : name_(std::move(name)) {}

   template <typename LayerType>
   Sequential& add(LayerType layer)
   {
      layers_.emplace_back(std::move(layer));
      return *this;
   }

   /// When `trace` is non-null it receives what backward() needs.
   Tensor<Scalar> forward(const Tensor<Scalar>& in, Mode mode, Trace<Scalar>* trace);

   /// Eval-mode forward that leaves the network untouched.
   Tensor<Scalar> infer(const Tensor<Scalar>& in) const;

   Tensor<Scalar> backward(const Trace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp);

   std::vector<Parameter<Scalar>*> parameters();
   std::vector<const Parameter<Scalar>*> parameters() const;
   std::vector<Buffer<Scalar>*> buffers();
   std::vector<const Buffer<Scalar>*> buffers() const;

   void zero_grad();
   void initialize(Rng& rng, double stddev);

   const std::string& name() const noexcept { return name_; }
   std::size_t size() const noexcept { return layers_.size(); }
   const std::vector<Layer<Scalar>>& layers() const noexcept { return layers_; }

   template <typename LayerType>
   std::size_t count() const
   {
      std::size_t total = 0;
      for (const auto& layer : layers_)
      {
         total += std::holds_alternative<LayerType>(layer) ? 1 : 0;
      }
      return total;
   }

private:
   std::string name_;
   std::vector<Layer<Scalar>> layers_;
};

} // namespace infoae::nn

#endif // INFOAE_LAYERS_HPP_
