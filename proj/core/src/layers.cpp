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

#include <infoae/layers.hpp>

#include <Eigen/Core>

#include <cmath>
#include <random>

namespace infoae::nn {

namespace {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
template <typename Scalar>
using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

template <typename Scalar>
MatrixMap<Scalar> as_matrix(Tensor<Scalar>& t, Index rows, Index cols)
{
   return MatrixMap<Scalar>(t.data(), rows, cols);
}

template <typename Scalar>
ConstMatrixMap<Scalar> as_matrix(const Tensor<Scalar>& t, Index rows, Index cols)
{
   return ConstMatrixMap<Scalar>(t.data(), rows, cols);
}

template <typename Scalar>
void fill_normal(Tensor<Scalar>& t, Rng& rng, double stddev)
{
   std::normal_distribution<double> dist(0.0, stddev);
   for (Scalar& v : t.values())
   {
      v = static_cast<Scalar>(dist(rng));
   }
}

void require_rank(const Shape& shape, int rank, const char* layer)
{
   if (static_cast<int>(shape.size()) != rank)
   {
      throw ArgumentError(std::string(layer) + " expects a rank-" + std::to_string(rank) + " input, got " +
                          shape_string(shape));
   }
}

// Unfolds (N, C, H, W) patches into a (C*k*k, N*Ho*Wo) matrix. Rows are
// ordered (c, ki, kj), columns (n, oh, ow).
template <typename Scalar>
void im2col(const Scalar* image, Index batch, Index channels, Index height, Index width, Index kernel, Index stride,
            Index padding, Index out_h, Index out_w, Scalar* cols)
{
   const Index columns = batch * out_h * out_w;
   for (Index c = 0; c < channels; ++c)
   {
      for (Index ki = 0; ki < kernel; ++ki)
      {
         for (Index kj = 0; kj < kernel; ++kj)
         {
            Scalar* row = cols + ((c * kernel + ki) * kernel + kj) * columns;
            for (Index n = 0; n < batch; ++n)
            {
               const Scalar* plane = image + (n * channels + c) * height * width;
               for (Index oh = 0; oh < out_h; ++oh)
               {
                  Scalar* dst = row + (n * out_h + oh) * out_w;
                  const Index ih = oh * stride - padding + ki;
                  if (ih < 0 || ih >= height)
                  {
                     std::fill_n(dst, out_w, Scalar(0));
                     continue;
                  }
                  const Scalar* src = plane + ih * width;
                  for (Index ow = 0; ow < out_w; ++ow)
                  {
                     const Index iw = ow * stride - padding + kj;
                     dst[ow] = (iw >= 0 && iw < width) ? src[iw] : Scalar(0);
                  }
               }
            }
         }
      }
   }
}

// Adjoint of im2col: scatters-adds columns back into a zeroed image.
template <typename Scalar>
void col2im(const Scalar* cols, Index batch, Index channels, Index height, Index width, Index kernel, Index stride,
            Index padding, Index out_h, Index out_w, Scalar* image)
{
   const Index columns = batch * out_h * out_w;
   std::fill_n(image, batch * channels * height * width, Scalar(0));
   for (Index c = 0; c < channels; ++c)
   {
      for (Index ki = 0; ki < kernel; ++ki)
      {
         for (Index kj = 0; kj < kernel; ++kj)
         {
            const Scalar* row = cols + ((c * kernel + ki) * kernel + kj) * columns;
            for (Index n = 0; n < batch; ++n)
            {
               Scalar* plane = image + (n * channels + c) * height * width;
               for (Index oh = 0; oh < out_h; ++oh)
               {
                  const Index ih = oh * stride - padding + ki;
                  if (ih < 0 || ih >= height)
                  {
                     continue;
                  }
                  const Scalar* src = row + (n * out_h + oh) * out_w;
                  Scalar* dst = plane + ih * width;
                  for (Index ow = 0; ow < out_w; ++ow)
                  {
                     const Index iw = ow * stride - padding + kj;
                     if (iw >= 0 && iw < width)
                     {
                        dst[iw] += src[ow];
                     }
                  }
               }
            }
         }
      }
   }
}

// (N, C, P) <-> (C, N*P) layout changes around the batched GEMMs.
template <typename Scalar>
void batch_to_channel_major(const Scalar* in, Index batch, Index channels, Index plane, Scalar* out)
{
   for (Index n = 0; n < batch; ++n)
   {
      for (Index c = 0; c < channels; ++c)
      {
         std::copy_n(in + (n * channels + c) * plane, plane, out + (c * batch + n) * plane);
      }
   }
}

template <typename Scalar>
void channel_to_batch_major(const Scalar* in, Index batch, Index channels, Index plane, Scalar* out)
{
   for (Index n = 0; n < batch; ++n)
   {
      for (Index c = 0; c < channels; ++c)
      {
         std::copy_n(in + (c * batch + n) * plane, plane, out + (n * channels + c) * plane);
      }
   }
}

} // namespace

// ---------------------------------------------------------------------------
// Dense

template <typename Scalar>
Dense<Scalar>::Dense(const std::string& name, Index in_features, Index out_features)
   : weight_{name + ".weight", Tensor<Scalar>({out_features, in_features}), Tensor<Scalar>({out_features, in_features})},
     bias_{name + ".bias", Tensor<Scalar>({out_features}), Tensor<Scalar>({out_features})}
{
   if (in_features <= 0 || out_features <= 0)
   {
      throw ArgumentError("dense layer " + name + " needs positive widths");
   }
}

template <typename Scalar>
void Dense<Scalar>::initialize(Rng& rng, double stddev)
{
   fill_normal(weight_.value, rng, stddev);
   bias_.value.fill(Scalar(0));
}

template <typename Scalar>
Tensor<Scalar> Dense<Scalar>::infer(const Tensor<Scalar>& in) const
{
   require_rank(in.shape(), 2, "dense");
   const Index batch = in.dim(0);
   if (in.dim(1) != in_features())
   {
      throw ArgumentError(weight_.name + ": expected " + std::to_string(in_features()) + " features, got " +
                          std::to_string(in.dim(1)));
   }
   Tensor<Scalar> out({batch, out_features()});
   auto y = as_matrix(out, batch, out_features());
   y.noalias() = as_matrix(in, batch, in_features()) * as_matrix(weight_.value, out_features(), in_features()).transpose();
   y.rowwise() += Eigen::Map<const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>>(bias_.value.data(), out_features());
   return out;
}

template <typename Scalar>
Tensor<Scalar> Dense<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   Tensor<Scalar> out = infer(in);
   if (trace)
   {
      trace->mode = mode;
      trace->input_shape = in.shape();
      trace->saved = {in};
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> Dense<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   const Tensor<Scalar>& in = trace.saved.at(0);
   const Index batch = in.dim(0);
   auto dy = as_matrix(grad_out, batch, out_features());
   if (bp.accumulate_params)
   {
      as_matrix(weight_.grad, out_features(), in_features()).noalias() += dy.transpose() * as_matrix(in, batch, in_features());
      Eigen::Map<Eigen::Matrix<Scalar, 1, Eigen::Dynamic>>(bias_.grad.data(), out_features()) += dy.colwise().sum();
   }
   if (!bp.input_grad)
   {
      return {};
   }
   Tensor<Scalar> grad_in(in.shape());
   as_matrix(grad_in, batch, in_features()).noalias() = dy * as_matrix(weight_.value, out_features(), in_features());
   return grad_in;
}

// ---------------------------------------------------------------------------
// Conv2d

template <typename Scalar>
Conv2d<Scalar>::Conv2d(const std::string& name, Index in_channels, Index out_channels, Index kernel, Index stride,
                       Index padding)
   : weight_{name + ".weight", Tensor<Scalar>({out_channels, in_channels, kernel, kernel}),
             Tensor<Scalar>({out_channels, in_channels, kernel, kernel})},
     bias_{name + ".bias", Tensor<Scalar>({out_channels}), Tensor<Scalar>({out_channels})},
     kernel_(kernel),
     stride_(stride),
     padding_(padding)
{
   if (in_channels <= 0 || out_channels <= 0 || kernel <= 0 || stride <= 0 || padding < 0)
   {
      throw ArgumentError("invalid geometry for convolution " + name);
   }
}

template <typename Scalar>
void Conv2d<Scalar>::initialize(Rng& rng, double stddev)
{
   fill_normal(weight_.value, rng, stddev);
   bias_.value.fill(Scalar(0));
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::apply(const Tensor<Scalar>& in, LayerTrace<Scalar>* trace) const
{
   require_rank(in.shape(), 4, "conv2d");
   const Index batch = in.dim(0);
   const Index channels = in.dim(1);
   const Index height = in.dim(2);
   const Index width = in.dim(3);
   const Index out_channels = weight_.value.dim(0);
   if (channels != weight_.value.dim(1))
   {
      throw ArgumentError(weight_.name + ": expected " + std::to_string(weight_.value.dim(1)) + " channels, got " +
                          std::to_string(channels));
   }
   const Index out_h = output_extent(height);
   const Index out_w = output_extent(width);
   const Index patch = channels * kernel_ * kernel_;
   const Index columns = batch * out_h * out_w;

   Tensor<Scalar> cols({patch, columns});
   im2col(in.data(), batch, channels, height, width, kernel_, stride_, padding_, out_h, out_w, cols.data());

   Tensor<Scalar> product({out_channels, columns});
   as_matrix(product, out_channels, columns).noalias() =
      as_matrix(weight_.value, out_channels, patch) * as_matrix(cols, patch, columns);
   const Index plane = out_h * out_w;
   for (Index oc = 0; oc < out_channels; ++oc)
   {
      Scalar* row = product.data() + oc * columns;
      const Scalar b = bias_.value[oc];
      for (Index ii = 0; ii < columns; ++ii)
      {
         row[ii] += b;
      }
   }
   Tensor<Scalar> out({batch, out_channels, out_h, out_w});
   channel_to_batch_major(product.data(), batch, out_channels, plane, out.data());
   if (trace)
   {
      trace->input_shape = in.shape();
      trace->saved.clear();
      trace->saved.push_back(std::move(cols));
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::infer(const Tensor<Scalar>& in) const
{
   return apply(in, nullptr);
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   if (trace)
   {
      trace->mode = mode;
   }
   return apply(in, trace);
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   const Shape& in_shape = trace.input_shape;
   const Index batch = in_shape[0];
   const Index channels = in_shape[1];
   const Index height = in_shape[2];
   const Index width = in_shape[3];
   const Index out_channels = weight_.value.dim(0);
   const Index out_h = grad_out.dim(2);
   const Index out_w = grad_out.dim(3);
   const Index plane = out_h * out_w;
   const Index patch = channels * kernel_ * kernel_;
   const Index columns = batch * plane;

   Tensor<Scalar> dy({out_channels, columns});
   batch_to_channel_major(grad_out.data(), batch, out_channels, plane, dy.data());
   const auto dy_mat = as_matrix(std::as_const(dy), out_channels, columns);

   if (bp.accumulate_params)
   {
      const Tensor<Scalar>& cols = trace.saved.at(0);
      as_matrix(weight_.grad, out_channels, patch).noalias() += dy_mat * as_matrix(cols, patch, columns).transpose();
      Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(bias_.grad.data(), out_channels) += dy_mat.rowwise().sum();
   }
   if (!bp.input_grad)
   {
      return {};
   }
   Tensor<Scalar> dcols({patch, columns});
   as_matrix(dcols, patch, columns).noalias() = as_matrix(weight_.value, out_channels, patch).transpose() * dy_mat;
   Tensor<Scalar> grad_in(in_shape);
   col2im(dcols.data(), batch, channels, height, width, kernel_, stride_, padding_, out_h, out_w, grad_in.data());
   return grad_in;
}

// ---------------------------------------------------------------------------
// ConvTranspose2d

template <typename Scalar>
ConvTranspose2d<Scalar>::ConvTranspose2d(const std::string& name, Index in_channels, Index out_channels, Index kernel,
                                         Index stride, Index padding)
   : weight_{name + ".weight", Tensor<Scalar>({in_channels, out_channels, kernel, kernel}),
             Tensor<Scalar>({in_channels, out_channels, kernel, kernel})},
     bias_{name + ".bias", Tensor<Scalar>({out_channels}), Tensor<Scalar>({out_channels})},
     kernel_(kernel),
     stride_(stride),
     padding_(padding)
{
   if (in_channels <= 0 || out_channels <= 0 || kernel <= 0 || stride <= 0 || padding < 0)
   {
      throw ArgumentError("invalid geometry for transpose convolution " + name);
   }
}

template <typename Scalar>
void ConvTranspose2d<Scalar>::initialize(Rng& rng, double stddev)
{
   fill_normal(weight_.value, rng, stddev);
   bias_.value.fill(Scalar(0));
}

template <typename Scalar>
Tensor<Scalar> ConvTranspose2d<Scalar>::apply(const Tensor<Scalar>& in, LayerTrace<Scalar>* trace) const
{
   require_rank(in.shape(), 4, "conv_transpose2d");
   const Index batch = in.dim(0);
   const Index in_channels = in.dim(1);
   const Index in_h = in.dim(2);
   const Index in_w = in.dim(3);
   const Index out_channels = weight_.value.dim(1);
   if (in_channels != weight_.value.dim(0))
   {
      throw ArgumentError(weight_.name + ": expected " + std::to_string(weight_.value.dim(0)) + " channels, got " +
                          std::to_string(in_channels));
   }
   const Index out_h = output_extent(in_h);
   const Index out_w = output_extent(in_w);
   const Index patch = out_channels * kernel_ * kernel_;
   const Index columns = batch * in_h * in_w;

   Tensor<Scalar> x({in_channels, columns});
   batch_to_channel_major(in.data(), batch, in_channels, in_h * in_w, x.data());
   Tensor<Scalar> cols({patch, columns});
   as_matrix(cols, patch, columns).noalias() =
      as_matrix(weight_.value, in_channels, patch).transpose() * as_matrix(std::as_const(x), in_channels, columns);

   Tensor<Scalar> out({batch, out_channels, out_h, out_w});
   col2im(cols.data(), batch, out_channels, out_h, out_w, kernel_, stride_, padding_, in_h, in_w, out.data());
   const Index plane = out_h * out_w;
   for (Index n = 0; n < batch; ++n)
   {
      for (Index oc = 0; oc < out_channels; ++oc)
      {
         Scalar* dst = out.data() + (n * out_channels + oc) * plane;
         const Scalar b = bias_.value[oc];
         for (Index ii = 0; ii < plane; ++ii)
         {
            dst[ii] += b;
         }
      }
   }
   if (trace)
   {
      trace->input_shape = in.shape();
      trace->saved.clear();
      trace->saved.push_back(std::move(x));
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> ConvTranspose2d<Scalar>::infer(const Tensor<Scalar>& in) const
{
   return apply(in, nullptr);
}

template <typename Scalar>
Tensor<Scalar> ConvTranspose2d<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   if (trace)
   {
      trace->mode = mode;
   }
   return apply(in, trace);
}

template <typename Scalar>
Tensor<Scalar> ConvTranspose2d<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out,
                                                 Backprop bp)
{
   const Shape& in_shape = trace.input_shape;
   const Index batch = in_shape[0];
   const Index in_channels = in_shape[1];
   const Index in_h = in_shape[2];
   const Index in_w = in_shape[3];
   const Index out_channels = weight_.value.dim(1);
   const Index out_h = grad_out.dim(2);
   const Index out_w = grad_out.dim(3);
   const Index patch = out_channels * kernel_ * kernel_;
   const Index columns = batch * in_h * in_w;

   Tensor<Scalar> dcols({patch, columns});
   im2col(grad_out.data(), batch, out_channels, out_h, out_w, kernel_, stride_, padding_, in_h, in_w, dcols.data());
   const auto dcols_mat = as_matrix(std::as_const(dcols), patch, columns);

   if (bp.accumulate_params)
   {
      const Tensor<Scalar>& x = trace.saved.at(0);
      as_matrix(weight_.grad, in_channels, patch).noalias() += as_matrix(x, in_channels, columns) * dcols_mat.transpose();
      const Index plane = out_h * out_w;
      for (Index n = 0; n < batch; ++n)
      {
         for (Index oc = 0; oc < out_channels; ++oc)
         {
            const Scalar* src = grad_out.data() + (n * out_channels + oc) * plane;
            Scalar sum = 0;
            for (Index ii = 0; ii < plane; ++ii)
            {
               sum += src[ii];
            }
            bias_.grad[oc] += sum;
         }
      }
   }
   if (!bp.input_grad)
   {
      return {};
   }
   Tensor<Scalar> dx({in_channels, columns});
   as_matrix(dx, in_channels, columns).noalias() = as_matrix(weight_.value, in_channels, patch) * dcols_mat;
   Tensor<Scalar> grad_in(in_shape);
   channel_to_batch_major(dx.data(), batch, in_channels, in_h * in_w, grad_in.data());
   return grad_in;
}

// ---------------------------------------------------------------------------
// BatchNorm

template <typename Scalar>
BatchNorm<Scalar>::BatchNorm(const std::string& name, Index features, double momentum, double epsilon)
   : scale_{name + ".scale", Tensor<Scalar>({features}, Scalar(1)), Tensor<Scalar>({features})},
     shift_{name + ".shift", Tensor<Scalar>({features}), Tensor<Scalar>({features})},
     running_mean_{name + ".running_mean", Tensor<Scalar>({features})},
     running_var_{name + ".running_var", Tensor<Scalar>({features}, Scalar(1))},
     momentum_(momentum),
     epsilon_(epsilon)
{
}

template <typename Scalar>
void BatchNorm<Scalar>::initialize(Rng&, double)
{
   scale_.value.fill(Scalar(1));
   shift_.value.fill(Scalar(0));
   running_mean_.value.fill(Scalar(0));
   running_var_.value.fill(Scalar(1));
}

namespace {

struct NormLayout {
   Index batch;
   Index features;
   Index plane;
};

NormLayout norm_layout(const Shape& shape, Index features)
{
   if (shape.size() != 2 && shape.size() != 4)
   {
      throw ArgumentError("batch norm expects rank 2 or 4, got " + shape_string(shape));
   }
   if (shape[1] != features)
   {
      throw ArgumentError("batch norm expects " + std::to_string(features) + " features, got " + shape_string(shape));
   }
   return {shape[0], shape[1], shape.size() == 4 ? shape[2] * shape[3] : 1};
}

} // namespace

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::normalize_with(const Tensor<Scalar>& in, const std::vector<double>& mean,
                                                 const std::vector<double>& inv_std, LayerTrace<Scalar>* trace) const
{
   const NormLayout layout = norm_layout(in.shape(), scale_.value.size());
   Tensor<Scalar> out(in.shape());
   Tensor<Scalar> normalized;
   if (trace)
   {
      normalized = Tensor<Scalar>(in.shape());
   }
   for (Index n = 0; n < layout.batch; ++n)
   {
      for (Index f = 0; f < layout.features; ++f)
      {
         const Index offset = (n * layout.features + f) * layout.plane;
         const Scalar m = static_cast<Scalar>(mean[static_cast<std::size_t>(f)]);
         const Scalar s = static_cast<Scalar>(inv_std[static_cast<std::size_t>(f)]);
         const Scalar g = scale_.value[f];
         const Scalar b = shift_.value[f];
         const Scalar* src = in.data() + offset;
         Scalar* dst = out.data() + offset;
         if (trace)
         {
            Scalar* xhat = normalized.data() + offset;
            for (Index ii = 0; ii < layout.plane; ++ii)
            {
               xhat[ii] = (src[ii] - m) * s;
               dst[ii] = g * xhat[ii] + b;
            }
         }
         else
         {
            for (Index ii = 0; ii < layout.plane; ++ii)
            {
               dst[ii] = g * ((src[ii] - m) * s) + b;
            }
         }
      }
   }
   if (trace)
   {
      Tensor<Scalar> inv({layout.features});
      for (Index f = 0; f < layout.features; ++f)
      {
         inv[f] = static_cast<Scalar>(inv_std[static_cast<std::size_t>(f)]);
      }
      trace->input_shape = in.shape();
      trace->saved.clear();
      trace->saved.push_back(std::move(normalized));
      trace->saved.push_back(std::move(inv));
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::infer(const Tensor<Scalar>& in) const
{
   const Index features = scale_.value.size();
   std::vector<double> mean(static_cast<std::size_t>(features));
   std::vector<double> inv_std(static_cast<std::size_t>(features));
   for (Index f = 0; f < features; ++f)
   {
      mean[static_cast<std::size_t>(f)] = running_mean_.value[f];
      inv_std[static_cast<std::size_t>(f)] = 1.0 / std::sqrt(static_cast<double>(running_var_.value[f]) + epsilon_);
   }
   return normalize_with(in, mean, inv_std, nullptr);
}

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   const NormLayout layout = norm_layout(in.shape(), scale_.value.size());
   const auto features = static_cast<std::size_t>(layout.features);
   std::vector<double> mean(features, 0.0);
   std::vector<double> var(features, 0.0);
   std::vector<double> inv_std(features);

   if (mode == Mode::kEval)
   {
      for (std::size_t f = 0; f < features; ++f)
      {
         mean[f] = running_mean_.value[static_cast<Index>(f)];
         inv_std[f] = 1.0 / std::sqrt(static_cast<double>(running_var_.value[static_cast<Index>(f)]) + epsilon_);
      }
   }
   else
   {
      const double count = static_cast<double>(layout.batch * layout.plane);
      for (Index n = 0; n < layout.batch; ++n)
      {
         for (Index f = 0; f < layout.features; ++f)
         {
            const Scalar* src = in.data() + (n * layout.features + f) * layout.plane;
            double sum = 0.0;
            for (Index ii = 0; ii < layout.plane; ++ii)
            {
               sum += src[ii];
            }
            mean[static_cast<std::size_t>(f)] += sum;
         }
      }
      for (double& m : mean)
      {
         m /= count;
      }
      for (Index n = 0; n < layout.batch; ++n)
      {
         for (Index f = 0; f < layout.features; ++f)
         {
            const Scalar* src = in.data() + (n * layout.features + f) * layout.plane;
            const double m = mean[static_cast<std::size_t>(f)];
            double sum = 0.0;
            for (Index ii = 0; ii < layout.plane; ++ii)
            {
               const double d = src[ii] - m;
               sum += d * d;
            }
            var[static_cast<std::size_t>(f)] += sum;
         }
      }
      const double unbias = count > 1.0 ? count / (count - 1.0) : 1.0;
      for (std::size_t f = 0; f < features; ++f)
      {
         var[f] /= count;
         inv_std[f] = 1.0 / std::sqrt(var[f] + epsilon_);
         const auto idx = static_cast<Index>(f);
         running_mean_.value[idx] =
            static_cast<Scalar>(momentum_ * running_mean_.value[idx] + (1.0 - momentum_) * mean[f]);
         running_var_.value[idx] =
            static_cast<Scalar>(momentum_ * running_var_.value[idx] + (1.0 - momentum_) * var[f] * unbias);
      }
   }
   Tensor<Scalar> out = normalize_with(in, mean, inv_std, trace);
   if (trace)
   {
      trace->mode = mode;
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> BatchNorm<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   const NormLayout layout = norm_layout(trace.input_shape, scale_.value.size());
   const Tensor<Scalar>& normalized = trace.saved.at(0);
   const Tensor<Scalar>& inv_std = trace.saved.at(1);
   const auto features = static_cast<std::size_t>(layout.features);

   std::vector<double> sum_dy(features, 0.0);
   std::vector<double> sum_dy_xhat(features, 0.0);
   for (Index n = 0; n < layout.batch; ++n)
   {
      for (Index f = 0; f < layout.features; ++f)
      {
         const Index offset = (n * layout.features + f) * layout.plane;
         double a = 0.0;
         double b = 0.0;
         for (Index ii = 0; ii < layout.plane; ++ii)
         {
            a += grad_out[offset + ii];
            b += static_cast<double>(grad_out[offset + ii]) * normalized[offset + ii];
         }
         sum_dy[static_cast<std::size_t>(f)] += a;
         sum_dy_xhat[static_cast<std::size_t>(f)] += b;
      }
   }
   if (bp.accumulate_params)
   {
      for (std::size_t f = 0; f < features; ++f)
      {
         scale_.grad[static_cast<Index>(f)] += static_cast<Scalar>(sum_dy_xhat[f]);
         shift_.grad[static_cast<Index>(f)] += static_cast<Scalar>(sum_dy[f]);
      }
   }
   if (!bp.input_grad)
   {
      return {};
   }
   Tensor<Scalar> grad_in(trace.input_shape);
   const double count = static_cast<double>(layout.batch * layout.plane);
   for (Index n = 0; n < layout.batch; ++n)
   {
      for (Index f = 0; f < layout.features; ++f)
      {
         const Index offset = (n * layout.features + f) * layout.plane;
         const auto fi = static_cast<std::size_t>(f);
         const double g = static_cast<double>(scale_.value[f]) * inv_std[f];
         if (trace.mode == Mode::kEval)
         {
            for (Index ii = 0; ii < layout.plane; ++ii)
            {
               grad_in[offset + ii] = static_cast<Scalar>(g * grad_out[offset + ii]);
            }
            continue;
         }
         const double mean_dy = sum_dy[fi] / count;
         const double mean_dy_xhat = sum_dy_xhat[fi] / count;
         for (Index ii = 0; ii < layout.plane; ++ii)
         {
            grad_in[offset + ii] =
               static_cast<Scalar>(g * (grad_out[offset + ii] - mean_dy - normalized[offset + ii] * mean_dy_xhat));
         }
      }
   }
   return grad_in;
}

// ---------------------------------------------------------------------------
// Activations and reshape

template <typename Scalar>
Tensor<Scalar> LeakyRelu<Scalar>::infer(const Tensor<Scalar>& in) const
{
   Tensor<Scalar> out = in;
   const Scalar* x = in.data();
   Scalar* y = out.data();
   const Scalar slope = slope_;
   const Index n = out.size();
   for (Index ii = 0; ii < n; ++ii)
   {
      const Scalar positive = static_cast<Scalar>(x[ii] > Scalar(0));
      y[ii] = positive * y[ii] + (Scalar(1) - positive) * (slope * y[ii]);
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> LeakyRelu<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   if (trace)
   {
      trace->mode = mode;
      trace->input_shape = in.shape();
      trace->saved.clear();
      trace->saved.push_back(in);
   }
   return infer(in);
}

template <typename Scalar>
Tensor<Scalar> LeakyRelu<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   if (!bp.input_grad)
   {
      return {};
   }
   const Tensor<Scalar>& in = trace.saved.at(0);
   Tensor<Scalar> grad_in = grad_out;
   Scalar* g = grad_in.data();
   const Scalar* x = in.data();
   const Scalar slope = slope_;
   const Index n = grad_in.size();
   for (Index ii = 0; ii < n; ++ii)
   {
      const Scalar positive = static_cast<Scalar>(x[ii] > Scalar(0));
      g[ii] = positive * g[ii] + (Scalar(1) - positive) * (slope * g[ii]);
   }
   return grad_in;
}

template <typename Scalar>
Tensor<Scalar> Tanh<Scalar>::infer(const Tensor<Scalar>& in) const
{
   Tensor<Scalar> out = in;
   for (Scalar& v : out.values())
   {
      v = std::tanh(v);
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> Tanh<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   Tensor<Scalar> out = infer(in);
   if (trace)
   {
      trace->mode = mode;
      trace->input_shape = in.shape();
      trace->saved = {out};
   }
   return out;
}

template <typename Scalar>
Tensor<Scalar> Tanh<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   if (!bp.input_grad)
   {
      return {};
   }
   const Tensor<Scalar>& out = trace.saved.at(0);
   Tensor<Scalar> grad_in = grad_out;
   for (Index ii = 0; ii < grad_in.size(); ++ii)
   {
      grad_in[ii] *= Scalar(1) - out[ii] * out[ii];
   }
   return grad_in;
}

template <typename Scalar>
Tensor<Scalar> Reshape<Scalar>::infer(const Tensor<Scalar>& in) const
{
   Shape shape{in.dim(0)};
   shape.insert(shape.end(), sample_shape_.begin(), sample_shape_.end());
   return in.reshaped(std::move(shape));
}

template <typename Scalar>
Tensor<Scalar> Reshape<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, LayerTrace<Scalar>* trace)
{
   if (trace)
   {
      trace->mode = mode;
      trace->input_shape = in.shape();
      trace->saved.clear();
   }
   return infer(in);
}

template <typename Scalar>
Tensor<Scalar> Reshape<Scalar>::backward(const LayerTrace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   if (!bp.input_grad)
   {
      return {};
   }
   return grad_out.reshaped(trace.input_shape);
}

// ---------------------------------------------------------------------------
// Sequential

template <typename Scalar>
Tensor<Scalar> Sequential<Scalar>::forward(const Tensor<Scalar>& in, Mode mode, Trace<Scalar>* trace)
{
   if (trace)
   {
      trace->layers.assign(layers_.size(), LayerTrace<Scalar>{});
   }
   Tensor<Scalar> current = in;
   for (std::size_t ii = 0; ii < layers_.size(); ++ii)
   {
      LayerTrace<Scalar>* layer_trace = trace ? &trace->layers[ii] : nullptr;
      current = std::visit([&](auto& layer) { return layer.forward(current, mode, layer_trace); }, layers_[ii]);
   }
   return current;
}

template <typename Scalar>
Tensor<Scalar> Sequential<Scalar>::infer(const Tensor<Scalar>& in) const
{
   Tensor<Scalar> current = in;
   for (const auto& layer : layers_)
   {
      current = std::visit([&](const auto& l) { return l.infer(current); }, layer);
   }
   return current;
}

template <typename Scalar>
Tensor<Scalar> Sequential<Scalar>::backward(const Trace<Scalar>& trace, const Tensor<Scalar>& grad_out, Backprop bp)
{
   if (trace.layers.size() != layers_.size())
   {
      throw ArgumentError(name_ + ": trace does not belong to this network");
   }
   Tensor<Scalar> grad = grad_out;
   for (std::size_t ii = layers_.size(); ii-- > 0;)
   {
      const Backprop step{bp.accumulate_params, ii > 0 || bp.input_grad};
      grad = std::visit([&](auto& layer) { return layer.backward(trace.layers[ii], grad, step); }, layers_[ii]);
      if (!step.input_grad)
      {
         break;
      }
   }
   return bp.input_grad ? grad : Tensor<Scalar>{};
}

template <typename Scalar>
std::vector<Parameter<Scalar>*> Sequential<Scalar>::parameters()
{
   std::vector<Parameter<Scalar>*> out;
   for (auto& layer : layers_)
   {
      for (Parameter<Scalar>* p : std::visit([](auto& l) { return l.parameters(); }, layer))
      {
         out.push_back(p);
      }
   }
   return out;
}

template <typename Scalar>
std::vector<const Parameter<Scalar>*> Sequential<Scalar>::parameters() const
{
   std::vector<const Parameter<Scalar>*> out;
   for (Parameter<Scalar>* p : const_cast<Sequential*>(this)->parameters())
   {
      out.push_back(p);
   }
   return out;
}

template <typename Scalar>
std::vector<Buffer<Scalar>*> Sequential<Scalar>::buffers()
{
   std::vector<Buffer<Scalar>*> out;
   for (auto& layer : layers_)
   {
      for (Buffer<Scalar>* b : std::visit([](auto& l) { return l.buffers(); }, layer))
      {
         out.push_back(b);
      }
   }
   return out;
}

template <typename Scalar>
std::vector<const Buffer<Scalar>*> Sequential<Scalar>::buffers() const
{
   std::vector<const Buffer<Scalar>*> out;
   for (Buffer<Scalar>* b : const_cast<Sequential*>(this)->buffers())
   {
      out.push_back(b);
   }
   return out;
}

template <typename Scalar>
void Sequential<Scalar>::zero_grad()
{
   for (Parameter<Scalar>* p : parameters())
   {
      p->grad.fill(Scalar(0));
   }
}

template <typename Scalar>
void Sequential<Scalar>::initialize(Rng& rng, double stddev)
{
   for (auto& layer : layers_)
   {
      std::visit([&](auto& l) { l.initialize(rng, stddev); }, layer);
   }
}

#define INFOAE_INSTANTIATE_LAYERS(Scalar)                                                                              \
   template class Dense<Scalar>;                                                                                       \
   template class Conv2d<Scalar>;                                                                                      \
   template class ConvTranspose2d<Scalar>;                                                                             \
   template class BatchNorm<Scalar>;                                                                                   \
   template class LeakyRelu<Scalar>;                                                                                   \
   template class Tanh<Scalar>;                                                                                        \
   template class Reshape<Scalar>;                                                                                     \
   template class Sequential<Scalar>;

INFOAE_INSTANTIATE_LAYERS(float)
INFOAE_INSTANTIATE_LAYERS(double)

#undef INFOAE_INSTANTIATE_LAYERS

} // namespace infoae::nn
