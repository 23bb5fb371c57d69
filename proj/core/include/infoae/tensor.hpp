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

#ifndef INFOAE_TENSOR_HPP_
#define INFOAE_TENSOR_HPP_

#include <infoae/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <new>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace infoae {

using Index = std::int64_t;
using Shape = std::vector<Index>;

inline Index shape_size(const Shape& shape)
{
   return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>{});
}

inline std::string shape_string(const Shape& shape)
{
   std::string out = "(";
   for (std::size_t ii = 0; ii < shape.size(); ++ii)
   {
      if (ii > 0)
      {
         out += ", ";
      }
      out += std::to_string(shape[ii]);
   }
   return out + ")";
}

/// Allocator returning 64-byte aligned storage, so vectorized kernels see
/// the same alignment on every run.
template <typename T>
struct AlignedAllocator {
   using value_type = T;
   static constexpr std::align_val_t kAlignment{64};

   AlignedAllocator() noexcept = default;
   template <typename U>
   AlignedAllocator(const AlignedAllocator<U>&) noexcept
   {
   }

   T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
   void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

   template <typename U>
   friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) noexcept
   {
      return true;
   }
};

/// Dense row-major tensor with value semantics.
template <typename Scalar>
class Tensor {
public:
   using value_type = Scalar;

   Tensor() = default;

   explicit Tensor(Shape shape, Scalar fill = Scalar(0))
      : shape_(std::move(shape)), values_(static_cast<std::size_t>(checked_size(shape_)), fill)
   {
   }

   Tensor(Shape shape, const std::vector<Scalar>& values)
      : shape_(std::move(shape)), values_(values.begin(), values.end())
   {
      if (checked_size(shape_) != static_cast<Index>(values_.size()))
      {
         throw ArgumentError("tensor shape " + shape_string(shape_) + " does not match " +
                             std::to_string(values_.size()) + " values");
      }
   }

   const Shape& shape() const noexcept { return shape_; }
   int rank() const noexcept { return static_cast<int>(shape_.size()); }
   Index dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
   Index size() const noexcept { return static_cast<Index>(values_.size()); }
   bool empty() const noexcept { return values_.empty(); }

   Scalar* data() noexcept { return values_.data(); }
   const Scalar* data() const noexcept { return values_.data(); }
   std::span<Scalar> values() noexcept { return values_; }
   std::span<const Scalar> values() const noexcept { return values_; }

   Scalar& operator[](Index ii) noexcept { return values_[static_cast<std::size_t>(ii)]; }
   const Scalar& operator[](Index ii) const noexcept { return values_[static_cast<std::size_t>(ii)]; }

   /// Element (row, col) of a rank-2 tensor.
   Scalar& operator()(Index row, Index col) noexcept { return values_[static_cast<std::size_t>(row * shape_[1] + col)]; }
   const Scalar& operator()(Index row, Index col) const noexcept
   {
      return values_[static_cast<std::size_t>(row * shape_[1] + col)];
   }

   void reshape(Shape shape)
   {
      if (checked_size(shape) != size())
      {
         throw ArgumentError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
      }
      shape_ = std::move(shape);
   }

   Tensor reshaped(Shape shape) const&
   {
      Tensor out = *this;
      out.reshape(std::move(shape));
      return out;
   }

   Tensor reshaped(Shape shape) &&
   {
      reshape(std::move(shape));
      return std::move(*this);
   }

   void fill(Scalar value) { std::fill(values_.begin(), values_.end(), value); }

   template <typename Other>
   Tensor<Other> cast() const
   {
      std::vector<Other> out(values_.begin(), values_.end());
      return Tensor<Other>(shape_, std::move(out));
   }

   bool all_finite() const
   {
      return std::all_of(values_.begin(), values_.end(), [](Scalar v) { return std::isfinite(v); });
   }

   friend bool operator==(const Tensor&, const Tensor&) = default;

private:
   static Index checked_size(const Shape& shape)
   {
      for (Index extent : shape)
      {
         if (extent < 0)
         {
            throw ArgumentError("negative extent in shape " + shape_string(shape));
         }
      }
      return shape_size(shape);
   }

   Shape shape_;
   std::vector<Scalar, AlignedAllocator<Scalar>> values_;
};

/// a += b, element-wise; shapes must agree in element count.
template <typename Scalar>
void add_inplace(Tensor<Scalar>& acc, const Tensor<Scalar>& rhs)
{
   if (acc.size() != rhs.size())
   {
      throw ArgumentError("add_inplace: size mismatch " + shape_string(acc.shape()) + " vs " +
                          shape_string(rhs.shape()));
   }
   Scalar* out = acc.data();
   const Scalar* in = rhs.data();
   for (Index ii = 0; ii < acc.size(); ++ii)
   {
      out[ii] += in[ii];
   }
}

template <typename Scalar>
void scale_inplace(Tensor<Scalar>& acc, Scalar factor)
{
   for (Scalar& v : acc.values())
   {
      v *= factor;
   }
}

/// Rows [begin, end) along the leading axis.
template <typename Scalar>
Tensor<Scalar> slice_rows(const Tensor<Scalar>& in, Index begin, Index end)
{
   if (in.rank() == 0 || begin < 0 || end > in.dim(0) || begin > end)
   {
      throw ArgumentError("slice_rows: bad range for shape " + shape_string(in.shape()));
   }
   const Index stride = in.dim(0) == 0 ? 0 : in.size() / in.dim(0);
   Shape shape = in.shape();
   shape[0] = end - begin;
   Tensor<Scalar> out(std::move(shape));
   std::copy(in.data() + begin * stride, in.data() + end * stride, out.data());
   return out;
}

/// Concatenate two rank-2 tensors along the feature axis.
template <typename Scalar>
Tensor<Scalar> concat_columns(const Tensor<Scalar>& left, const Tensor<Scalar>& right)
{
   if (left.rank() != 2 || right.rank() != 2 || left.dim(0) != right.dim(0))
   {
      throw ArgumentError("concat_columns: incompatible shapes " + shape_string(left.shape()) + " and " +
                          shape_string(right.shape()));
   }
   const Index rows = left.dim(0);
   const Index lc = left.dim(1);
   const Index rc = right.dim(1);
   Tensor<Scalar> out({rows, lc + rc});
   for (Index rr = 0; rr < rows; ++rr)
   {
      std::copy_n(left.data() + rr * lc, lc, out.data() + rr * (lc + rc));
      std::copy_n(right.data() + rr * rc, rc, out.data() + rr * (lc + rc) + lc);
   }
   return out;
}

/// Inverse of concat_columns: split a rank-2 tensor after `left_cols` columns.
template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> split_columns(const Tensor<Scalar>& in, Index left_cols)
{
   const Index rows = in.dim(0);
   const Index cols = in.dim(1);
   const Index right_cols = cols - left_cols;
   Tensor<Scalar> left({rows, left_cols});
   Tensor<Scalar> right({rows, right_cols});
   for (Index rr = 0; rr < rows; ++rr)
   {
      std::copy_n(in.data() + rr * cols, left_cols, left.data() + rr * left_cols);
      std::copy_n(in.data() + rr * cols + left_cols, right_cols, right.data() + rr * right_cols);
   }
   return {std::move(left), std::move(right)};
}

} // namespace infoae

#endif // INFOAE_TENSOR_HPP_
