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

#ifndef INFOAE_DATA_HPP_
#define INFOAE_DATA_HPP_

#include <infoae/tensor.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace infoae {

inline constexpr Index kImageSide = 28;
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Raw images as stored in an IDX3 file, row-major (count x rows x cols).
struct ImageSet {
   Index count = 0;
   Index rows = 0;
   Index cols = 0;
   std::vector<std::uint8_t> pixels;
};

/// Digit labels in {0..9}. Only evaluation code takes a LabelSet; the
/// training entry points have no parameter of this type.
struct LabelSet {
   std::vector<std::uint8_t> labels;

   Index size() const noexcept { return static_cast<Index>(labels.size()); }
};

/// Images normalized into [-1, 1], shaped (batch, 1, 28, 28).
template <typename Scalar>
class ImageBatch {
public:
   explicit ImageBatch(Tensor<Scalar> data);

   const Tensor<Scalar>& tensor() const noexcept { return data_; }
   Index batch_size() const noexcept { return data_.dim(0); }

private:
   Tensor<Scalar> data_;
};

/// Reads an IDX3 image file; gzip input is decompressed transparently.
ImageSet load_idx_images(const std::filesystem::path& path);

/// Reads an IDX1 label file; every label byte must be a digit.
LabelSet load_idx_labels(const std::filesystem::path& path);

/// Maps pixel v to v / 127.5 - 1.
template <typename Scalar>
ImageBatch<Scalar> normalize(const ImageSet& raw);

/// Inverse of normalize, rounded and clamped to a byte.
std::uint8_t denormalize_pixel(double value);

/// The first `count` images of a set.
ImageSet take_images(const ImageSet& raw, Index count);

using BatchIndices = std::vector<std::vector<Index>>;

/// Shuffled index batches for one epoch. The permutation depends only on
/// (seed, epoch); the trailing partial batch is dropped.
BatchIndices batch_indices(Index count, Index batch_size, std::uint64_t seed, std::uint64_t epoch);

template <typename Scalar>
ImageBatch<Scalar> gather(const ImageBatch<Scalar>& images, std::span<const Index> indices);

template <typename Scalar>
std::vector<ImageBatch<Scalar>> make_batches(const ImageBatch<Scalar>& images, Index batch_size,
                                             std::uint64_t seed, std::uint64_t epoch);

} // namespace infoae

#endif // INFOAE_DATA_HPP_
