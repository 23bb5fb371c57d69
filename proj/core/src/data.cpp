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

#include <infoae/data.hpp>
#include <infoae/rng.hpp>

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace infoae {

namespace {

struct GzCloser {
   void operator()(gzFile file) const noexcept { gzclose(file); }
};

// gzread passes plain files through untouched, so one reader covers both.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path)
{
   if (!std::filesystem::exists(path))
   {
      throw IoError("no such file: " + path.string());
   }
   std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser> file(gzopen(path.c_str(), "rb"));
   if (!file)
   {
      throw IoError("cannot open " + path.string());
   }
   std::vector<std::uint8_t> bytes;
   std::vector<std::uint8_t> chunk(1 << 20);
   for (;;)
   {
      const int got = gzread(file.get(), chunk.data(), static_cast<unsigned>(chunk.size()));
      if (got < 0)
      {
         int code = 0;
         const char* message = gzerror(file.get(), &code);
         throw CorruptionError("cannot decompress " + path.string() + ": " + message);
      }
      if (got == 0)
      {
         break;
      }
      bytes.insert(bytes.end(), chunk.begin(), chunk.begin() + got);
   }
   int code = Z_OK;
   const char* message = gzerror(file.get(), &code);
   if (code != Z_OK && code != Z_STREAM_END)
   {
      throw CorruptionError("cannot decompress " + path.string() + ": " + message);
   }
   return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset)
{
   return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
          (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

struct IdxPayload {
   std::vector<Index> dims;
   std::size_t offset = 0;
};

IdxPayload parse_idx_header(const std::vector<std::uint8_t>& bytes, std::uint32_t expected_magic,
                            const std::filesystem::path& path)
{
   if (bytes.size() < 4)
   {
      throw FormatError(path.string() + ": file too short for an IDX header");
   }
   const std::uint32_t magic = read_be32(bytes, 0);
   if (magic != expected_magic)
   {
      char buffer[64];
      std::snprintf(buffer, sizeof(buffer), "bad IDX magic 0x%08x (expected 0x%08x)", magic, expected_magic);
      throw FormatError(path.string() + ": " + buffer);
   }
   const std::size_t rank = expected_magic & 0xffu;
   const std::size_t header = 4 + 4 * rank;
   if (bytes.size() < header)
   {
      throw CorruptionError(path.string() + ": truncated IDX header");
   }
   IdxPayload payload;
   payload.offset = header;
   std::size_t expected = 1;
   for (std::size_t ii = 0; ii < rank; ++ii)
   {
      const std::uint32_t extent = read_be32(bytes, 4 + 4 * ii);
      payload.dims.push_back(static_cast<Index>(extent));
      expected *= extent;
   }
   const std::size_t actual = bytes.size() - header;
   if (actual != expected)
   {
      throw CorruptionError(path.string() + ": payload has " + std::to_string(actual) + " bytes, header declares " +
                            std::to_string(expected));
   }
   return payload;
}

} // namespace

template <typename Scalar>
ImageBatch<Scalar>::ImageBatch(Tensor<Scalar> data) : data_(std::move(data))
{
   const Shape& shape = data_.shape();
   if (shape.size() != 4 || shape[0] <= 0 || shape[1] != 1 || shape[2] != kImageSide || shape[3] != kImageSide)
   {
      throw ArgumentError("image batch must be (batch > 0, 1, 28, 28), got " + shape_string(shape));
   }
   for (Scalar v : data_.values())
   {
      if (!(v >= Scalar(-1) && v <= Scalar(1)))
      {
         throw ArgumentError("image batch value outside [-1, 1]: " + std::to_string(static_cast<double>(v)));
      }
   }
}

ImageSet load_idx_images(const std::filesystem::path& path)
{
   const std::vector<std::uint8_t> bytes = read_maybe_gzip(path);
   const IdxPayload payload = parse_idx_header(bytes, kIdxImagesMagic, path);
   ImageSet set;
   set.count = payload.dims[0];
   set.rows = payload.dims[1];
   set.cols = payload.dims[2];
   set.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(payload.offset), bytes.end());
   return set;
}

LabelSet load_idx_labels(const std::filesystem::path& path)
{
   const std::vector<std::uint8_t> bytes = read_maybe_gzip(path);
   const IdxPayload payload = parse_idx_header(bytes, kIdxLabelsMagic, path);
   LabelSet set;
   set.labels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(payload.offset), bytes.end());
   const auto bad = std::find_if(set.labels.begin(), set.labels.end(), [](std::uint8_t v) { return v > 9; });
   if (bad != set.labels.end())
   {
      throw CorruptionError(path.string() + ": label " + std::to_string(*bad) + " at index " +
                            std::to_string(bad - set.labels.begin()) + " is not a digit");
   }
   return set;
}

template <typename Scalar>
ImageBatch<Scalar> normalize(const ImageSet& raw)
{
   Tensor<Scalar> out({raw.count, 1, raw.rows, raw.cols});
   for (Index ii = 0; ii < out.size(); ++ii)
   {
      out[ii] = static_cast<Scalar>(static_cast<double>(raw.pixels[static_cast<std::size_t>(ii)]) / 127.5 - 1.0);
   }
   return ImageBatch<Scalar>(std::move(out));
}

std::uint8_t denormalize_pixel(double value)
{
   const double scaled = std::round((value + 1.0) * 127.5);
   return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

ImageSet take_images(const ImageSet& raw, Index count)
{
   if (count < 0 || count > raw.count)
   {
      throw ArgumentError("cannot take " + std::to_string(count) + " of " + std::to_string(raw.count) + " images");
   }
   ImageSet out;
   out.count = count;
   out.rows = raw.rows;
   out.cols = raw.cols;
   out.pixels.assign(raw.pixels.begin(), raw.pixels.begin() + count * raw.rows * raw.cols);
   return out;
}

BatchIndices batch_indices(Index count, Index batch_size, std::uint64_t seed, std::uint64_t epoch)
{
   if (batch_size <= 0)
   {
      throw ArgumentError("batch size must be positive, got " + std::to_string(batch_size));
   }
   if (batch_size > count)
   {
      throw ArgumentError("batch size " + std::to_string(batch_size) + " exceeds sample count " +
                          std::to_string(count));
   }
   std::vector<Index> order(static_cast<std::size_t>(count));
   std::iota(order.begin(), order.end(), Index{0});
   Rng rng = make_rng(seed, epoch);
   std::shuffle(order.begin(), order.end(), rng);

   BatchIndices batches(static_cast<std::size_t>(count / batch_size));
   for (std::size_t bb = 0; bb < batches.size(); ++bb)
   {
      const auto first = order.begin() + static_cast<std::ptrdiff_t>(bb) * batch_size;
      batches[bb].assign(first, first + batch_size);
   }
   return batches;
}

template <typename Scalar>
ImageBatch<Scalar> gather(const ImageBatch<Scalar>& images, std::span<const Index> indices)
{
   const Tensor<Scalar>& source = images.tensor();
   const Index stride = source.size() / source.dim(0);
   Shape shape = source.shape();
   shape[0] = static_cast<Index>(indices.size());
   Tensor<Scalar> out(shape);
   for (std::size_t ii = 0; ii < indices.size(); ++ii)
   {
      const Index row = indices[ii];
      if (row < 0 || row >= source.dim(0))
      {
         throw ArgumentError("gather: index " + std::to_string(row) + " out of range");
      }
      std::copy_n(source.data() + row * stride, stride, out.data() + static_cast<Index>(ii) * stride);
   }
   return ImageBatch<Scalar>(std::move(out));
}

template <typename Scalar>
std::vector<ImageBatch<Scalar>> make_batches(const ImageBatch<Scalar>& images, Index batch_size, std::uint64_t seed,
                                             std::uint64_t epoch)
{
   std::vector<ImageBatch<Scalar>> out;
   for (const auto& indices : batch_indices(images.batch_size(), batch_size, seed, epoch))
   {
      out.push_back(gather(images, std::span<const Index>(indices)));
   }
   return out;
}

template class ImageBatch<float>;
template class ImageBatch<double>;
template ImageBatch<float> normalize<float>(const ImageSet&);
template ImageBatch<double> normalize<double>(const ImageSet&);
template ImageBatch<float> gather(const ImageBatch<float>&, std::span<const Index>);
template ImageBatch<double> gather(const ImageBatch<double>&, std::span<const Index>);
template std::vector<ImageBatch<float>> make_batches(const ImageBatch<float>&, Index, std::uint64_t, std::uint64_t);
template std::vector<ImageBatch<double>> make_batches(const ImageBatch<double>&, Index, std::uint64_t, std::uint64_t);

} // namespace infoae
