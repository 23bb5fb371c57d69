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

#include <infoae/eval.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>

namespace infoae {

std::string to_string(MappingMode mode)
{
   return mode == MappingMode::kMajority ? "majority" : "optimal";
}

MappingMode parse_mapping_mode(const std::string& text)
{
   if (text == "optimal")
   {
      return MappingMode::kOptimal;
   }
   if (text == "majority")
   {
      return MappingMode::kMajority;
   }
   throw ArgumentError("eval.mapping must be 'optimal' or 'majority', got '" + text + "'");
}

void EvalConfig::validate() const
{
   if (limit < 0)
   {
      throw ArgumentError("eval.limit must be non-negative");
   }
   if (n_styles < 1)
   {
      throw ArgumentError("eval.n_styles must be positive");
   }
   if (n_steps < 1)
   {
      throw ArgumentError("eval.n_steps must be positive");
   }
   if (idx_a < 0 || idx_b < 0)
   {
      throw ArgumentError("eval.idx_a and eval.idx_b must be non-negative");
   }
}

template <typename Scalar>
std::vector<int> predict_classes(const ModelState<Scalar>& state, const ImageBatch<Scalar>& images, Index chunk)
{
   if (chunk < 1)
   {
      throw ArgumentError("predict_classes: chunk must be positive");
   }
   const Index n = images.batch_size();
   std::vector<int> out;
   out.reserve(static_cast<std::size_t>(n));
   for (Index begin = 0; begin < n; begin += chunk)
   {
      const Index end = std::min(n, begin + chunk);
      const ImageBatch<Scalar> part(slice_rows(images.tensor(), begin, end));
      const ClassProbBatch<Scalar> probs = classify(state, encode(state, part));
      for (Index row = 0; row < probs.batch_size(); ++row)
      {
         out.push_back(probs.argmax(row));
      }
   }
   return out;
}

std::vector<int> hungarian_assignment(const CostMatrix& cost)
{
   const std::size_t n = cost.size();
   for (const auto& row : cost)
   {
      if (row.size() != n)
      {
         throw ArgumentError("hungarian_assignment: cost matrix must be square");
      }
      for (double v : row)
      {
         if (!std::isfinite(v))
         {
            throw ArgumentError("hungarian_assignment: cost matrix must be finite");
         }
      }
   }
   // Shortest augmenting paths with row/column potentials, 1-based with a
   // virtual column 0.
   const double inf = std::numeric_limits<double>::infinity();
   std::vector<double> u(n + 1, 0.0);
   std::vector<double> v(n + 1, 0.0);
   std::vector<std::size_t> match(n + 1, 0);
   std::vector<std::size_t> way(n + 1, 0);
   for (std::size_t row = 1; row <= n; ++row)
   {
      match[0] = row;
      std::size_t col0 = 0;
      std::vector<double> min_slack(n + 1, inf);
      std::vector<bool> used(n + 1, false);
      do
      {
         used[col0] = true;
         const std::size_t row0 = match[col0];
         double delta = inf;
         std::size_t col1 = 0;
         for (std::size_t col = 1; col <= n; ++col)
         {
            if (used[col])
            {
               continue;
            }
            const double slack = cost[row0 - 1][col - 1] - u[row0] - v[col];
            if (slack < min_slack[col])
            {
               min_slack[col] = slack;
               way[col] = col0;
            }
            if (min_slack[col] < delta)
            {
               delta = min_slack[col];
               col1 = col;
            }
         }
         for (std::size_t col = 0; col <= n; ++col)
         {
            if (used[col])
            {
               u[match[col]] += delta;
               v[col] -= delta;
            }
            else
            {
               min_slack[col] -= delta;
            }
         }
         col0 = col1;
      } while (match[col0] != 0);
      do
      {
         const std::size_t col1 = way[col0];
         match[col0] = match[col1];
         col0 = col1;
      } while (col0 != 0);
   }
   std::vector<int> assignment(n, -1);
   for (std::size_t col = 1; col <= n; ++col)
   {
      assignment[match[col] - 1] = static_cast<int>(col - 1);
   }
   return assignment;
}

double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment)
{
   if (assignment.size() != cost.size())
   {
      throw ArgumentError("assignment_cost: assignment length differs from matrix size");
   }
   double total = 0.0;
   for (std::size_t row = 0; row < cost.size(); ++row)
   {
      total += cost[row].at(static_cast<std::size_t>(assignment[row]));
   }
   return total;
}

Confusion confusion_matrix(const std::vector<int>& pred, const LabelSet& truth)
{
   if (static_cast<Index>(pred.size()) != truth.size())
   {
      throw ArgumentError("cluster_accuracy: " + std::to_string(pred.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " labels");
   }
   Confusion confusion{};
   for (std::size_t ii = 0; ii < pred.size(); ++ii)
   {
      if (pred[ii] < 0 || pred[ii] >= kNumCategories || truth.labels[ii] >= kNumCategories)
      {
         throw ArgumentError("cluster_accuracy: class index out of range at " + std::to_string(ii));
      }
      ++confusion[static_cast<std::size_t>(pred[ii])][truth.labels[ii]];
   }
   return confusion;
}

AssignmentResult cluster_accuracy(const std::vector<int>& pred, const LabelSet& truth, MappingMode mode)
{
   if (pred.empty())
   {
      throw ArgumentError("cluster_accuracy: no predictions");
   }
   AssignmentResult result;
   result.confusion = confusion_matrix(pred, truth);
   if (mode == MappingMode::kOptimal)
   {
      CostMatrix cost(kNumCategories, std::vector<double>(kNumCategories));
      for (std::size_t k = 0; k < kNumCategories; ++k)
      {
         for (std::size_t j = 0; j < kNumCategories; ++j)
         {
            cost[k][j] = -static_cast<double>(result.confusion[k][j]);
         }
      }
      const std::vector<int> assignment = hungarian_assignment(cost);
      std::copy(assignment.begin(), assignment.end(), result.mapping.begin());
   }
   else
   {
      for (std::size_t k = 0; k < kNumCategories; ++k)
      {
         const auto& row = result.confusion[k];
         result.mapping[k] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
      }
   }
   std::int64_t hits = 0;
   for (std::size_t k = 0; k < kNumCategories; ++k)
   {
      hits += result.confusion[k][static_cast<std::size_t>(result.mapping[k])];
   }
   result.accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
   return result;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path)
{
   if (image.width <= 0 || image.height <= 0 ||
       static_cast<Index>(image.pixels.size()) != image.width * image.height)
   {
      throw ArgumentError("write_pgm: pixel count does not match the image size");
   }
   std::ofstream out(path, std::ios::binary);
   if (!out)
   {
      throw IoError("cannot write " + path.string());
   }
   out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
   out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
   if (!out)
   {
      throw IoError("failed writing " + path.string());
   }
}

GrayImage read_pgm(const std::filesystem::path& path)
{
   std::ifstream in(path, std::ios::binary);
   if (!in)
   {
      throw IoError("cannot open " + path.string());
   }
   std::string magic;
   int max_value = 0;
   GrayImage image;
   in >> magic >> image.width >> image.height >> max_value;
   if (!in || magic != "P5" || max_value != 255 || image.width <= 0 || image.height <= 0)
   {
      throw FormatError(path.string() + ": not an 8-bit binary PGM");
   }
   in.get();
   image.pixels.resize(static_cast<std::size_t>(image.width * image.height));
   in.read(reinterpret_cast<char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
   if (in.gcount() != static_cast<std::streamsize>(image.pixels.size()))
   {
      throw CorruptionError(path.string() + ": truncated pixel data");
   }
   return image;
}

template <typename Scalar>
GrayImage tile_images(const ImageBatch<Scalar>& images, Index columns)
{
   if (columns < 1)
   {
      throw ArgumentError("tile_images: columns must be positive");
   }
   const Index count = images.batch_size();
   const Index rows = (count + columns - 1) / columns;
   GrayImage out{columns * kImageSide, rows * kImageSide, {}};
   out.pixels.assign(static_cast<std::size_t>(out.width * out.height), 0);
   const Tensor<Scalar>& t = images.tensor();
   for (Index ii = 0; ii < count; ++ii)
   {
      const Index top = (ii / columns) * kImageSide;
      const Index left = (ii % columns) * kImageSide;
      for (Index r = 0; r < kImageSide; ++r)
      {
         for (Index c = 0; c < kImageSide; ++c)
         {
            const double value = t[(ii * kImageSide + r) * kImageSide + c];
            out.pixels[static_cast<std::size_t>((top + r) * out.width + left + c)] = denormalize_pixel(value);
         }
      }
   }
   return out;
}

template <typename Scalar>
GrayImage sample_grid(const ModelState<Scalar>& state, Index n_styles, std::uint64_t seed)
{
   if (n_styles < 1)
   {
      throw ArgumentError("sample_grid: n_styles must be positive");
   }
   Rng rng = make_rng(seed, 2);
   const LatentBatch<Scalar> styles = sample_noise<Scalar>(n_styles, rng);
   Tensor<Scalar> z({n_styles * kNumCategories, kLatentDim});
   std::vector<int> classes;
   for (Index row = 0; row < n_styles; ++row)
   {
      for (Index k = 0; k < kNumCategories; ++k)
      {
         std::copy_n(styles.tensor().data() + row * kLatentDim, kLatentDim,
                     z.data() + (row * kNumCategories + k) * kLatentDim);
         classes.push_back(static_cast<int>(k));
      }
   }
   const LatentBatch<Scalar> z_g =
      generate_latent(state, LatentBatch<Scalar>(std::move(z)), CategoricalBatch<Scalar>::from_classes(classes));
   return tile_images(decode(state, z_g), kNumCategories);
}

template <typename Scalar>
Interpolation<Scalar> interpolate(const ModelState<Scalar>& state, const ImageBatch<Scalar>& x1,
                                  const ImageBatch<Scalar>& x2, Index n)
{
   if (n < 1)
   {
      throw ArgumentError("interpolate: n must be at least 1");
   }
   if (x1.batch_size() != 1 || x2.batch_size() != 1)
   {
      throw ArgumentError("interpolate: endpoints must be single images");
   }
   const Tensor<Scalar> z1 = encode(state, x1).tensor();
   const Tensor<Scalar> z2 = encode(state, x2).tensor();
   Interpolation<Scalar> out;
   // Wider arithmetic keeps the endpoints and the n = 2 midpoint exact.
   using Wide = std::conditional_t<std::is_same_v<Scalar, float>, double, long double>;
   for (Index s = 0; s <= n; ++s)
   {
      const Wide t = static_cast<Wide>(s) / static_cast<Wide>(n);
      Tensor<Scalar> z(z1.shape());
      for (Index ii = 0; ii < z.size(); ++ii)
      {
         z[ii] = static_cast<Scalar>(std::lerp(static_cast<Wide>(z1[ii]), static_cast<Wide>(z2[ii]), t));
      }
      out.frames.push_back(decode(state, LatentBatch<Scalar>(z)));
      out.latents.push_back(std::move(z));
   }
   return out;
}

template <typename Scalar>
GrayImage interpolation_strip(const Interpolation<Scalar>& interp)
{
   const Index count = static_cast<Index>(interp.frames.size());
   if (count == 0)
   {
      throw ArgumentError("interpolation_strip: no frames");
   }
   Tensor<Scalar> all({count, 1, kImageSide, kImageSide});
   for (Index ii = 0; ii < count; ++ii)
   {
      const Tensor<Scalar>& frame = interp.frames[static_cast<std::size_t>(ii)].tensor();
      std::copy_n(frame.data(), frame.size(), all.data() + ii * frame.size());
   }
   return tile_images(ImageBatch<Scalar>(std::move(all)), count);
}

template <typename Scalar>
void export_latents(const ModelState<Scalar>& state, const ImageBatch<Scalar>& images, const LabelSet& labels,
                    const std::filesystem::path& path)
{
   const Index n = images.batch_size();
   if (labels.size() != n)
   {
      throw ArgumentError("export_latents: " + std::to_string(n) + " images vs " + std::to_string(labels.size()) +
                          " labels");
   }
   std::ofstream out(path);
   if (!out)
   {
      throw IoError("cannot write " + path.string());
   }
   constexpr Index kChunk = 500;
   char buffer[32];
   for (Index begin = 0; begin < n; begin += kChunk)
   {
      const Index end = std::min(n, begin + kChunk);
      const Tensor<Scalar> z = encode(state, ImageBatch<Scalar>(slice_rows(images.tensor(), begin, end))).tensor();
      for (Index row = 0; row < end - begin; ++row)
      {
         out << static_cast<int>(labels.labels[static_cast<std::size_t>(begin + row)]);
         for (Index col = 0; col < kLatentDim; ++col)
         {
            std::snprintf(buffer, sizeof(buffer), "\t%.9g", static_cast<double>(z(row, col)));
            out << buffer;
         }
         out << '\n';
      }
   }
   if (!out)
   {
      throw IoError("failed writing " + path.string());
   }
}

std::vector<LatentRow> read_latent_table(const std::filesystem::path& path)
{
   std::ifstream in(path);
   if (!in)
   {
      throw IoError("cannot open " + path.string());
   }
   std::vector<LatentRow> rows;
   std::string line;
   while (std::getline(in, line))
   {
      std::istringstream fields(line);
      LatentRow row;
      fields >> row.label;
      double value = 0.0;
      while (fields >> value)
      {
         row.values.push_back(value);
      }
      if (row.values.size() != static_cast<std::size_t>(kLatentDim))
      {
         throw FormatError(path.string() + ": expected " + std::to_string(kLatentDim) + " latent values in row " +
                           std::to_string(rows.size()));
      }
      rows.push_back(std::move(row));
   }
   return rows;
}

#define INFOAE_INSTANTIATE_EVAL(Scalar)                                                                                \
   template std::vector<int> predict_classes(const ModelState<Scalar>&, const ImageBatch<Scalar>&, Index);             \
   template GrayImage tile_images(const ImageBatch<Scalar>&, Index);                                                   \
   template GrayImage sample_grid(const ModelState<Scalar>&, Index, std::uint64_t);                                    \
   template struct Interpolation<Scalar>;                                                                              \
   template Interpolation<Scalar> interpolate(const ModelState<Scalar>&, const ImageBatch<Scalar>&,                    \
                                              const ImageBatch<Scalar>&, Index);                                       \
   template GrayImage interpolation_strip(const Interpolation<Scalar>&);                                               \
   template void export_latents(const ModelState<Scalar>&, const ImageBatch<Scalar>&, const LabelSet&,                 \
                                const std::filesystem::path&);

INFOAE_INSTANTIATE_EVAL(float)
INFOAE_INSTANTIATE_EVAL(double)

#undef INFOAE_INSTANTIATE_EVAL

} // namespace infoae
