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

#ifndef INFOAE_EVAL_HPP_
#define INFOAE_EVAL_HPP_

#include <infoae/data.hpp>
#include <infoae/networks.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace infoae {

enum class MappingMode {
   kOptimal,  ///< bijective cluster-to-label matching maximizing hits
   kMajority, ///< each cluster takes its most frequent label
};

std::string to_string(MappingMode mode);
MappingMode parse_mapping_mode(const std::string& text);

struct EvalConfig {
   std::filesystem::path test_images = "data/mnist/t10k-images-idx3-ubyte";
   std::filesystem::path test_labels = "data/mnist/t10k-labels-idx1-ubyte";
   /// Evaluate only the first this-many test images; 0 uses all.
   Index limit = 0;
   MappingMode mapping = MappingMode::kOptimal;
   Index n_styles = 10;
   Index n_steps = 10;
   Index idx_a = 0;
   Index idx_b = 1;

   void validate() const;

   friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

using Confusion = std::array<std::array<std::int64_t, kNumCategories>, kNumCategories>;

struct AssignmentResult {
   /// mapping[k] is the true label assigned to predicted cluster k.
   std::array<int, kNumCategories> mapping{};
   double accuracy = 0.0;
   /// confusion[pred][truth] sample counts.
   Confusion confusion{};
};

/// argmax of C(E(x)) per sample in eval mode, processed in chunks.
template <typename Scalar>
std::vector<int> predict_classes(const ModelState<Scalar>& state, const ImageBatch<Scalar>& images, Index chunk = 500);

using CostMatrix = std::vector<std::vector<double>>;

/// Minimum-cost perfect matching; result[row] is the column assigned to row.
std::vector<int> hungarian_assignment(const CostMatrix& cost);

double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment);

Confusion confusion_matrix(const std::vector<int>& pred, const LabelSet& truth);

AssignmentResult cluster_accuracy(const std::vector<int>& pred, const LabelSet& truth,
                                  MappingMode mode = MappingMode::kOptimal);

/// 8-bit grayscale raster, row-major.
struct GrayImage {
   Index width = 0;
   Index height = 0;
   std::vector<std::uint8_t> pixels;
};

/// Binary PGM: "P5\n<w> <h>\n255\n" then the bytes.
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

/// Tiles (count, 1, 28, 28) images left to right, `columns` per row.
template <typename Scalar>
GrayImage tile_images(const ImageBatch<Scalar>& images, Index columns);

/// Rows of D(G(z_i, c_k)): one noise vector per row, codes c_0..c_9 across.
/// Noise comes from a dedicated stream of `seed`.
template <typename Scalar>
GrayImage sample_grid(const ModelState<Scalar>& state, Index n_styles, std::uint64_t seed);

template <typename Scalar>
struct Interpolation {
   std::vector<Tensor<Scalar>> latents;  ///< n + 1 latents of shape (1, 100)
   std::vector<ImageBatch<Scalar>> frames; ///< n + 1 decoded images
};

/// Frames s = 0..n decode (1 - s/n) z_1 + (s/n) z_2 with z_i = E(x_i) in
/// eval mode. Every map runs at batch size 1, so frame n reproduces
/// decode(encode(x_2)) exactly.
template <typename Scalar>
Interpolation<Scalar> interpolate(const ModelState<Scalar>& state, const ImageBatch<Scalar>& x1,
                                  const ImageBatch<Scalar>& x2, Index n);

template <typename Scalar>
GrayImage interpolation_strip(const Interpolation<Scalar>& interp);

/// One row per image: label, then the 100 latent values; tab-separated.
template <typename Scalar>
void export_latents(const ModelState<Scalar>& state, const ImageBatch<Scalar>& images, const LabelSet& labels,
                    const std::filesystem::path& path);

struct LatentRow {
   int label = 0;
   std::vector<double> values;
};

std::vector<LatentRow> read_latent_table(const std::filesystem::path& path);

} // namespace infoae

#endif // INFOAE_EVAL_HPP_
