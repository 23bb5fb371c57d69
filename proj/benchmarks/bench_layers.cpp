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

#include <benchmark/benchmark.h>

#include <infoae/layers.hpp>
#include <infoae/rng.hpp>

namespace {

using infoae::Index;
using infoae::Tensor;
namespace nn = infoae::nn;

Tensor<float> filled(const infoae::Shape& shape, infoae::Rng& rng)
{
   Tensor<float> t(shape);
   std::normal_distribution<float> normal;
   for (Index ii = 0; ii < t.size(); ++ii)
   {
      t[ii] = normal(rng);
   }
   return t;
}

// Args: batch, input channels, output channels, input side.
void BM_Conv2dForwardBackward(benchmark::State& state)
{
   const Index batch = state.range(0);
   const Index cin = state.range(1);
   const Index cout = state.range(2);
   const Index side = state.range(3);
   infoae::Rng rng(1);
   nn::Conv2d<float> conv("conv", cin, cout, 4, 2, 1);
   conv.initialize(rng, 0.02);
   const Tensor<float> x = filled({batch, cin, side, side}, rng);
   const Index out = conv.output_extent(side);
   const Tensor<float> g = filled({batch, cout, out, out}, rng);
   for (auto _ : state)
   {
      nn::LayerTrace<float> trace;
      benchmark::DoNotOptimize(conv.forward(x, nn::Mode::kTrain, &trace));
      benchmark::DoNotOptimize(conv.backward(trace, g, {}));
   }
   state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_Conv2dForwardBackward)->Args({100, 1, 32, 28})->Args({100, 32, 64, 14})->Unit(benchmark::kMillisecond);

void BM_ConvTransposeForwardBackward(benchmark::State& state)
{
   const Index batch = state.range(0);
   const Index cin = state.range(1);
   const Index cout = state.range(2);
   const Index side = state.range(3);
   infoae::Rng rng(2);
   nn::ConvTranspose2d<float> deconv("deconv", cin, cout, 4, 2, 1);
   deconv.initialize(rng, 0.02);
   const Tensor<float> x = filled({batch, cin, side, side}, rng);
   const Index out = deconv.output_extent(side);
   const Tensor<float> g = filled({batch, cout, out, out}, rng);
   for (auto _ : state)
   {
      nn::LayerTrace<float> trace;
      benchmark::DoNotOptimize(deconv.forward(x, nn::Mode::kTrain, &trace));
      benchmark::DoNotOptimize(deconv.backward(trace, g, {}));
   }
   state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ConvTransposeForwardBackward)
   ->Args({100, 128, 64, 7})
   ->Args({100, 64, 1, 14})
   ->Unit(benchmark::kMillisecond);

} // namespace
