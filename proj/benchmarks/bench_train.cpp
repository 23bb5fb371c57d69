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

#include <infoae/trainer.hpp>

namespace {

using infoae::Index;

infoae::ImageBatch<float> random_batch(Index n, infoae::Rng& rng)
{
   infoae::Tensor<float> x({n, 1, infoae::kImageSide, infoae::kImageSide});
   for (Index ii = 0; ii < x.size(); ++ii)
   {
      x[ii] = static_cast<float>(infoae::uniform_unit(rng) * 2.0 - 1.0);
   }
   return infoae::ImageBatch<float>(std::move(x));
}

// Arg: batch size. One full joint update of all six networks.
void BM_TrainStep(benchmark::State& state)
{
   infoae::TrainConfig cfg;
   cfg.batch_size = state.range(0);
   auto model = infoae::init_networks<float>(cfg.arch, 0);
   infoae::Rng rng(5);
   const auto x = random_batch(cfg.batch_size, rng);
   for (auto _ : state)
   {
      benchmark::DoNotOptimize(infoae::train_step(model, x, cfg));
   }
   state.SetItemsProcessed(state.iterations() * cfg.batch_size);
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EncodeEval(benchmark::State& state)
{
   const auto model = infoae::init_networks<float>(infoae::ArchConfig{}, 0);
   infoae::Rng rng(6);
   const auto x = random_batch(state.range(0), rng);
   for (auto _ : state)
   {
      benchmark::DoNotOptimize(infoae::encode(model, x));
   }
   state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeEval)->Arg(500)->Unit(benchmark::kMillisecond);

} // namespace
