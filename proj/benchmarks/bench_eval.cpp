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

#include <infoae/eval.hpp>

#include <random>

namespace {

void BM_Hungarian(benchmark::State& state)
{
   const auto n = static_cast<std::size_t>(state.range(0));
   std::mt19937_64 gen(3);
   infoae::CostMatrix cost(n, std::vector<double>(n));
   for (auto& row : cost)
   {
      for (auto& v : row)
      {
         v = static_cast<double>(gen() % 1000);
      }
   }
   for (auto _ : state)
   {
      benchmark::DoNotOptimize(infoae::hungarian_assignment(cost));
   }
}
BENCHMARK(BM_Hungarian)->Arg(10)->Arg(100);

// Confusion matrix plus assignment over a 10000-sample test set.
void BM_ClusterAccuracy(benchmark::State& state)
{
   std::mt19937_64 gen(4);
   infoae::LabelSet truth;
   std::vector<int> pred;
   for (int ii = 0; ii < 10000; ++ii)
   {
      truth.labels.push_back(static_cast<std::uint8_t>(gen() % 10));
      pred.push_back(static_cast<int>(gen() % 10));
   }
   for (auto _ : state)
   {
      benchmark::DoNotOptimize(infoae::cluster_accuracy(pred, truth));
   }
}
BENCHMARK(BM_ClusterAccuracy);

} // namespace
