// Copyright 2026 The parahead Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "parahead/bench.hpp"
#include "parahead/consistency.hpp"

using namespace parahead;

namespace {

struct NameSet {
  std::vector<std::string> names;
  Bytes payload{0, 0, 0, 1};
  std::vector<NameRecord> records;

  explicit NameSet(std::size_t n) {
    std::mt19937_64 rng(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(rng()));
    const std::uint64_t digest = fnv1a64(ByteView(payload));
    for (const auto& s : names) records.push_back(NameRecord{s, 0, digest, payload});
  }
};

void BM_HashCheck(benchmark::State& state) {
  NameSet set(static_cast<std::size_t>(state.range(0)));
  std::uint64_t cmp = 0;
  for (auto _ : state) cmp = hash_check(set.records, 16384).string_comparisons;
  state.counters["str_cmp"] = static_cast<double>(cmp);
}

void BM_SortCheck(benchmark::State& state) {
  NameSet set(static_cast<std::size_t>(state.range(0)));
  std::uint64_t cmp = 0;
  for (auto _ : state) cmp = sort_check(set.records).string_comparisons;
  state.counters["str_cmp"] = static_cast<double>(cmp);
}

// One strategy on the 1% 98M profile; args: strategy index, ranks, lockstep.
void BM_Strategy(benchmark::State& state) {
  const auto kind = kAllStrategies[static_cast<std::size_t>(state.range(0))];
  const int ranks = static_cast<int>(state.range(1));
  BenchConfig config;
  config.scale = 0.01;
  const Workload w = gen_workload(bench_workload_spec(config, kind, ranks));
  RunOptions options;
  options.schedule = state.range(2) ? Schedule::Lockstep : Schedule::Concurrent;
  for (auto _ : state) benchmark::DoNotOptimize(run_strategy(kind, w, options));
  state.SetLabel(std::string(to_string(kind)) + (state.range(2) ? " lockstep" : " concurrent"));
}

}  // namespace

BENCHMARK(BM_HashCheck)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SortCheck)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Strategy)
    ->ArgsProduct({{0, 1, 2, 3}, {1, 4, 16}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
