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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parahead/classic_codec.hpp"
#include "parahead/file_image.hpp"
#include "parahead/strategies.hpp"
#include "parahead/workload.hpp"

namespace parahead {

inline constexpr std::string_view kCsvHeader =
    "strategy,P,seed,t_define_s,t_exchange_s,t_check_s,t_write_s,t_close_s,str_cmp,payload_cmp,comm_bytes,"
    "io_write_bytes,io_read_bytes,mem_hw_bytes_max,mem_hw_bytes_sum";

struct BenchConfig {
  std::vector<StrategyKind> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  std::vector<int> ranks{1, 2, 4, 8, 16};
  std::string dataset = "98M";
  double scale = 0.01;
  std::optional<std::size_t> hash_size;  // dataset default when unset
  double shared_fraction = 0.0;
  ConflictInjection conflicts;
  std::uint64_t seed = 0;
  int trials = 1;
  Schedule schedule = Schedule::Concurrent;
  // Unset: path names for NEW_FORMAT, flat names for the classic strategies.
  std::optional<NameScheme> name_scheme;
};

struct BenchRow {
  StrategyKind strategy = StrategyKind::AppBaseline;
  int ranks = 0;
  std::uint64_t seed = 0;
  PhaseReport report;
};

std::string csv_row(const BenchRow& row);

// The default name scheme per strategy.
NameScheme default_name_scheme(StrategyKind kind);

WorkloadSpec bench_workload_spec(const BenchConfig& config, StrategyKind kind, int ranks);

struct BenchOutcome {
  std::vector<BenchRow> rows;
  std::vector<std::string> expected_failures;    // consistency errors under injected conflicts
  std::vector<std::string> unexpected_failures;
};

// One row per strategy x rank count x trial, in that nesting order.
BenchOutcome run_bench(const BenchConfig& config, const std::function<void(const BenchRow&)>& on_row = {});

// Human-readable listing. For new-format files only the index table is
// read.
std::string inspect(ByteSource& source);

// Flattened names longer than this are rejected by conversion.
inline constexpr std::size_t kMaxFlatNameLength = 256;

// classic -> new puts every object in the root block; new -> classic joins
// block path and local name. Variable offsets are carried over unchanged.
FileImage convert(const FileImage& input, FileFormat target, FormatVersion classic_version = kDefaultVersion);

// Runs all strategies on one workload and compares their files.
struct VerifyReport {
  bool ok = true;
  std::vector<std::string> messages;
};
VerifyReport verify_strategies(const Workload& workload, const RunOptions& options = {});

}  // namespace parahead
