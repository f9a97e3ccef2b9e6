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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parahead/object.hpp"

namespace parahead {

enum class NameScheme {
  Path,  // b{rank:05}/v{idx:06}: one block per rank
  Flat,  // v{rank:05}_{idx:06}: everything in the root block
};

enum class ConflictMode { TypeMismatch, DimMismatch };

std::string_view to_string(NameScheme scheme);
std::string_view to_string(ConflictMode mode);

struct ConflictInjection {
  std::uint32_t count = 0;
  ConflictMode mode = ConflictMode::TypeMismatch;
};

struct WorkloadSpec {
  std::uint64_t total_vars = 0;
  std::uint64_t total_dims = 0;
  int ranks = 1;
  std::uint32_t max_dims_per_var = 3;
  std::uint32_t attr_bytes_per_var = 0;  // 0: no per-variable attribute (calibrated default)
  double shared_fraction = 0.0;
  ConflictInjection conflicts;
  NameScheme name_scheme = NameScheme::Path;
  std::uint64_t seed = 0;
  // Demand total counts divisible by the rank count instead of spreading the
  // remainder one object at a time.
  bool strict_partition = false;
};

struct Workload {
  WorkloadSpec spec;
  std::vector<std::vector<ObjectDef>> per_rank;  // creation order
  std::vector<std::string> injected;             // full names of conflicting variables
};

// Per-rank share of `total` objects: total / ranks, with the first
// total % ranks ranks taking one more. Throws IndivisiblePartition when a
// rank would get nothing, or for any remainder in strict mode.
std::vector<std::uint64_t> partition_counts(std::uint64_t total, int ranks, bool strict = false);

// Deterministic in the workload spec. Every rank defines the shared objects
// identically (first, in the same order), then its own dimensions, global
// attribute and variables; injected conflicts come last.
Workload gen_workload(const WorkloadSpec& spec);

struct DatasetProfile {
  std::string_view name;
  std::uint64_t vars;
  std::uint64_t dims;
  std::uint64_t hash_size;
};

inline constexpr DatasetProfile kDataset98M{"98M", 568480, 852715, 16384};
inline constexpr DatasetProfile kDataset1G{"1G", 5684800, 8527150, 1048576};

// Throws InvalidArgument for an unknown name.
const DatasetProfile& dataset_profile(std::string_view name);

// Object counts scaled by `scale`, rounded to nearest.
WorkloadSpec scaled_spec(const DatasetProfile& profile, double scale, int ranks, std::uint64_t seed);

}  // namespace parahead
