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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "parahead/error.hpp"
#include "parahead/workload.hpp"

using namespace parahead;

namespace {

std::size_t count_kind(const std::vector<ObjectDef>& defs, ObjectKind kind) {
  return static_cast<std::size_t>(
      std::count_if(defs.begin(), defs.end(), [&](const ObjectDef& d) { return d.kind() == kind; }));
}

}  // namespace

TEST(Workload, PartitionOf98MAtFourRanks) {
  EXPECT_EQ(partition_counts(568480, 4), (std::vector<std::uint64_t>{142120, 142120, 142120, 142120}));
  EXPECT_EQ(partition_counts(852715, 4), (std::vector<std::uint64_t>{213179, 213179, 213179, 213178}));
  EXPECT_THROW(partition_counts(3, 4), Error);
  EXPECT_THROW(partition_counts(10, 4, true), Error);
}

TEST(Workload, EvenSplitNoCollisions) {
  WorkloadSpec spec;
  spec.total_vars = 10;
  spec.total_dims = 4;
  spec.ranks = 2;
  spec.name_scheme = NameScheme::Flat;
  Workload w = gen_workload(spec);
  std::set<std::string> names;
  for (const auto& defs : w.per_rank) {
    EXPECT_EQ(count_kind(defs, ObjectKind::Variable), 5u);
    for (const auto& d : defs) {
      if (d.kind() == ObjectKind::Variable) EXPECT_TRUE(names.insert(d.full_name).second) << d.full_name;
    }
  }
}

TEST(Workload, DeterministicInSeed) {
  WorkloadSpec spec;
  spec.total_vars = 200;
  spec.total_dims = 300;
  spec.ranks = 4;
  spec.shared_fraction = 0.2;
  spec.seed = 42;
  EXPECT_EQ(gen_workload(spec).per_rank, gen_workload(spec).per_rank);
  WorkloadSpec other = spec;
  other.seed = 43;
  EXPECT_NE(gen_workload(other).per_rank, gen_workload(spec).per_rank);
}

TEST(Workload, SharedObjectsIdenticalOnEveryRank) {
  WorkloadSpec spec;
  spec.total_vars = 400;
  spec.total_dims = 600;
  spec.ranks = 4;
  spec.shared_fraction = 0.25;
  spec.seed = 1;
  Workload w = gen_workload(spec);
  std::map<std::string, ObjectDef> first;
  for (const auto& d : w.per_rank[0]) first.emplace(d.full_name, d);
  std::size_t shared = 0;
  for (const auto& d : w.per_rank[0]) {
    bool everywhere = true;
    for (int r = 1; r < 4; ++r) {
      auto it = std::find_if(w.per_rank[r].begin(), w.per_rank[r].end(),
                             [&](const ObjectDef& o) { return o.full_name == d.full_name && o.kind() == d.kind(); });
      if (it == w.per_rank[r].end()) {
        everywhere = false;
      } else {
        EXPECT_EQ(*it, d);
      }
    }
    shared += everywhere;
  }
  EXPECT_GT(shared, 0u);
}

TEST(Workload, OneTypeConflict) {
  WorkloadSpec spec;
  spec.total_vars = 40;
  spec.total_dims = 60;
  spec.ranks = 3;
  spec.conflicts = {1, ConflictMode::TypeMismatch};
  spec.seed = 5;
  Workload w = gen_workload(spec);
  ASSERT_EQ(w.injected.size(), 1u);
  std::vector<const VarPayload*> defs;
  for (const auto& rank : w.per_rank) {
    for (const auto& d : rank) {
      if (d.full_name == w.injected[0]) defs.push_back(&std::get<VarPayload>(d.payload));
    }
  }
  ASSERT_EQ(defs.size(), 2u);
  EXPECT_NE(defs[0]->type, defs[1]->type);
}

TEST(Workload, DimConflict) {
  WorkloadSpec spec;
  spec.total_vars = 40;
  spec.total_dims = 60;
  spec.ranks = 2;
  spec.conflicts = {2, ConflictMode::DimMismatch};
  spec.seed = 5;
  Workload w = gen_workload(spec);
  ASSERT_EQ(w.injected.size(), 2u);
  for (const auto& name : w.injected) {
    std::vector<const VarPayload*> defs;
    for (const auto& rank : w.per_rank) {
      for (const auto& d : rank) {
        if (d.full_name == name) defs.push_back(&std::get<VarPayload>(d.payload));
      }
    }
    ASSERT_EQ(defs.size(), 2u);
    EXPECT_EQ(defs[0]->type, defs[1]->type);
    EXPECT_NE(defs[0]->dims, defs[1]->dims);
  }
}

TEST(Workload, ScaleKeepsRatio) {
  WorkloadSpec s = scaled_spec(kDataset98M, 0.01, 4, 7);
  EXPECT_EQ(s.total_vars, 5685u);
  EXPECT_EQ(s.total_dims, 8527u);
  EXPECT_NEAR(static_cast<double>(s.total_dims) / static_cast<double>(s.total_vars), 852715.0 / 568480.0, 1e-3);
  EXPECT_EQ(dataset_profile("1G").hash_size, 1048576u);
  EXPECT_THROW(dataset_profile("2G"), Error);
}

// The 98M dataset assigns 70.72 MiB of metadata to 568,480 variables,
// ~130 bytes per variable with dimensions included. The generator's
// footprint per variable should land within 20% of that.
TEST(Workload, MetadataCalibration) {
  WorkloadSpec spec = scaled_spec(kDataset98M, 0.01, 1, 3);
  spec.name_scheme = NameScheme::Flat;
  Workload w = gen_workload(spec);
  std::uint64_t bytes = 0;
  for (const auto& d : w.per_rank[0]) bytes += metadata_footprint(d);
  const double per_var = static_cast<double>(bytes) / static_cast<double>(spec.total_vars);
  const double target = 70.72 * 1024 * 1024 / 568480.0;
  EXPECT_GT(per_var, 0.8 * target) << per_var;
  EXPECT_LT(per_var, 1.2 * target) << per_var;
}
