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

#include <set>

#include "parahead/classic_codec.hpp"
#include "parahead/error.hpp"
#include "parahead/strategies.hpp"

using namespace parahead;

namespace {

Workload make_workload(std::vector<std::vector<ObjectDef>> per_rank) {
  Workload w;
  w.spec.ranks = static_cast<int>(per_rank.size());
  w.per_rank = std::move(per_rank);
  return w;
}

Workload generated(int ranks, double shared, std::uint64_t seed, NameScheme scheme = NameScheme::Path,
                   std::uint64_t vars = 400) {
  WorkloadSpec spec;
  spec.total_vars = vars;
  spec.total_dims = vars * 3 / 2;
  spec.ranks = ranks;
  spec.shared_fraction = shared;
  spec.attr_bytes_per_var = 12;
  spec.name_scheme = scheme;
  spec.seed = seed;
  return gen_workload(spec);
}

// Union of all ranks' definitions: ranks ascending, creation order, first
// definition wins.
Header merge_oracle(const Workload& w) {
  std::vector<ObjectDef> merged;
  std::set<ObjectKey> seen;
  for (const auto& defs : w.per_rank) {
    for (const auto& d : defs) {
      if (seen.insert({d.kind(), d.full_name}).second) merged.push_back(d);
    }
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const ObjectDef& a, const ObjectDef& b) { return kind_index(a.kind()) < kind_index(b.kind()); });
  Header h = assemble_header(merged);
  const std::uint64_t reserve = encoded_size(h);
  return compute_offsets(std::move(h), reserve, 4);
}

std::set<std::string> error_names(const RunResult& r, int rank) {
  std::set<std::string> names;
  try {
    std::rethrow_exception(r.rank_errors[static_cast<std::size_t>(rank)]);
  } catch (const ConsistencyError& e) {
    for (const auto& c : e.conflicts()) names.insert(c.full_name);
  } catch (...) {
    ADD_FAILURE() << "rank " << rank << " did not raise ConsistencyError";
  }
  return names;
}

}  // namespace

TEST(Strategies, SingleRankMatchesSequentialWrite) {
  std::vector<ObjectDef> defs{make_dim("x", 10), make_att("title", std::string("run")),
                              make_var("v", TypeTag::Int, {"x"})};
  Header h = assemble_header(defs);
  const std::uint64_t reserve = encoded_size(h);
  const Bytes expect = encode_classic(compute_offsets(h, reserve, 4));
  for (auto kind : {StrategyKind::AppBaseline, StrategyKind::LibBaselineHash, StrategyKind::LibBaselineSort}) {
    RunResult r = run_strategy(kind, make_workload({defs}));
    EXPECT_EQ(r.image->bytes(), expect) << to_string(kind);
  }
}

TEST(Strategies, AppHeaderEqualsMergeOracle) {
  Workload w = generated(4, 0.1, 3, NameScheme::Flat, 1000);
  RunResult r = run_app_baseline(w);
  EXPECT_EQ(decode_classic(r.image->bytes()), merge_oracle(w));
}

TEST(Strategies, CrossStrategyEquivalence) {
  for (double shared : {0.0, 0.1, 0.5}) {
    for (int p : {1, 2, 4, 8}) {
      Workload w = generated(p, shared, 17 + static_cast<std::uint64_t>(p));
      RunResult app = run_app_baseline(w);
      RunResult hash = run_lib_baseline(w, false);
      RunResult sort = run_lib_baseline(w, true);
      RunResult nf = run_new_format(w);
      EXPECT_EQ(app.image->bytes(), hash.image->bytes());
      EXPECT_EQ(hash.image->bytes(), sort.image->bytes());
      const LogicalSet ref = read_logical_set(*app.image);
      EXPECT_EQ(read_logical_set(*nf.image), ref) << "P=" << p << " shared=" << shared;
    }
  }
}

TEST(Strategies, SharedObjectStoredOnce) {
  std::vector<std::vector<ObjectDef>> ranks(3);
  for (int r = 0; r < 3; ++r) {
    ranks[r].push_back(make_dim("common", 8));
    ranks[r].push_back(make_var("own" + std::to_string(r), TypeTag::Float, {"common"}));
  }
  RunResult r = run_lib_baseline(make_workload(ranks), false);
  Header h = decode_classic(r.image->bytes());
  EXPECT_EQ(h.dims.size(), 1u);
  EXPECT_EQ(h.vars.size(), 3u);
}

TEST(Strategies, ConflictsReportedOnAllRanks) {
  for (auto mode : {ConflictMode::TypeMismatch, ConflictMode::DimMismatch}) {
    WorkloadSpec spec;
    spec.total_vars = 300;
    spec.total_dims = 450;
    spec.ranks = 4;
    spec.shared_fraction = 0.1;
    spec.conflicts = {3, mode};
    spec.seed = 8;
    Workload w = gen_workload(spec);
    const std::set<std::string> injected(w.injected.begin(), w.injected.end());
    ASSERT_EQ(injected.size(), 3u);
    for (auto kind : kAllStrategies) {
      RunResult r = execute_strategy(kind, w);
      for (int rank = 0; rank < 4; ++rank) EXPECT_EQ(error_names(r, rank), injected) << to_string(kind);
    }
    spec.conflicts = {};
    Workload twin = gen_workload(spec);
    for (auto kind : kAllStrategies) EXPECT_TRUE(execute_strategy(kind, twin).ok()) << to_string(kind);
  }
}

TEST(Strategies, SortAndHashAgreeOnConflicts) {
  WorkloadSpec spec;
  spec.total_vars = 200;
  spec.total_dims = 300;
  spec.ranks = 2;
  spec.conflicts = {2, ConflictMode::TypeMismatch};
  spec.name_scheme = NameScheme::Flat;
  Workload w = gen_workload(spec);
  auto conflicts = [&](bool sort) {
    try {
      run_lib_baseline(w, sort);
    } catch (const ConsistencyError& e) {
      return e.conflicts();
    }
    return std::vector<Conflict>{};
  };
  EXPECT_EQ(conflicts(false), conflicts(true));
  EXPECT_EQ(conflicts(false).size(), 2u);
}

TEST(NewFormat, SharedBlockScenario) {
  auto shared = [] {
    return std::vector<ObjectDef>{make_dim("shared/n", 4), make_var("shared/v", TypeTag::Int, {"shared/n"})};
  };
  auto unique = [](int r) {
    std::vector<ObjectDef> defs;
    const std::string b = "own" + std::to_string(r);
    defs.push_back(make_dim(b + "/n", 16));
    for (int i = 0; i < 200; ++i) defs.push_back(make_var(b + "/v" + std::to_string(i), TypeTag::Double, {b + "/n"}));
    return defs;
  };
  std::vector<std::vector<ObjectDef>> ranks(2);
  for (int r = 0; r < 2; ++r) {
    ranks[r] = shared();
    auto u = unique(r);
    ranks[r].insert(ranks[r].end(), u.begin(), u.end());
  }
  RunResult r = run_new_format(make_workload(ranks));
  NewFormatFile file = open_new_format(r.image);
  ASSERT_EQ(file.index().entries.size(), 3u);
  // Unique block contents never travel: what a rank receives is far less
  // than the other rank's unique block.
  const IndexEntry* own1 = file.index().find("own1");
  ASSERT_NE(own1, nullptr);
  EXPECT_LT(r.rank_reports[0].comm.bytes_received(), own1->size / 4);
  // The shared block is written once, by rank 0.
  for (const auto& rec : r.image->write_log()) {
    if (rec.label == "shared") EXPECT_EQ(rec.rank, 0);
    if (rec.label == "own1") EXPECT_EQ(rec.rank, 1);
  }

  ranks[1][1] = make_var("shared/v", TypeTag::Float, {"shared/n"});
  RunResult bad = execute_strategy(StrategyKind::NewFormat, make_workload(ranks));
  EXPECT_EQ(error_names(bad, 0), std::set<std::string>{"shared/v"});
  EXPECT_EQ(error_names(bad, 1), std::set<std::string>{"shared/v"});
}

TEST(NewFormat, WriteResponsibility) {
  Workload w = generated(4, 0.2, 9);
  RunResult r = run_new_format(w);
  EXPECT_TRUE(r.image->regions_disjoint());
  NewFormatFile file = open_new_format(r.image);
  std::map<std::string, int> lowest_creator;
  for (int rank = 3; rank >= 0; --rank) {
    for (const auto& d : w.per_rank[static_cast<std::size_t>(rank)]) {
      lowest_creator[std::string(split_full_name(d.full_name).block_path)] = rank;
    }
  }
  std::map<std::string, int> writes;
  for (const auto& rec : r.image->write_log()) {
    ++writes[rec.label];
    if (rec.label == "index") {
      EXPECT_EQ(rec.rank, 0);
      EXPECT_EQ(rec.offset, 0u);
    } else {
      const IndexEntry* e = file.index().find(rec.label);
      ASSERT_NE(e, nullptr) << rec.label;
      EXPECT_EQ(rec.offset, e->offset);
      EXPECT_EQ(rec.size, e->size);
      EXPECT_EQ(rec.rank, lowest_creator.at(rec.label));
    }
  }
  EXPECT_EQ(writes.size(), file.index().entries.size() + 1);
  for (const auto& [label, n] : writes) EXPECT_EQ(n, 1) << label;
}

TEST(NewFormat, ExchangeVolumeWithoutSharing) {
  for (int p : {1, 2, 4, 8}) {
    Workload w = generated(p, 0.0, 4);
    RunResult r = run_new_format(w);
    // Each rank contributes u32 count and, per block, u32 path length,
    // padded path, three u64 and three u32 fields; the size round adds
    // 8 bytes per rank.
    std::uint64_t expect = 8 * static_cast<std::uint64_t>(p);
    for (const auto& defs : w.per_rank) {
      std::set<std::string> blocks;
      for (const auto& d : defs) blocks.insert(std::string(split_full_name(d.full_name).block_path));
      expect += 4;
      for (const auto& b : blocks) expect += 4 + pad4(b.size()) + 3 * 8 + 3 * 4;
    }
    for (const auto& rep : r.rank_reports) EXPECT_EQ(rep.comm.bytes_received(), expect) << "P=" << p;
  }
}

TEST(NewFormat, MemoryBoundWithoutSharing) {
  Workload w = generated(4, 0.0, 12, NameScheme::Path, 2000);
  RunResult r = run_new_format(w);
  NewFormatFile file = open_new_format(r.image);
  const std::uint64_t index_bytes = index_table_size(file.index());
  for (int rank = 0; rank < 4; ++rank) {
    std::uint64_t own = 0;
    std::set<std::string> blocks;
    for (const auto& d : w.per_rank[static_cast<std::size_t>(rank)]) {
      blocks.insert(std::string(split_full_name(d.full_name).block_path));
    }
    for (const auto& b : blocks) own += file.index().find(b)->size;
    EXPECT_LE(r.rank_reports[static_cast<std::size_t>(rank)].mem_high_watermark, own + index_bytes);
  }
}

TEST(NewFormat, LazyReadsOn512Blocks) {
  std::vector<std::vector<ObjectDef>> ranks(4);
  for (int b = 0; b < 512; ++b) {
    char path[16];
    std::snprintf(path, sizeof path, "blk%03d", b);
    auto& defs = ranks[static_cast<std::size_t>(b % 4)];
    defs.push_back(make_dim(std::string(path) + "/n", 3));
    defs.push_back(make_var(std::string(path) + "/a", TypeTag::Int, {std::string(path) + "/n"}));
    defs.push_back(make_var(std::string(path) + "/b", TypeTag::Short, {std::string(path) + "/n"}));
  }
  RunResult r = run_new_format(make_workload(ranks));
  NewFormatFile file = open_new_format(r.image);
  ASSERT_EQ(file.index().entries.size(), 512u);
  EXPECT_EQ(file.bytes_read(), index_table_size(file.index()));
  EXPECT_EQ(file.blocks_loaded(), 0u);
  const std::uint64_t before = file.bytes_read();
  auto a = file.find(ObjectKind::Variable, "blk321/a");
  ASSERT_TRUE(a);
  EXPECT_EQ(file.bytes_read() - before, file.index().find("blk321")->size);
  auto b = file.find(ObjectKind::Variable, "blk321/b");
  ASSERT_TRUE(b);
  EXPECT_EQ(file.bytes_read() - before, file.index().find("blk321")->size);
  EXPECT_EQ(file.blocks_loaded(), 1u);
  EXPECT_EQ(file.totals()[kind_index(ObjectKind::Variable)], 1024u);
}

TEST(NewFormat, GidsAgreeWithFileOrder) {
  Workload w = generated(4, 0.1, 21);
  RunResult r = run_new_format(w);
  NewFormatFile file = open_new_format(r.image);
  for (int rank = 0; rank < 4; ++rank) {
    auto& store = r.stores[static_cast<std::size_t>(rank)];
    for (auto kind : kAllKinds) {
      for (Lid lid = 0; lid < store.defined_count(kind); ++lid) {
        EXPECT_EQ(store.gid(kind, lid), file.gid_of(kind, store.defined(kind, lid).full_name));
      }
    }
  }
}

TEST(NewFormat, CorruptBlockNamesItsPath) {
  Workload w = generated(2, 0.0, 2);
  RunResult r = run_new_format(w);
  Bytes bytes = r.image->bytes();
  NewFormatFile probe = open_new_format(r.image);
  const IndexEntry& victim = probe.index().entries.back();
  // Overwrite the dimension list tag right after the path record.
  const std::uint64_t tag_at = victim.offset + 8 + pad4(victim.block_path.size());
  bytes[tag_at + 3] = 0x77;
  FileImage broken(bytes);
  NewFormatFile file = open_new_format(broken);
  try {
    read_full_header(file);
    FAIL() << "corruption not detected";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("block '" + victim.block_path + "'"), std::string::npos) << e.what();
  }
}

TEST(NewFormat, FullHeaderEqualsClassic) {
  Workload w = generated(4, 0.1, 33);
  LogicalSet from_blocks;
  {
    RunResult nf = run_new_format(w);
    NewFormatFile file = open_new_format(nf.image);
    from_blocks = logical_set(read_full_header(file));
  }
  RunResult lib = run_lib_baseline(w, false);
  EXPECT_EQ(from_blocks, logical_set(decode_classic(lib.image->bytes())));
}

TEST(Strategies, SchedulersAgree) {
  Workload w = generated(4, 0.2, 5);
  for (auto kind : kAllStrategies) {
    RunOptions lock;
    lock.schedule = Schedule::Lockstep;
    RunResult a = run_strategy(kind, w);
    RunResult b = run_strategy(kind, w, lock);
    EXPECT_EQ(a.image->bytes(), b.image->bytes());
    PhaseReport sa = a.summary(), sb = b.summary();
    EXPECT_EQ(sa.string_comparisons, sb.string_comparisons);
    EXPECT_EQ(sa.comm_bytes, sb.comm_bytes);
    EXPECT_EQ(sa.mem_hw_max, sb.mem_hw_max);
  }
}
