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

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "parahead/bytes.hpp"
#include "parahead/consistency.hpp"
#include "parahead/object.hpp"

using namespace parahead;

namespace {

// Record body: the serialized object without its u64 length prefix.
Bytes body_of(const ObjectDef& def) {
  Bytes b = serialize_object(def);
  return Bytes(b.begin() + 8, b.end());
}

struct Records {
  std::vector<std::string> names;
  std::vector<Bytes> bodies;
  std::vector<NameRecord> records;

  void add(std::string name, int rank, const ObjectDef& def) {
    names.push_back(std::move(name));
    bodies.push_back(body_of(def));
    ranks.push_back(rank);
  }
  std::span<const NameRecord> view() {
    records.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      records.push_back(NameRecord{names[i], ranks[i], fnv1a64(ByteView(bodies[i])), bodies[i]});
    }
    return records;
  }

 private:
  std::vector<int> ranks;
};

std::vector<std::string> unique_names(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string s = "v" + std::to_string(rng());
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

std::uint64_t hash_comparisons(const std::vector<std::string>& names, std::size_t k) {
  NameHashTable table(k);
  for (std::size_t i = 0; i < names.size(); ++i) table.insert(names[i], i);
  return table.comparisons();
}

using ConflictKey = std::pair<std::string, std::vector<int>>;

std::set<ConflictKey> conflict_keys(const CheckReport& r) {
  std::set<ConflictKey> out;
  for (const auto& c : r.conflicts) out.insert({c.full_name, c.ranks});
  return out;
}

}  // namespace

TEST(HashCheck, SixUniqueNamesOneSlot) {
  Records rs;
  for (int i = 0; i < 6; ++i) rs.add("n" + std::to_string(i), 0, make_dim("n" + std::to_string(i), 1));
  CheckReport r = hash_check(rs.view(), 1);
  EXPECT_TRUE(r.conflicts.empty());
  EXPECT_EQ(r.string_comparisons, 15u);
  EXPECT_EQ(r.distinct_names, 6u);
}

TEST(HashCheck, SharedAndConflict) {
  Records ok;
  ok.add("t", 0, make_dim("t", 4));
  ok.add("p", 1, make_dim("p", 2));
  ok.add("t", 1, make_dim("t", 4));
  CheckReport r = hash_check(ok.view(), 16);
  ASSERT_EQ(r.shared_sets.size(), 1u);
  EXPECT_EQ(r.shared_sets[0], (NameGroup{"t", {0, 1}}));
  EXPECT_TRUE(r.conflicts.empty());

  Records bad;
  bad.add("t", 0, make_dim("t", 4));
  bad.add("t", 1, make_dim("t", 5));
  CheckReport c = hash_check(bad.view(), 16);
  ASSERT_EQ(c.conflicts.size(), 1u);
  EXPECT_EQ(c.conflicts[0].full_name, "t");
  EXPECT_EQ(c.conflicts[0].detail, "length");
}

TEST(SortCheck, BasicsAndEmpty) {
  Records rs;
  rs.add("a", 0, make_dim("a", 1));
  rs.add("a", 1, make_dim("a", 1));
  rs.add("b", 1, make_dim("b", 1));
  CheckReport r = sort_check(rs.view());
  ASSERT_EQ(r.shared_sets.size(), 1u);
  EXPECT_EQ(r.shared_sets[0].full_name, "a");
  EXPECT_TRUE(r.conflicts.empty());

  CheckReport e = sort_check({});
  EXPECT_TRUE(e.shared_sets.empty());
  EXPECT_EQ(e.string_comparisons, 0u);
}

TEST(SortCheck, ComparisonBound) {
  for (std::size_t n : {2u, 17u, 1000u, 20000u}) {
    Records rs;
    for (auto& name : unique_names(n, n)) rs.add(name, 0, make_dim(name, 1));
    CheckReport r = sort_check(rs.view());
    const double bound = 2.0 * static_cast<double>(n) * std::ceil(std::log2(static_cast<double>(n)));
    EXPECT_LE(static_cast<double>(r.string_comparisons), bound) << "n=" << n;
  }
}

// Every multiset of up to five (name, payload) items over {a,b,c} x {1,2},
// in canonical order, against a direct grouping oracle.
TEST(Detectors, ExhaustiveOracle) {
  const std::vector<std::pair<std::string, int>> items = {{"a", 1}, {"a", 2}, {"b", 1},
                                                          {"b", 2}, {"c", 1}, {"c", 2}};
  std::size_t cases = 0;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!pick.empty()) {
      Records rs;
      std::map<std::string, std::vector<std::pair<int, int>>> by_name;  // name -> (rank, payload)
      for (std::size_t i = 0; i < pick.size(); ++i) {
        const auto& [name, payload] = items[pick[i]];
        rs.add(name, static_cast<int>(i), make_dim(name, static_cast<std::uint64_t>(payload)));
        by_name[name].push_back({static_cast<int>(i), payload});
      }
      std::vector<NameGroup> shared;
      std::set<ConflictKey> conflicts;
      for (const auto& [name, occ] : by_name) {
        if (occ.size() < 2) continue;
        std::vector<int> ranks;
        std::set<int> payloads;
        for (auto [r, p] : occ) {
          ranks.push_back(r);
          payloads.insert(p);
        }
        if (payloads.size() == 1) {
          shared.push_back(NameGroup{name, ranks});
        } else {
          conflicts.insert({name, ranks});
        }
      }
      for (std::size_t k : {1u, 2u, 7u}) {
        CheckReport h = hash_check(rs.view(), k);
        EXPECT_EQ(h.shared_sets, shared);
        EXPECT_EQ(conflict_keys(h), conflicts);
      }
      CheckReport s = sort_check(rs.view());
      EXPECT_EQ(s.shared_sets, shared);
      EXPECT_EQ(conflict_keys(s), conflicts);
      ++cases;
    }
    if (pick.size() == 5) return;
    for (std::size_t i = from; i < items.size(); ++i) {
      pick.push_back(i);
      rec(i);
      pick.pop_back();
    }
  };
  rec(0);
  EXPECT_EQ(cases, 461u);  // C(6+5,5) - 1 non-empty multisets
}

TEST(HashCheck, CountersDeterministic) {
  Records rs;
  for (auto& name : unique_names(3000, 9)) rs.add(name, 0, make_dim(name, 1));
  EXPECT_EQ(hash_check(rs.view(), 64).string_comparisons, hash_check(rs.view(), 64).string_comparisons);
}

TEST(HashCheck, ModelFidelity) {
  const std::size_t n = 100000, k = 16384;
  double sum = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) sum += static_cast<double>(hash_comparisons(unique_names(n, seed), k));
  const double mean = sum / 10;
  const double model = model_hash_cost(n, k);
  EXPECT_NEAR(model, 305175.78, 0.01);
  EXPECT_GT(mean, 0.75 * model);
  EXPECT_LT(mean, 1.25 * model);
}

TEST(HashCheck, ModelFidelityOnWorkloadNames) {
  // Generator-style names, n/k = 4.
  std::vector<std::string> names;
  for (int r = 0; r < 4; ++r) {
    for (int i = 0; i < 1024; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "v%05d_%06d", r, i);
      names.push_back(buf);
    }
  }
  const double measured = static_cast<double>(hash_comparisons(names, 1024));
  const double model = model_hash_cost(4096, 1024);
  EXPECT_GT(measured, 0.75 * model);
  EXPECT_LT(measured, 1.25 * model);
}

TEST(HashCheck, SlotLoadsUniform) {
  const std::size_t k = 1024, n = 65536;
  NameHashTable table(k);
  std::vector<double> load(k, 0);
  for (int r = 0; r < 16; ++r) {
    for (int i = 0; i < 4096; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "b%05d/v%06d", r, i);
      load[table.slot_of(buf)] += 1;
    }
  }
  const double expected = static_cast<double>(n) / k;
  double chi2 = 0;
  for (double l : load) chi2 += (l - expected) * (l - expected) / expected;
  // 1023 degrees of freedom: mean 1023, sd ~45. Reject beyond ~4.5 sd.
  EXPECT_LT(chi2, 1230.0);
  EXPECT_GT(chi2, 820.0);
}

TEST(Detectors, SortBeatsHashAtCrossover) {
  Records rs;
  for (auto& name : unique_names(100000, 3)) rs.add(name, 0, make_dim(name, 1));
  EXPECT_LT(sort_check(rs.view()).string_comparisons, hash_check(rs.view(), 16384).string_comparisons);
}

TEST(CompareShared, Fields) {
  auto a = body_of(make_var("v", TypeTag::Int, {"x", "y"}));
  auto b = body_of(make_var("v", TypeTag::Float, {"x", "y"}));
  EXPECT_TRUE(compare_shared(a, body_of(make_var("v", TypeTag::Int, {"x", "y"}))).equal);
  SharedComparison c = compare_shared(a, b);
  EXPECT_FALSE(c.equal);
  EXPECT_EQ(c.field, "type_tag");
  EXPECT_EQ(compare_shared(a, body_of(make_var("v", TypeTag::Int, {"x"}))).field, "dims");
}

TEST(Models, Values) {
  EXPECT_EQ(model_hash_cost(0, 16), 0.0);
  EXPECT_NEAR(model_hash_cost(568480, 16384), 9.862e6, 1e3);
  EXPECT_DOUBLE_EQ(model_hash_cost(2 * 512, 512), 1024.0);
  EXPECT_DOUBLE_EQ(model_newformat_cost(1024, 4, 16), 256.0 * 8 + 16.0 / 32);
  EXPECT_DOUBLE_EQ(model_newformat_cost(1000, 1, 10), model_hash_cost(1000, 10) + 1.0 / 20);
  const double r = model_newformat_cost(1 << 20, 4, 1024) / model_newformat_cost(1 << 20, 8, 1024);
  EXPECT_NEAR(r, 4.0, 0.01);
}
