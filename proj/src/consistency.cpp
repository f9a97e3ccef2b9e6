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

#include "parahead/consistency.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "parahead/error.hpp"
#include "parahead/object.hpp"

namespace parahead {

NameHashTable::NameHashTable(std::size_t slots) {
  if (slots == 0) throw Error(ErrorCode::InvalidArgument, "hash table needs at least one slot");
  slots_.resize(slots);
}

namespace {

// MurmurHash3's 64-bit finalizer. FNV-1a alone leaves the high bits nearly
// unchanged across names that differ only in their last characters.
constexpr std::uint64_t fmix64(std::uint64_t h) noexcept {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

std::uint64_t name_hash(std::string_view name) noexcept { return fmix64(fnv1a64(name)); }

std::size_t NameHashTable::slot_of(std::string_view name) const noexcept {
  unsigned __int128 wide = static_cast<unsigned __int128>(name_hash(name)) * slots_.size();
  return static_cast<std::size_t>(wide >> 64);
}

NameHashTable::Lookup NameHashTable::insert(std::string_view name, std::size_t new_id) {
  auto& slot = slots_[slot_of(name)];
  for (const auto& [occupant, id] : slot) {
    ++comparisons_;
    if (occupant == name) return {id, false};
  }
  slot.emplace_back(name, new_id);
  return {new_id, true};
}

const std::size_t* NameHashTable::find(std::string_view name) {
  auto& slot = slots_[slot_of(name)];
  for (const auto& entry : slot) {
    ++comparisons_;
    if (entry.first == name) return &entry.second;
  }
  return nullptr;
}

namespace {

struct Group {
  std::vector<std::size_t> members;
  std::size_t first_mismatch = 0;  // 0: none
};

// Compares the payload of `candidate` against the group's first member.
bool same_payload(const NameRecord& first, const NameRecord& candidate, CheckReport& report) {
  if (first.payload_digest != candidate.payload_digest) return false;
  ++report.payload_comparisons;
  return first.payload.size() == candidate.payload.size() &&
         std::memcmp(first.payload.data(), candidate.payload.data(), first.payload.size()) == 0;
}

void add_member(Group& group, std::size_t index, std::span<const NameRecord> records, CheckReport& report) {
  if (!same_payload(records[group.members.front()], records[index], report) && group.first_mismatch == 0) {
    group.first_mismatch = index + 1;
  }
  group.members.push_back(index);
}

void finish(std::vector<Group>& groups, std::span<const NameRecord> records, CheckReport& report) {
  report.distinct_names = groups.size();
  for (const auto& g : groups) {
    if (g.members.size() < 2) continue;
    std::vector<int> ranks;
    ranks.reserve(g.members.size());
    for (std::size_t m : g.members) ranks.push_back(records[m].origin_rank);
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    std::string name(records[g.members.front()].full_name);
    if (g.first_mismatch == 0) {
      report.shared_sets.push_back(NameGroup{std::move(name), std::move(ranks)});
    } else {
      auto cmp = compare_shared(records[g.members.front()].payload, records[g.first_mismatch - 1].payload);
      report.conflicts.push_back(CheckConflict{std::move(name), std::move(ranks), cmp.field});
    }
  }
  std::sort(report.shared_sets.begin(), report.shared_sets.end());
  std::sort(report.conflicts.begin(), report.conflicts.end(),
            [](const CheckConflict& a, const CheckConflict& b) { return a.full_name < b.full_name; });
}

}  // namespace

CheckReport hash_check(std::span<const NameRecord> records, std::size_t k) {
  CheckReport report;
  NameHashTable table(k);
  std::vector<Group> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto hit = table.insert(records[i].full_name, groups.size());
    if (hit.inserted) {
      groups.push_back(Group{{i}, 0});
    } else {
      add_member(groups[hit.id], i, records, report);
    }
  }
  report.string_comparisons = table.comparisons();
  finish(groups, records, report);
  return report;
}

CheckReport sort_check(std::span<const NameRecord> records) {
  CheckReport report;
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t comparisons = 0;
  // std::sort is introsort: O(n log n) comparisons in the worst case. Ties on
  // the name fall back to input position so the result is deterministic.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    ++comparisons;
    int c = records[a].full_name.compare(records[b].full_name);
    return c != 0 ? c < 0 : a < b;
  });

  std::vector<Group> groups;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) {
      ++comparisons;
      if (records[order[i]].full_name == records[order[i - 1]].full_name) {
        add_member(groups.back(), order[i], records, report);
        continue;
      }
    }
    groups.push_back(Group{{order[i]}, 0});
  }
  report.string_comparisons = comparisons;
  finish(groups, records, report);
  return report;
}

namespace {

std::string first_difference(const ObjectDef& a, const ObjectDef& b) {
  if (a.kind() != b.kind()) return "kind";
  if (a.full_name != b.full_name) return "name";
  if (a.kind() == ObjectKind::Dimension) return "length";
  if (a.kind() == ObjectKind::Attribute) {
    const auto& va = std::get<AttPayload>(a.payload).values;
    const auto& vb = std::get<AttPayload>(b.payload).values;
    if (type_of(va) != type_of(vb)) return "type_tag";
    if (element_count(va) != element_count(vb)) return "length";
    return "values";
  }
  const auto& pa = std::get<VarPayload>(a.payload);
  const auto& pb = std::get<VarPayload>(b.payload);
  if (pa.type != pb.type) return "type_tag";
  if (pa.dims != pb.dims) return "dims";
  if (pa.attributes.size() != pb.attributes.size()) return "attributes";
  for (std::size_t i = 0; i < pa.attributes.size(); ++i) {
    const auto& x = pa.attributes[i];
    const auto& y = pb.attributes[i];
    if (x == y) continue;
    if (x.name != y.name) return "attributes[" + std::to_string(i) + "].name";
    if (x.type() != y.type()) return "attributes[" + x.name + "].type_tag";
    if (element_count(x.values) != element_count(y.values)) return "attributes[" + x.name + "].length";
    return "attributes[" + x.name + "].values";
  }
  return "encoding";
}

}  // namespace

SharedComparison compare_shared(ByteView a, ByteView b) {
  if (a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size()) == 0) return {};
  return SharedComparison{false, first_difference(decode_record_body(a), decode_record_body(b))};
}

double model_hash_cost(double n, double k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "hash table size must be at least 1");
  return n * n / (2.0 * k);
}

double model_newformat_cost(std::uint64_t n, std::uint64_t p, std::uint64_t k) {
  if (p == 0 || k == 0) throw Error(ErrorCode::InvalidArgument, "rank count and table size must be positive");
  if (n % p != 0) throw Error(ErrorCode::InvalidArgument, "objects must partition evenly across ranks");
  const double local = static_cast<double>(n / p);
  const double kd = static_cast<double>(k);
  const double pd = static_cast<double>(p);
  return local * (static_cast<double>(n) / (2.0 * kd * pd)) + pd * (pd / (2.0 * kd));
}

}  // namespace parahead
