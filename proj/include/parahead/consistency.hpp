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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parahead/bytes.hpp"

namespace parahead {

// One name occurrence gathered for checking. `payload` is the serialized
// definition; the digest is only a filter, byte equality decides.
struct NameRecord {
  std::string_view full_name;
  int origin_rank = 0;
  std::uint64_t payload_digest = 0;
  ByteView payload;
};

struct NameGroup {
  std::string full_name;
  std::vector<int> ranks;  // sorted

  friend bool operator==(const NameGroup&, const NameGroup&) = default;
  friend auto operator<=>(const NameGroup&, const NameGroup&) = default;
};

struct CheckConflict {
  std::string full_name;
  std::vector<int> ranks;  // every origin rank of the name, sorted
  std::string detail;      // first differing field

  friend bool operator==(const CheckConflict&, const CheckConflict&) = default;
};

struct CheckReport {
  std::vector<NameGroup> shared_sets;      // equal name, equal payloads; sorted by name
  std::vector<CheckConflict> conflicts;    // sorted by name
  std::uint64_t string_comparisons = 0;
  std::uint64_t payload_comparisons = 0;
  std::uint64_t distinct_names = 0;
};

// FNV-1a followed by the MurmurHash3 finalizer.
std::uint64_t name_hash(std::string_view name) noexcept;

// Chained table of k slots for name lookup. Every comparison of the probe
// name against a slot occupant is counted.
class NameHashTable {
 public:
  explicit NameHashTable(std::size_t slots);

  struct Lookup {
    std::size_t id;
    bool inserted;
  };

  // Returns the id already associated with `name`, or associates `new_id`.
  // The table does not own the name storage.
  Lookup insert(std::string_view name, std::size_t new_id);
  const std::size_t* find(std::string_view name);

  std::size_t slot_of(std::string_view name) const noexcept;
  std::size_t slot_count() const noexcept { return slots_.size(); }
  std::uint64_t comparisons() const noexcept { return comparisons_; }

 private:
  std::vector<std::vector<std::pair<std::string_view, std::size_t>>> slots_;
  std::uint64_t comparisons_ = 0;
};

// Inserts every record into a k-slot table; occupants of the hit slot are
// compared by name, equal names form groups and group payloads are compared
// against the group's first record.
CheckReport hash_check(std::span<const NameRecord> records, std::size_t k);

// Sorts by name (every comparator call counted), then groups adjacent equal
// names; payloads compared within runs against the run's first record.
CheckReport sort_check(std::span<const NameRecord> records);

struct SharedComparison {
  bool equal = true;
  std::string field;  // empty when equal

  friend bool operator==(const SharedComparison&, const SharedComparison&) = default;
};

// Byte-exact comparison of two serialized definitions (object record
// bodies). On mismatch, names the first differing field.
SharedComparison compare_shared(ByteView a, ByteView b);

// Expected name comparisons for n insertions into k slots: n * n / (2k).
double model_hash_cost(double n, double k);

// Per-rank cost with n/p local objects plus the p block names:
// (n/p) * (n / (2kp)) + p * p / (2k). Requires p | n.
double model_newformat_cost(std::uint64_t n, std::uint64_t p, std::uint64_t k);

}  // namespace parahead
