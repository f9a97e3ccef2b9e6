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

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "parahead/consistency.hpp"
#include "parahead/object.hpp"

namespace parahead {

using Lid = std::uint64_t;
using Gid = std::uint64_t;

// Maps a (kind, full name) to its file-order GID, or nothing when the file
// has no such object.
using GidResolver = std::function<std::optional<Gid>(ObjectKind, std::string_view)>;

// Global order as three per-kind name lists in file order.
using GlobalOrder = std::array<std::vector<std::string>, kKindCount>;

// Per-rank define-mode state. LIDs are dense per kind in creation order;
// objects first seen through inquire() take the next free LID.
class ObjectStore {
 public:
  explicit ObjectStore(std::size_t hash_slots);

  ObjectStore(ObjectStore&&) = default;
  ObjectStore& operator=(ObjectStore&&) = default;
  ObjectStore(const ObjectStore&) = delete;
  ObjectStore& operator=(const ObjectStore&) = delete;

  // Redefining an identical object returns its LID. Throws LocalNameConflict
  // for a differing redefinition, AlreadyFinalized after end-define.
  Lid define(ObjectDef def);

  std::optional<Lid> lookup(ObjectKind kind, std::string_view full_name);

  // Objects defined on this rank, per kind in LID order.
  std::size_t defined_count(ObjectKind kind) const { return defined_[kind_index(kind)]; }
  const ObjectDef& defined(ObjectKind kind, Lid lid) const;
  // All locally defined objects in creation order across kinds.
  std::vector<ObjectDef> defined_objects() const;

  void finalize_gids(const GlobalOrder& order);
  void finalize_gids(GidResolver resolver);
  bool finalized() const noexcept { return finalized_; }

  Gid gid(ObjectKind kind, Lid lid) const;
  std::optional<Lid> lid_of_gid(ObjectKind kind, Gid gid) const;

  // Throws NotFinalized before end-define, NoSuchObject when the file has no
  // such object.
  Lid inquire(ObjectKind kind, std::string_view full_name);

  // Name comparisons made by the per-kind lookup tables.
  std::uint64_t comparisons() const;

 private:
  struct Entry {
    std::string full_name;
    std::optional<ObjectDef> def;  // empty for objects known only by inquiry
    Gid gid = 0;
  };

  struct PerKind {
    std::deque<Entry> entries;  // indexed by LID; stable addresses for the table
    NameHashTable table;
    std::unordered_map<Gid, Lid> gid_to_lid;
    explicit PerKind(std::size_t slots) : table(slots) {}
  };

  std::vector<PerKind> kinds_;
  std::array<std::size_t, kKindCount> defined_{};
  std::vector<std::pair<ObjectKind, Lid>> creation_order_;
  GidResolver resolver_;
  bool finalized_ = false;
};

}  // namespace parahead
