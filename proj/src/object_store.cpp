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

#include "parahead/object_store.hpp"

#include <memory>
#include <unordered_map>

#include "parahead/error.hpp"

namespace parahead {

ObjectStore::ObjectStore(std::size_t hash_slots) {
  kinds_.reserve(kKindCount);
  for (std::size_t i = 0; i < kKindCount; ++i) kinds_.emplace_back(hash_slots);
}

Lid ObjectStore::define(ObjectDef def) {
  if (finalized_) throw Error(ErrorCode::AlreadyFinalized, "cannot define '" + def.full_name + "' after end-define");
  const ObjectKind kind = def.kind();
  PerKind& pk = kinds_[kind_index(kind)];
  const Lid next = pk.entries.size();
  Entry& e = pk.entries.emplace_back();
  e.full_name = def.full_name;
  auto hit = pk.table.insert(e.full_name, next);
  if (!hit.inserted) {
    pk.entries.pop_back();
    const Entry& existing = pk.entries[hit.id];
    if (existing.def && *existing.def == def) return hit.id;
    throw Error(ErrorCode::LocalNameConflict,
                std::string(to_string(kind)) + " '" + def.full_name + "' redefined with different metadata");
  }
  e.def = std::move(def);
  ++defined_[kind_index(kind)];
  creation_order_.emplace_back(kind, next);
  return next;
}

std::optional<Lid> ObjectStore::lookup(ObjectKind kind, std::string_view full_name) {
  const std::size_t* lid = kinds_[kind_index(kind)].table.find(full_name);
  if (lid == nullptr) return std::nullopt;
  return *lid;
}

const ObjectDef& ObjectStore::defined(ObjectKind kind, Lid lid) const {
  const PerKind& pk = kinds_[kind_index(kind)];
  if (lid >= pk.entries.size() || !pk.entries[lid].def) {
    throw Error(ErrorCode::NoSuchObject, "no local definition for LID " + std::to_string(lid));
  }
  return *pk.entries[lid].def;
}

std::vector<ObjectDef> ObjectStore::defined_objects() const {
  std::vector<ObjectDef> out;
  out.reserve(creation_order_.size());
  for (auto [kind, lid] : creation_order_) out.push_back(defined(kind, lid));
  return out;
}

void ObjectStore::finalize_gids(const GlobalOrder& order) {
  auto index = std::make_shared<std::array<std::unordered_map<std::string_view, Gid>, kKindCount>>();
  auto names = std::make_shared<GlobalOrder>(order);
  for (std::size_t k = 0; k < kKindCount; ++k) {
    (*index)[k].reserve((*names)[k].size());
    for (std::size_t g = 0; g < (*names)[k].size(); ++g) (*index)[k].emplace((*names)[k][g], g);
  }
  finalize_gids([index, names](ObjectKind kind, std::string_view name) -> std::optional<Gid> {
    const auto& m = (*index)[kind_index(kind)];
    auto it = m.find(name);
    if (it == m.end()) return std::nullopt;
    return it->second;
  });
}

void ObjectStore::finalize_gids(GidResolver resolver) {
  if (finalized_) throw Error(ErrorCode::AlreadyFinalized, "GIDs already assigned");
  for (std::size_t k = 0; k < kKindCount; ++k) {
    PerKind& pk = kinds_[k];
    pk.gid_to_lid.reserve(pk.entries.size());
    for (Lid lid = 0; lid < pk.entries.size(); ++lid) {
      Entry& e = pk.entries[lid];
      auto gid = resolver(kAllKinds[k], e.full_name);
      if (!gid) {
        throw Error(ErrorCode::MissingObject,
                    std::string(to_string(kAllKinds[k])) + " '" + e.full_name + "' missing from the global order");
      }
      e.gid = *gid;
      pk.gid_to_lid.emplace(*gid, lid);
    }
  }
  resolver_ = std::move(resolver);
  finalized_ = true;
}

Gid ObjectStore::gid(ObjectKind kind, Lid lid) const {
  if (!finalized_) throw Error(ErrorCode::NotFinalized, "GIDs are assigned at end-define");
  const PerKind& pk = kinds_[kind_index(kind)];
  if (lid >= pk.entries.size()) throw Error(ErrorCode::NoSuchObject, "LID " + std::to_string(lid));
  return pk.entries[lid].gid;
}

std::optional<Lid> ObjectStore::lid_of_gid(ObjectKind kind, Gid gid) const {
  const auto& m = kinds_[kind_index(kind)].gid_to_lid;
  auto it = m.find(gid);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

Lid ObjectStore::inquire(ObjectKind kind, std::string_view full_name) {
  if (!finalized_) throw Error(ErrorCode::NotFinalized, "inquiry before end-define");
  PerKind& pk = kinds_[kind_index(kind)];
  if (const std::size_t* lid = pk.table.find(full_name)) return *lid;
  auto gid = resolver_(kind, full_name);
  if (!gid) throw Error(ErrorCode::NoSuchObject, std::string(to_string(kind)) + " '" + std::string(full_name) + "'");
  const Lid next = pk.entries.size();
  Entry& e = pk.entries.emplace_back();
  e.full_name = std::string(full_name);
  e.gid = *gid;
  pk.table.insert(e.full_name, next);
  pk.gid_to_lid.emplace(*gid, next);
  return next;
}

std::uint64_t ObjectStore::comparisons() const {
  std::uint64_t total = 0;
  for (const auto& pk : kinds_) total += pk.table.comparisons();
  return total;
}

}  // namespace parahead
