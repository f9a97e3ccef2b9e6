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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "parahead/bytes.hpp"
#include "parahead/metadata.hpp"
#include "parahead/new_format.hpp"

namespace parahead {

enum class ObjectKind : std::uint8_t { Dimension = 0, Variable = 1, Attribute = 2 };

inline constexpr std::size_t kKindCount = 3;
inline constexpr std::array<ObjectKind, kKindCount> kAllKinds = {ObjectKind::Dimension, ObjectKind::Variable,
                                                                 ObjectKind::Attribute};

std::string_view to_string(ObjectKind kind);

constexpr std::size_t kind_index(ObjectKind kind) { return static_cast<std::size_t>(kind); }

struct DimPayload {
  std::uint64_t length = 1;
  friend bool operator==(const DimPayload&, const DimPayload&) = default;
};

// Dimensions are referenced by full name so definitions compare across
// ranks before any ids exist.
struct VarPayload {
  TypeTag type = TypeTag::Int;
  std::vector<std::string> dims;
  std::vector<AttributeDef> attributes;
  friend bool operator==(const VarPayload&, const VarPayload&) = default;
};

// A global (file- or block-level) attribute.
struct AttPayload {
  AttributeValues values;
  friend bool operator==(const AttPayload&, const AttPayload&) = default;
};

using ObjectPayload = std::variant<DimPayload, VarPayload, AttPayload>;

// A data-object definition as an application creates it: full name
// (optional block path + '/' + local name) and metadata.
struct ObjectDef {
  std::string full_name;
  ObjectPayload payload;

  ObjectKind kind() const { return static_cast<ObjectKind>(payload.index()); }

  friend bool operator==(const ObjectDef&, const ObjectDef&) = default;
};

ObjectDef make_dim(std::string full_name, std::uint64_t length);
ObjectDef make_var(std::string full_name, TypeTag type, std::vector<std::string> dims,
                   std::vector<AttributeDef> attributes = {});
ObjectDef make_att(std::string full_name, AttributeValues values);

// Exchange record: u64 body length | u32 kind | u64 name length, name
// padded to 4 | payload,
// where the payload reuses the classic attribute grammar (CDF-5 widths).
void serialize_object(ByteWriter& out, const ObjectDef& def);
Bytes serialize_object(const ObjectDef& def);
ObjectDef deserialize_object(ByteReader& in);
// Decodes a record body (the bytes after the length prefix, as exposed by
// scan_records).
ObjectDef decode_record_body(ByteView body);

// u64 count | records.
Bytes serialize_objects(std::span<const ObjectDef> defs);
std::vector<ObjectDef> deserialize_objects(ByteView bytes);

// Byte ranges of each record inside a serialize_objects buffer, without
// decoding the payloads.
struct RecordSpan {
  ObjectKind kind;
  std::string_view full_name;
  ByteView record;
};
std::vector<RecordSpan> scan_records(ByteView bytes);

// Size of the object's header entry (CDF-5 widths), i.e. what holding the
// definition costs in serialized metadata. With `local_name` the name is
// charged without its block path, matching block storage.
std::uint64_t metadata_footprint(const ObjectDef& def, bool local_name = false);

using ObjectKey = std::pair<ObjectKind, std::string>;

// The (kind, full_name) -> definition view of a file, independent of format,
// ids and data offsets.
using LogicalSet = std::map<ObjectKey, ObjectDef>;

// Builds a header from definitions listed in GID order per kind. Names are
// stored with `strip_block` removed (pass "" for flat names). Throws
// DanglingDimRef when a variable names a dimension not in `objects`.
Header assemble_header(std::span<const ObjectDef> objects, std::string_view strip_block = kRootBlock);

// Inverse of assemble_header: definitions in list order (dims, atts, vars),
// full names joined with `block_path`.
std::vector<ObjectDef> disassemble_header(const Header& header, std::string_view block_path = kRootBlock);

LogicalSet logical_set(const Header& header);
LogicalSet logical_set(std::span<const MetadataBlock> blocks);
void insert_all(LogicalSet& set, std::span<const ObjectDef> defs);

}  // namespace parahead
