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

#include "parahead/object.hpp"

#include <unordered_map>

#include "parahead/classic_codec.hpp"
#include "parahead/error.hpp"

namespace parahead {

namespace {

constexpr FormatVersion kRecordVersion = FormatVersion::Cdf5;

void put_name(ByteWriter& out, std::string_view name) {
  out.u64(name.size());
  out.raw(name);
  out.pad_to_4();
}

std::string get_name(ByteReader& in) {
  std::uint64_t n = in.u64();
  if (n > in.remaining()) throw Error(ErrorCode::Truncated, "name length " + std::to_string(n));
  std::string s = in.string(n);
  in.skip_padding_to_4();
  return s;
}

std::uint64_t name_size(std::size_t len) { return 8 + pad4(len); }

std::uint64_t att_footprint(std::size_t name_len, const AttributeValues& values) {
  return name_size(name_len) + 4 + 8 + pad4(element_count(values) * type_size(type_of(values)));
}

std::string_view local_part(std::string_view full_name, std::string_view strip_block) {
  if (strip_block.empty()) return full_name;
  if (full_name.size() <= strip_block.size() + 1 || full_name.compare(0, strip_block.size(), strip_block) != 0 ||
      full_name[strip_block.size()] != '/') {
    throw Error(ErrorCode::InvalidName,
                "'" + std::string(full_name) + "' is not in block '" + std::string(strip_block) + "'");
  }
  return full_name.substr(strip_block.size() + 1);
}

}  // namespace

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Dimension: return "dimension";
    case ObjectKind::Variable: return "variable";
    case ObjectKind::Attribute: return "attribute";
  }
  return "?";
}

ObjectDef make_dim(std::string full_name, std::uint64_t length) {
  return ObjectDef{std::move(full_name), DimPayload{length}};
}

ObjectDef make_var(std::string full_name, TypeTag type, std::vector<std::string> dims,
                   std::vector<AttributeDef> attributes) {
  return ObjectDef{std::move(full_name), VarPayload{type, std::move(dims), std::move(attributes)}};
}

ObjectDef make_att(std::string full_name, AttributeValues values) {
  return ObjectDef{std::move(full_name), AttPayload{std::move(values)}};
}

void serialize_object(ByteWriter& out, const ObjectDef& def) {
  ByteWriter body;
  body.u32(static_cast<std::uint32_t>(def.kind()));
  put_name(body, def.full_name);
  std::visit(
      [&body](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DimPayload>) {
          body.u64(p.length);
        } else if constexpr (std::is_same_v<T, VarPayload>) {
          body.u32(static_cast<std::uint32_t>(p.type));
          body.u64(p.dims.size());
          for (const auto& d : p.dims) put_name(body, d);
          body.u64(p.attributes.size());
          for (const auto& a : p.attributes) detail::encode_attribute(body, a, kRecordVersion);
        } else {
          detail::encode_attribute(body, AttributeDef{"", p.values}, kRecordVersion);
        }
      },
      def.payload);
  out.u64(body.size());
  out.raw(body.bytes());
}

Bytes serialize_object(const ObjectDef& def) {
  ByteWriter out;
  serialize_object(out, def);
  return std::move(out).take();
}

ObjectDef deserialize_object(ByteReader& in) {
  std::uint64_t len = in.u64();
  if (len > in.remaining()) throw Error(ErrorCode::Truncated, "object record of " + std::to_string(len) + " bytes");
  return decode_record_body(in.raw(len));
}

ObjectDef decode_record_body(ByteView bytes) {
  ByteReader body(bytes);
  std::uint32_t kind = body.u32();
  ObjectDef def;
  def.full_name = get_name(body);
  switch (kind) {
    case 0: def.payload = DimPayload{body.u64()}; break;
    case 1: {
      VarPayload var;
      auto tag = type_from_code(body.u32());
      if (!tag) throw Error(ErrorCode::Malformed, "variable '" + def.full_name + "' has an unknown type");
      var.type = *tag;
      std::uint64_t ndims = body.u64();
      if (ndims > body.remaining() / 8) throw Error(ErrorCode::Truncated, "dimension list");
      for (std::uint64_t i = 0; i < ndims; ++i) var.dims.push_back(get_name(body));
      std::uint64_t natts = body.u64();
      if (natts > body.remaining() / 8) throw Error(ErrorCode::Truncated, "attribute list");
      for (std::uint64_t i = 0; i < natts; ++i) var.attributes.push_back(detail::decode_attribute(body, kRecordVersion));
      def.payload = std::move(var);
      break;
    }
    case 2: def.payload = AttPayload{detail::decode_attribute(body, kRecordVersion).values}; break;
    default: throw Error(ErrorCode::Malformed, "unknown object kind " + std::to_string(kind));
  }
  if (!body.at_end()) throw Error(ErrorCode::Malformed, "trailing bytes in record '" + def.full_name + "'");
  return def;
}

Bytes serialize_objects(std::span<const ObjectDef> defs) {
  ByteWriter out;
  out.u64(defs.size());
  for (const auto& d : defs) serialize_object(out, d);
  return std::move(out).take();
}

std::vector<ObjectDef> deserialize_objects(ByteView bytes) {
  ByteReader in(bytes);
  std::uint64_t n = in.u64();
  if (n > in.remaining() / 8) throw Error(ErrorCode::Truncated, "object count " + std::to_string(n));
  std::vector<ObjectDef> defs;
  defs.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) defs.push_back(deserialize_object(in));
  if (!in.at_end()) throw Error(ErrorCode::Malformed, "trailing bytes after object records");
  return defs;
}

std::vector<RecordSpan> scan_records(ByteView bytes) {
  ByteReader in(bytes);
  std::uint64_t n = in.u64();
  if (n > in.remaining() / 8) throw Error(ErrorCode::Truncated, "object count " + std::to_string(n));
  std::vector<RecordSpan> spans;
  spans.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t len = in.u64();
    if (len > in.remaining()) throw Error(ErrorCode::Truncated, "object record of " + std::to_string(len) + " bytes");
    ByteView record = in.raw(len);
    ByteReader head(record);
    std::uint32_t kind = head.u32();
    if (kind >= kKindCount) throw Error(ErrorCode::Malformed, "unknown object kind " + std::to_string(kind));
    std::uint64_t name_len = head.u64();
    ByteView name = head.raw(name_len);
    spans.push_back(RecordSpan{static_cast<ObjectKind>(kind),
                               std::string_view(reinterpret_cast<const char*>(name.data()), name.size()), record});
  }
  return spans;
}

std::uint64_t metadata_footprint(const ObjectDef& def, bool local_name) {
  std::size_t name_len = local_name ? split_full_name(def.full_name).local_name.size() : def.full_name.size();
  return std::visit(
      [name_len](const auto& p) -> std::uint64_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DimPayload>) {
          return name_size(name_len) + 8;
        } else if constexpr (std::is_same_v<T, VarPayload>) {
          std::uint64_t atts = 12;
          for (const auto& a : p.attributes) atts += att_footprint(a.name.size(), a.values);
          return name_size(name_len) + 8 * (1 + p.dims.size()) + atts + 4 + 8 + 8;
        } else {
          return att_footprint(name_len, p.values);
        }
      },
      def.payload);
}

Header assemble_header(std::span<const ObjectDef> objects, std::string_view strip_block) {
  Header header;
  std::unordered_map<std::string_view, std::uint64_t> dim_ids;
  for (const auto& obj : objects) {
    if (obj.kind() != ObjectKind::Dimension) continue;
    const auto& p = std::get<DimPayload>(obj.payload);
    dim_ids.emplace(obj.full_name, header.dims.size());
    header.dims.push_back(DimensionDef{std::string(local_part(obj.full_name, strip_block)), p.length});
  }
  for (const auto& obj : objects) {
    if (obj.kind() == ObjectKind::Attribute) {
      header.global_atts.push_back(
          AttributeDef{std::string(local_part(obj.full_name, strip_block)), std::get<AttPayload>(obj.payload).values});
    } else if (obj.kind() == ObjectKind::Variable) {
      const auto& p = std::get<VarPayload>(obj.payload);
      VariableDef var;
      var.name = std::string(local_part(obj.full_name, strip_block));
      var.type = p.type;
      var.attributes = p.attributes;
      var.dim_ids.reserve(p.dims.size());
      for (const auto& d : p.dims) {
        auto it = dim_ids.find(d);
        if (it == dim_ids.end()) {
          throw Error(ErrorCode::DanglingDimRef, "variable '" + obj.full_name + "' uses undefined dimension '" + d + "'");
        }
        var.dim_ids.push_back(it->second);
      }
      header.vars.push_back(std::move(var));
    }
  }
  return header;
}

std::vector<ObjectDef> disassemble_header(const Header& header, std::string_view block_path) {
  std::vector<ObjectDef> defs;
  defs.reserve(header.dims.size() + header.global_atts.size() + header.vars.size());
  for (const auto& dim : header.dims) defs.push_back(make_dim(join_full_name(block_path, dim.name), dim.length));
  for (const auto& att : header.global_atts) defs.push_back(make_att(join_full_name(block_path, att.name), att.values));
  for (const auto& var : header.vars) {
    std::vector<std::string> dims;
    dims.reserve(var.dim_ids.size());
    for (std::uint64_t id : var.dim_ids) {
      if (id >= header.dims.size()) {
        throw Error(ErrorCode::DanglingDimRef, "variable '" + var.name + "' references dimension id " + std::to_string(id));
      }
      dims.push_back(join_full_name(block_path, header.dims[id].name));
    }
    defs.push_back(make_var(join_full_name(block_path, var.name), var.type, std::move(dims), var.attributes));
  }
  return defs;
}

void insert_all(LogicalSet& set, std::span<const ObjectDef> defs) {
  for (const auto& d : defs) {
    if (!set.emplace(ObjectKey{d.kind(), d.full_name}, d).second) {
      throw Error(ErrorCode::DuplicateName, std::string(to_string(d.kind())) + " '" + d.full_name + "'");
    }
  }
}

LogicalSet logical_set(const Header& header) {
  LogicalSet set;
  insert_all(set, disassemble_header(header));
  return set;
}

LogicalSet logical_set(std::span<const MetadataBlock> blocks) {
  LogicalSet set;
  for (const auto& b : blocks) insert_all(set, disassemble_header(b.content, b.block_path));
  return set;
}

}  // namespace parahead
