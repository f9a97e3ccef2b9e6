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

#include "parahead/metadata.hpp"

#include <limits>
#include <unordered_set>

#include "parahead/error.hpp"

namespace parahead {

std::uint64_t type_size(TypeTag tag) {
  switch (tag) {
    case TypeTag::Byte:
    case TypeTag::Char: return 1;
    case TypeTag::Short: return 2;
    case TypeTag::Int:
    case TypeTag::Float: return 4;
    case TypeTag::Double:
    case TypeTag::Int64: return 8;
  }
  throw Error(ErrorCode::Malformed, "unknown type tag");
}

std::string_view to_string(TypeTag tag) {
  switch (tag) {
    case TypeTag::Byte: return "byte";
    case TypeTag::Char: return "char";
    case TypeTag::Short: return "short";
    case TypeTag::Int: return "int";
    case TypeTag::Float: return "float";
    case TypeTag::Double: return "double";
    case TypeTag::Int64: return "int64";
  }
  return "?";
}

std::optional<TypeTag> type_from_code(std::uint32_t code) {
  switch (code) {
    case 1: return TypeTag::Byte;
    case 2: return TypeTag::Char;
    case 3: return TypeTag::Short;
    case 4: return TypeTag::Int;
    case 5: return TypeTag::Float;
    case 6: return TypeTag::Double;
    case 10: return TypeTag::Int64;
    default: return std::nullopt;
  }
}

TypeTag type_of(const AttributeValues& values) {
  constexpr TypeTag kByIndex[] = {TypeTag::Byte,  TypeTag::Char,   TypeTag::Short, TypeTag::Int,
                                  TypeTag::Float, TypeTag::Double, TypeTag::Int64};
  return kByIndex[values.index()];
}

std::uint64_t element_count(const AttributeValues& values) {
  return std::visit([](const auto& v) -> std::uint64_t { return v.size(); }, values);
}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (c < 0x20 || c > 0x7e) return false;
  }
  return true;
}

namespace {

void check_name(std::string_view what, const std::string& name) {
  if (!is_valid_name(name)) throw Error(ErrorCode::InvalidName, std::string(what) + " name '" + name + "'");
}

void check_attributes(const std::vector<AttributeDef>& atts, std::string_view owner) {
  std::unordered_set<std::string_view> seen;
  for (const auto& att : atts) {
    check_name("attribute", att.name);
    if (!seen.insert(att.name).second) {
      throw Error(ErrorCode::DuplicateName, "attribute '" + att.name + "' on " + std::string(owner));
    }
    if (att.type() != TypeTag::Char && element_count(att.values) == 0) {
      throw Error(ErrorCode::Malformed, "numeric attribute '" + att.name + "' has no values");
    }
  }
}

}  // namespace

void validate(const Header& header) {
  std::unordered_set<std::string_view> names;
  for (const auto& dim : header.dims) {
    check_name("dimension", dim.name);
    if (dim.length == 0) {
      throw Error(ErrorCode::Malformed, "dimension '" + dim.name + "' has zero length (record dimensions are unsupported)");
    }
    if (!names.insert(dim.name).second) throw Error(ErrorCode::DuplicateName, "dimension '" + dim.name + "'");
  }
  check_attributes(header.global_atts, "global attributes");
  names.clear();
  for (const auto& var : header.vars) {
    check_name("variable", var.name);
    if (!names.insert(var.name).second) throw Error(ErrorCode::DuplicateName, "variable '" + var.name + "'");
    for (std::uint64_t id : var.dim_ids) {
      if (id >= header.dims.size()) {
        throw Error(ErrorCode::DanglingDimRef,
                    "variable '" + var.name + "' references dimension id " + std::to_string(id));
      }
    }
    check_attributes(var.attributes, "variable '" + var.name + "'");
  }
}

std::uint64_t variable_size(const Header& header, const VariableDef& var) {
  std::uint64_t count = 1;
  for (std::uint64_t id : var.dim_ids) {
    if (id >= header.dims.size()) {
      throw Error(ErrorCode::DanglingDimRef, "variable '" + var.name + "' references dimension id " + std::to_string(id));
    }
    std::uint64_t len = header.dims[id].length;
    if (len != 0 && count > std::numeric_limits<std::uint64_t>::max() / len) {
      throw Error(ErrorCode::UnrepresentableValue, "variable '" + var.name + "' is too large");
    }
    count *= len;
  }
  std::uint64_t elem = type_size(var.type);
  if (count > (std::numeric_limits<std::uint64_t>::max() - 3) / elem) {
    throw Error(ErrorCode::UnrepresentableValue, "variable '" + var.name + "' is too large");
  }
  return (count * elem + 3) / 4 * 4;
}

bool offsets_monotonic(const Header& header) {
  for (std::size_t i = 1; i < header.vars.size(); ++i) {
    const auto& prev = header.vars[i - 1];
    if (header.vars[i].begin <= prev.begin) return false;
    if (prev.begin + prev.vsize > header.vars[i].begin) return false;
  }
  return true;
}

}  // namespace parahead
