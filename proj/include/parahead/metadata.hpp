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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace parahead {

// External type codes, as stored in the file.
enum class TypeTag : std::uint32_t {
  Byte = 1,
  Char = 2,
  Short = 3,
  Int = 4,
  Float = 5,
  Double = 6,
  Int64 = 10,
};

std::uint64_t type_size(TypeTag tag);
std::string_view to_string(TypeTag tag);
std::optional<TypeTag> type_from_code(std::uint32_t code);

// Attribute payload; the alternative fixes the external type.
using AttributeValues = std::variant<std::vector<std::int8_t>,   // Byte
                                     std::string,                // Char
                                     std::vector<std::int16_t>,  // Short
                                     std::vector<std::int32_t>,  // Int
                                     std::vector<float>,         // Float
                                     std::vector<double>,        // Double
                                     std::vector<std::int64_t>>; // Int64

TypeTag type_of(const AttributeValues& values);
std::uint64_t element_count(const AttributeValues& values);

struct DimensionDef {
  std::string name;
  std::uint64_t length = 1;

  friend bool operator==(const DimensionDef&, const DimensionDef&) = default;
};

struct AttributeDef {
  std::string name;
  AttributeValues values;

  TypeTag type() const { return type_of(values); }

  friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

struct VariableDef {
  std::string name;
  std::vector<std::uint64_t> dim_ids;  // GIDs into the enclosing header's dims
  TypeTag type = TypeTag::Int;
  std::vector<AttributeDef> attributes;
  std::uint64_t begin = 0;
  std::uint64_t vsize = 0;

  friend bool operator==(const VariableDef&, const VariableDef&) = default;
};

struct Header {
  std::vector<DimensionDef> dims;
  std::vector<AttributeDef> global_atts;
  std::vector<VariableDef> vars;

  friend bool operator==(const Header&, const Header&) = default;
};

// Printable ASCII, non-empty.
bool is_valid_name(std::string_view name);

// Throws InvalidName, DuplicateName, DanglingDimRef or Malformed (zero-length
// dimension, empty numeric attribute).
void validate(const Header& header);

// product(dim lengths) * sizeof(type), rounded up to a multiple of 4.
std::uint64_t variable_size(const Header& header, const VariableDef& var);

// True when every [begin, begin + vsize) region is disjoint and begins
// strictly increase in GID order.
bool offsets_monotonic(const Header& header);

}  // namespace parahead
