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

#include "parahead/bytes.hpp"
#include "parahead/metadata.hpp"

namespace parahead {

// Classic header versions: CDF-1 (32-bit offsets), CDF-2 (64-bit offsets),
// CDF-5 (64-bit counts and offsets).
enum class FormatVersion : std::uint8_t { Cdf1 = 1, Cdf2 = 2, Cdf5 = 5 };

constexpr FormatVersion kDefaultVersion = FormatVersion::Cdf5;

// List tags of the classic grammar.
inline constexpr std::uint32_t kTagDimension = 0x0A;
inline constexpr std::uint32_t kTagVariable = 0x0B;
inline constexpr std::uint32_t kTagAttribute = 0x0C;

// magic | numrecs | dim_list | gatt_list | var_list, big-endian. numrecs is
// always 0. Throws UnrepresentableValue when a count or offset does not fit
// the version's field width (or an INT64 type is used before CDF-5).
Bytes encode_classic(const Header& header, FormatVersion version = kDefaultVersion);

// Encoded size without materializing the bytes.
std::uint64_t encoded_size(const Header& header, FormatVersion version = kDefaultVersion);

struct ClassicFile {
  Header header;
  FormatVersion version = kDefaultVersion;
  std::size_t header_bytes = 0;  // length of the parsed prefix
};

// Parses the header at the start of `bytes`; trailing bytes (the data
// section) are ignored. Re-encoding the result under the same version
// reproduces bytes[0, header_bytes) exactly.
ClassicFile decode_classic_file(ByteView bytes);
Header decode_classic(ByteView bytes);

// Fills vsize for every variable and assigns begins in GID order, the first
// at align_up(header_reserve, alignment), each next one directly after its
// predecessor. Throws ReserveTooSmall when the encoded header does not fit
// in header_reserve.
Header compute_offsets(Header header, std::uint64_t header_reserve, std::uint64_t alignment,
                       FormatVersion version = kDefaultVersion);

// Same layout rule starting at an absolute data offset; no reserve check.
// Returns the offset just past the last variable.
std::uint64_t assign_data_offsets(Header& header, std::uint64_t data_start);

namespace detail {

// The three-list body shared by classic headers and metadata blocks.
void encode_lists(ByteWriter& out, const Header& header, FormatVersion version);
Header decode_lists(ByteReader& in, FormatVersion version);
std::uint64_t lists_size(const Header& header, FormatVersion version);

// Per-entry encoded sizes (the entry only, no list framing).
std::uint64_t dim_entry_size(const DimensionDef& dim, FormatVersion version);
std::uint64_t att_entry_size(const AttributeDef& att, FormatVersion version);
std::uint64_t var_entry_size(const VariableDef& var, FormatVersion version);
std::uint64_t list_framing_size(FormatVersion version);

void encode_attribute(ByteWriter& out, const AttributeDef& att, FormatVersion version);
AttributeDef decode_attribute(ByteReader& in, FormatVersion version);

}  // namespace detail

}  // namespace parahead
