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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parahead/bytes.hpp"
#include "parahead/metadata.hpp"

namespace parahead {

// Objects whose name carries no '/' live in the root block.
inline constexpr std::string_view kRootBlock = "";

inline constexpr std::uint64_t kDefaultBlockAlignment = 4;

struct IndexEntry {
  std::string block_path;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  std::uint64_t n_dims = 0;
  std::uint64_t n_vars = 0;
  std::uint64_t n_atts = 0;  // global attributes of the block only

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

struct IndexTable {
  std::vector<IndexEntry> entries;  // sorted by block_path
  std::uint64_t header_reserve = 0;  // index table + all blocks, aligned

  const IndexEntry* find(std::string_view block_path) const;

  friend bool operator==(const IndexTable&, const IndexTable&) = default;
};

struct MetadataBlock {
  std::string block_path;
  Header content;  // dim ids are block-local

  friend bool operator==(const MetadataBlock&, const MetadataBlock&) = default;
};

// Summary of a block sufficient to place it: what layout needs from ranks
// that do not hold the block's content.
struct BlockExtent {
  std::string block_path;
  std::uint64_t size = 0;
  std::uint64_t n_dims = 0;
  std::uint64_t n_vars = 0;
  std::uint64_t n_atts = 0;
};

BlockExtent extent_of(const MetadataBlock& block);

// 'C' 'D' 'H' 0x01 | u64 count | u64 header_reserve | entries, where each
// entry is u64 path length, path padded to 4, then u64 offset, size, n_dims,
// n_vars, n_atts. Entries are written in path order regardless of input order.
Bytes encode_index_table(const IndexTable& table);
std::uint64_t index_table_size(std::span<const std::string> block_paths);
std::uint64_t index_table_size(const IndexTable& table);

// Throws BadMagic, Truncated, UnsortedIndex, DuplicateName, OverlappingBlocks.
IndexTable decode_index_table(ByteView bytes);

inline constexpr std::size_t kIndexPrefixSize = 20;
inline constexpr std::size_t kIndexEntryFixedSize = 40;

// u64 path length | path padded to 4 | dim_list | gatt_list | var_list, with
// CDF-5 field widths.
Bytes encode_block(const MetadataBlock& block);
std::uint64_t block_size(const MetadataBlock& block);
MetadataBlock decode_block(ByteView bytes);

// Places blocks after the index table in path order, each aligned to
// `alignment`.
IndexTable layout_blocks(std::span<const MetadataBlock> blocks, std::uint64_t alignment = kDefaultBlockAlignment);
IndexTable layout_extents(std::vector<BlockExtent> extents, std::uint64_t alignment = kDefaultBlockAlignment);

bool is_valid_block_path(std::string_view path);

struct SplitName {
  std::string_view block_path;
  std::string_view local_name;
};

// Splits at the last '/'. Names without '/' map to the root block. Throws
// InvalidName for an empty block path spelled with a slash ("/x") or an
// empty local part.
SplitName split_full_name(std::string_view full_name);
std::string join_full_name(std::string_view block_path, std::string_view local_name);

}  // namespace parahead
