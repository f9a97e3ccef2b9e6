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

#include "parahead/new_format.hpp"

#include <algorithm>
#include <numeric>

#include "parahead/classic_codec.hpp"
#include "parahead/error.hpp"

namespace parahead {

namespace {

constexpr std::uint8_t kIndexMagic[4] = {'C', 'D', 'H', 0x01};

std::uint64_t path_record_size(std::string_view path) { return 8 + pad4(path.size()); }

void check_alignment(std::uint64_t alignment) {
  if (alignment == 0 || (alignment & (alignment - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "alignment " + std::to_string(alignment) + " is not a power of two");
  }
}

std::string read_path(ByteReader& in) {
  std::uint64_t n = in.u64();
  if (n > in.remaining()) throw Error(ErrorCode::Truncated, "block path length " + std::to_string(n));
  std::string path = in.string(n);
  in.skip_padding_to_4();
  if (!is_valid_block_path(path)) throw Error(ErrorCode::InvalidName, "block path '" + path + "'");
  return path;
}

}  // namespace

const IndexEntry* IndexTable::find(std::string_view block_path) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), block_path,
                             [](const IndexEntry& e, std::string_view p) { return e.block_path < p; });
  if (it == entries.end() || it->block_path != block_path) return nullptr;
  return &*it;
}

bool is_valid_block_path(std::string_view path) {
  if (path.empty()) return true;
  if (path.back() == '/') return false;
  for (char c : path) {
    if (c < 0x20 || c > 0x7e) return false;
  }
  return true;
}

SplitName split_full_name(std::string_view full_name) {
  auto slash = full_name.rfind('/');
  if (slash == std::string_view::npos) {
    if (!is_valid_name(full_name)) throw Error(ErrorCode::InvalidName, "'" + std::string(full_name) + "'");
    return {kRootBlock, full_name};
  }
  SplitName split{full_name.substr(0, slash), full_name.substr(slash + 1)};
  if (split.block_path.empty() || split.local_name.empty() || !is_valid_name(split.local_name) ||
      !is_valid_block_path(split.block_path)) {
    throw Error(ErrorCode::InvalidName, "'" + std::string(full_name) + "'");
  }
  return split;
}

std::string join_full_name(std::string_view block_path, std::string_view local_name) {
  if (block_path.empty()) return std::string(local_name);
  std::string out;
  out.reserve(block_path.size() + 1 + local_name.size());
  out.append(block_path).append("/").append(local_name);
  return out;
}

std::uint64_t index_table_size(std::span<const std::string> block_paths) {
  std::uint64_t n = kIndexPrefixSize;
  for (const auto& path : block_paths) n += path_record_size(path) + kIndexEntryFixedSize;
  return n;
}

std::uint64_t index_table_size(const IndexTable& table) {
  std::uint64_t n = kIndexPrefixSize;
  for (const auto& e : table.entries) n += path_record_size(e.block_path) + kIndexEntryFixedSize;
  return n;
}

Bytes encode_index_table(const IndexTable& table) {
  std::vector<const IndexEntry*> order;
  order.reserve(table.entries.size());
  for (const auto& e : table.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const IndexEntry* a, const IndexEntry* b) { return a->block_path < b->block_path; });

  ByteWriter out(index_table_size(table));
  out.raw(ByteView(kIndexMagic, 4));
  out.u64(order.size());
  out.u64(table.header_reserve);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const IndexEntry& e = *order[i];
    if (i > 0 && order[i - 1]->block_path == e.block_path) {
      throw Error(ErrorCode::DuplicateName, "block path '" + e.block_path + "' appears twice");
    }
    if (!is_valid_block_path(e.block_path)) throw Error(ErrorCode::InvalidName, "block path '" + e.block_path + "'");
    out.u64(e.block_path.size());
    out.raw(e.block_path);
    out.pad_to_4();
    out.u64(e.offset);
    out.u64(e.size);
    out.u64(e.n_dims);
    out.u64(e.n_vars);
    out.u64(e.n_atts);
  }
  return std::move(out).take();
}

IndexTable decode_index_table(ByteView bytes) {
  for (std::size_t i = 0; i < std::min<std::size_t>(bytes.size(), 4); ++i) {
    if (bytes[i] != kIndexMagic[i]) throw Error(ErrorCode::BadMagic, "not a partitioned header");
  }
  ByteReader in(bytes);
  in.raw(4);
  std::uint64_t count = in.u64();
  IndexTable table;
  table.header_reserve = in.u64();
  if (count > in.remaining() / (8 + kIndexEntryFixedSize)) {
    throw Error(ErrorCode::Truncated, "index declares " + std::to_string(count) + " entries");
  }
  table.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.block_path = read_path(in);
    e.offset = in.u64();
    e.size = in.u64();
    e.n_dims = in.u64();
    e.n_vars = in.u64();
    e.n_atts = in.u64();
    if (!table.entries.empty()) {
      const auto& prev = table.entries.back().block_path;
      if (prev == e.block_path) throw Error(ErrorCode::DuplicateName, "block path '" + e.block_path + "'");
      if (prev > e.block_path) {
        throw Error(ErrorCode::UnsortedIndex, "'" + e.block_path + "' follows '" + prev + "'");
      }
    }
    table.entries.push_back(std::move(e));
  }

  const std::uint64_t index_end = in.position();
  std::vector<const IndexEntry*> by_offset;
  for (const auto& e : table.entries) {
    if (e.offset < index_end) {
      throw Error(ErrorCode::OverlappingBlocks, "block '" + e.block_path + "' overlaps the index table");
    }
    if (e.offset + e.size < e.offset || e.offset + e.size > table.header_reserve) {
      throw Error(ErrorCode::Malformed, "block '" + e.block_path + "' extends past the header reserve");
    }
    by_offset.push_back(&e);
  }
  std::sort(by_offset.begin(), by_offset.end(),
            [](const IndexEntry* a, const IndexEntry* b) { return a->offset < b->offset; });
  for (std::size_t i = 1; i < by_offset.size(); ++i) {
    if (by_offset[i - 1]->offset + by_offset[i - 1]->size > by_offset[i]->offset) {
      throw Error(ErrorCode::OverlappingBlocks,
                  "blocks '" + by_offset[i - 1]->block_path + "' and '" + by_offset[i]->block_path + "'");
    }
  }
  return table;
}

std::uint64_t block_size(const MetadataBlock& block) {
  return path_record_size(block.block_path) + detail::lists_size(block.content, FormatVersion::Cdf5);
}

Bytes encode_block(const MetadataBlock& block) {
  if (!is_valid_block_path(block.block_path)) {
    throw Error(ErrorCode::InvalidName, "block path '" + block.block_path + "'");
  }
  validate(block.content);
  ByteWriter out(block_size(block));
  out.u64(block.block_path.size());
  out.raw(block.block_path);
  out.pad_to_4();
  detail::encode_lists(out, block.content, FormatVersion::Cdf5);
  return std::move(out).take();
}

MetadataBlock decode_block(ByteView bytes) {
  ByteReader in(bytes);
  MetadataBlock block;
  block.block_path = read_path(in);
  block.content = detail::decode_lists(in, FormatVersion::Cdf5);
  if (!in.at_end()) {
    throw Error(ErrorCode::Malformed, "block '" + block.block_path + "' has " + std::to_string(in.remaining()) +
                                          " trailing bytes");
  }
  return block;
}

BlockExtent extent_of(const MetadataBlock& block) {
  return {block.block_path, block_size(block), block.content.dims.size(), block.content.vars.size(),
          block.content.global_atts.size()};
}

IndexTable layout_extents(std::vector<BlockExtent> extents, std::uint64_t alignment) {
  check_alignment(alignment);
  std::sort(extents.begin(), extents.end(),
            [](const BlockExtent& a, const BlockExtent& b) { return a.block_path < b.block_path; });
  std::vector<std::string> paths;
  paths.reserve(extents.size());
  for (std::size_t i = 0; i < extents.size(); ++i) {
    if (i > 0 && extents[i - 1].block_path == extents[i].block_path) {
      throw Error(ErrorCode::DuplicateName, "block path '" + extents[i].block_path + "' appears twice");
    }
    paths.push_back(extents[i].block_path);
  }

  IndexTable table;
  std::uint64_t cursor = align_up(index_table_size(paths), alignment);
  table.entries.reserve(extents.size());
  for (auto& ext : extents) {
    table.entries.push_back(
        IndexEntry{std::move(ext.block_path), cursor, ext.size, ext.n_dims, ext.n_vars, ext.n_atts});
    cursor += align_up(ext.size, alignment);
  }
  table.header_reserve = cursor;
  return table;
}

IndexTable layout_blocks(std::span<const MetadataBlock> blocks, std::uint64_t alignment) {
  std::vector<BlockExtent> extents;
  extents.reserve(blocks.size());
  for (const auto& b : blocks) extents.push_back(extent_of(b));
  return layout_extents(std::move(extents), alignment);
}

}  // namespace parahead
