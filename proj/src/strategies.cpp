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

#include "parahead/strategies.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <ranges>
#include <unordered_set>

#include "parahead/classic_codec.hpp"
#include "parahead/consistency.hpp"
#include "parahead/error.hpp"
#include "parahead/memory_meter.hpp"

namespace parahead {

namespace {

using Clock = std::chrono::steady_clock;

struct RankContext {
  int rank;
  Communicator& comm;
  const Workload& workload;
  const RunOptions& options;
  std::shared_ptr<FileImage> image;
  RankReport& report;
  ObjectStore& store;
  MemoryMeter mem;

  const std::vector<ObjectDef>& own() const { return workload.per_rank[rank]; }
};

// Phases start together so each rank's duration covers the same step.
template <typename F>
double timed_phase(RankContext& c, F&& body) {
  c.comm.barrier(c.rank);
  const auto t0 = Clock::now();
  body();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

using RankSpans = std::vector<std::vector<RecordSpan>>;
using KindRecords = std::array<std::vector<NameRecord>, kKindCount>;

// `sources` pairs each origin rank with its records.
KindRecords name_records(const std::vector<std::pair<int, const std::vector<RecordSpan>*>>& sources) {
  KindRecords out;
  for (const auto& [rank, spans] : sources) {
    for (const auto& s : *spans) {
      out[kind_index(s.kind)].push_back(NameRecord{s.full_name, rank, fnv1a64(s.record), s.record});
    }
  }
  return out;
}

KindRecords name_records(const RankSpans& spans) {
  std::vector<std::pair<int, const std::vector<RecordSpan>*>> sources;
  for (std::size_t r = 0; r < spans.size(); ++r) sources.emplace_back(static_cast<int>(r), &spans[r]);
  return name_records(sources);
}

struct CheckOutcome {
  std::vector<Conflict> conflicts;
  std::uint64_t string_comparisons = 0;
  std::uint64_t payload_comparisons = 0;
};

void sort_conflicts(std::vector<Conflict>& conflicts) {
  std::sort(conflicts.begin(), conflicts.end(), [](const Conflict& a, const Conflict& b) {
    return std::tie(a.full_name, a.kind) < std::tie(b.full_name, b.kind);
  });
}

CheckOutcome check_records(const KindRecords& records, std::size_t k, bool use_sort) {
  CheckOutcome out;
  for (ObjectKind kind : kAllKinds) {
    const auto& recs = records[kind_index(kind)];
    CheckReport report = use_sort ? sort_check(recs) : hash_check(recs, k);
    out.string_comparisons += report.string_comparisons;
    out.payload_comparisons += report.payload_comparisons;
    for (auto& c : report.conflicts) {
      out.conflicts.push_back(Conflict{std::string(to_string(kind)), std::move(c.full_name), std::move(c.ranks),
                                       std::move(c.detail)});
    }
  }
  sort_conflicts(out.conflicts);
  return out;
}

// Per kind: ranks ascending, creation order, first definition of each name.
struct Merged {
  std::array<std::vector<const RecordSpan*>, kKindCount> kinds;

  GlobalOrder order() const {
    GlobalOrder out;
    for (std::size_t k = 0; k < kKindCount; ++k) {
      out[k].reserve(kinds[k].size());
      for (const auto* s : kinds[k]) out[k].emplace_back(s->full_name);
    }
    return out;
  }

  std::vector<ObjectDef> objects() const {
    std::vector<ObjectDef> out;
    for (const auto& list : kinds) {
      for (const auto* s : list) out.push_back(decode_record_body(s->record));
    }
    return out;
  }
};

Merged merge_first_seen(const std::vector<const std::vector<RecordSpan>*>& per_rank) {
  Merged m;
  std::array<std::unordered_set<std::string_view>, kKindCount> seen;
  for (const auto* spans : per_rank) {
    for (const auto& s : *spans) {
      const auto k = kind_index(s.kind);
      if (seen[k].insert(s.full_name).second) m.kinds[k].push_back(&s);
    }
  }
  return m;
}

Merged merge_first_seen(const RankSpans& spans) {
  std::vector<const std::vector<RecordSpan>*> ptrs;
  for (const auto& s : spans) ptrs.push_back(&s);
  return merge_first_seen(ptrs);
}

Bytes classic_header_bytes(const std::vector<ObjectDef>& objects, const RunOptions& options) {
  Header header = assemble_header(objects);
  validate(header);
  const std::uint64_t reserve = encoded_size(header, FormatVersion::Cdf5);
  header = compute_offsets(std::move(header), reserve, options.header_alignment, FormatVersion::Cdf5);
  return encode_classic(header, FormatVersion::Cdf5);
}

RankSpans scan_all(const std::vector<Bytes>& buffers) {
  RankSpans spans;
  spans.reserve(buffers.size());
  for (const auto& b : buffers) spans.push_back(scan_records(b));
  return spans;
}

// ---- classic-format strategies ------------------------------------------

void run_lib_rank(RankContext& c, bool use_sort) {
  RankReport& rep = c.report;
  rep.times.define = timed_phase(c, [&] {
    for (const auto& obj : c.own()) {
      c.store.define(obj);
      c.mem.charge(metadata_footprint(obj));
    }
  });

  std::vector<Bytes> gathered;
  rep.times.exchange = timed_phase(c, [&] {
    Bytes mine = serialize_objects(c.store.defined_objects());
    gathered = c.comm.allgatherv(c.rank, mine);
    for (int r = 0; r < c.comm.size(); ++r) {
      if (r != c.rank) c.mem.charge(gathered[r].size());
    }
  });

  RankSpans spans;
  rep.times.check = timed_phase(c, [&] {
    spans = scan_all(gathered);
    auto outcome = check_records(name_records(spans), c.options.hash_size, use_sort);
    rep.string_comparisons += outcome.string_comparisons;
    rep.payload_comparisons += outcome.payload_comparisons;
    if (!outcome.conflicts.empty()) throw ConsistencyError(std::move(outcome.conflicts));
  });

  GlobalOrder order;
  rep.times.write = timed_phase(c, [&] {
    Merged merged = merge_first_seen(spans);
    order = merged.order();
    if (c.rank == 0) c.image->write(0, 0, classic_header_bytes(merged.objects(), c.options), "header");
  });

  rep.times.close = timed_phase(c, [&] {
    c.store.finalize_gids(order);
    spans.clear();
    gathered.clear();
    c.mem.release(c.mem.current());
  });
}

void run_app_rank(RankContext& c) {
  RankReport& rep = c.report;
  std::vector<Bytes> gathered;
  rep.times.exchange = timed_phase(c, [&] {
    for (const auto& obj : c.own()) c.mem.charge(metadata_footprint(obj));
    Bytes mine = serialize_objects(c.own());
    gathered = c.comm.allgatherv(c.rank, mine);
    for (int r = 0; r < c.comm.size(); ++r) {
      if (r != c.rank) c.mem.charge(gathered[r].size());
    }
  });

  RankSpans spans;
  rep.times.check = timed_phase(c, [&] {
    spans = scan_all(gathered);
    auto outcome = check_records(name_records(spans), c.options.hash_size, false);
    rep.string_comparisons += outcome.string_comparisons;
    rep.payload_comparisons += outcome.payload_comparisons;
    if (!outcome.conflicts.empty()) throw ConsistencyError(std::move(outcome.conflicts));
  });

  // Every rank now creates the full, identical object set.
  GlobalOrder order;
  rep.times.define = timed_phase(c, [&] {
    Merged merged = merge_first_seen(spans);
    order = merged.order();
    const std::uint64_t held = c.mem.current();
    for (auto& obj : merged.objects()) {
      c.mem.charge(metadata_footprint(obj));
      c.store.define(std::move(obj));
    }
    c.mem.release(held);
    spans.clear();
    gathered.clear();
  });

  rep.times.write = timed_phase(c, [&] {
    if (c.rank == 0) c.image->write(0, 0, classic_header_bytes(c.store.defined_objects(), c.options), "header");
  });

  rep.times.close = timed_phase(c, [&] {
    c.store.finalize_gids(order);
    c.mem.release(c.mem.current());
  });
}

// ---- new format -----------------------------------------------------------

// What every rank learns about every block without seeing its content.
struct BlockRecord {
  std::string path;
  int rank = 0;
  std::uint64_t digest = 0;
  std::uint64_t size = 0;
  std::uint64_t data_bytes = 0;
  std::uint32_t n_dims = 0;
  std::uint32_t n_vars = 0;
  std::uint32_t n_atts = 0;
};

void put_path(ByteWriter& out, std::string_view path) {
  out.u32(static_cast<std::uint32_t>(path.size()));
  out.raw(path);
  out.pad_to_4();
}

std::string get_path(ByteReader& in) {
  std::uint32_t n = in.u32();
  std::string s = in.string(n);
  in.skip_padding_to_4();
  return s;
}

std::uint32_t narrow_count(std::uint64_t n) {
  if (n > UINT32_MAX) throw Error(ErrorCode::UnrepresentableValue, "block object count " + std::to_string(n));
  return static_cast<std::uint32_t>(n);
}

Bytes encode_block_records(const std::vector<BlockRecord>& records) {
  ByteWriter out;
  out.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    put_path(out, r.path);
    out.u64(r.digest);
    out.u64(r.size);
    out.u64(r.data_bytes);
    out.u32(r.n_dims);
    out.u32(r.n_vars);
    out.u32(r.n_atts);
  }
  return std::move(out).take();
}

std::vector<BlockRecord> decode_block_records(ByteView bytes, int rank) {
  ByteReader in(bytes);
  std::uint32_t n = in.u32();
  std::vector<BlockRecord> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    BlockRecord r;
    r.path = get_path(in);
    r.rank = rank;
    r.digest = in.u64();
    r.size = in.u64();
    r.data_bytes = in.u64();
    r.n_dims = in.u32();
    r.n_vars = in.u32();
    r.n_atts = in.u32();
    out.push_back(std::move(r));
  }
  return out;
}

struct SharedExtent {
  BlockExtent extent;
  std::uint64_t data_bytes = 0;
};

Bytes encode_resolution(const std::vector<Conflict>& conflicts, const std::vector<SharedExtent>& extents) {
  ByteWriter out;
  out.u32(static_cast<std::uint32_t>(conflicts.size()));
  for (const auto& c : conflicts) {
    put_path(out, c.kind);
    put_path(out, c.full_name);
    out.u32(static_cast<std::uint32_t>(c.ranks.size()));
    for (int r : c.ranks) out.u32(static_cast<std::uint32_t>(r));
    put_path(out, c.detail);
  }
  out.u32(static_cast<std::uint32_t>(extents.size()));
  for (const auto& e : extents) {
    put_path(out, e.extent.block_path);
    out.u64(e.extent.size);
    out.u64(e.data_bytes);
    out.u64(e.extent.n_dims);
    out.u64(e.extent.n_vars);
    out.u64(e.extent.n_atts);
  }
  return std::move(out).take();
}

void decode_resolution(ByteView bytes, std::vector<Conflict>& conflicts, std::vector<SharedExtent>& extents) {
  ByteReader in(bytes);
  std::uint32_t nc = in.u32();
  for (std::uint32_t i = 0; i < nc; ++i) {
    Conflict c;
    c.kind = get_path(in);
    c.full_name = get_path(in);
    std::uint32_t nr = in.u32();
    for (std::uint32_t j = 0; j < nr; ++j) c.ranks.push_back(static_cast<int>(in.u32()));
    c.detail = get_path(in);
    conflicts.push_back(std::move(c));
  }
  std::uint32_t ne = in.u32();
  for (std::uint32_t i = 0; i < ne; ++i) {
    SharedExtent e;
    e.extent.block_path = get_path(in);
    e.extent.size = in.u64();
    e.data_bytes = in.u64();
    e.extent.n_dims = in.u64();
    e.extent.n_vars = in.u64();
    e.extent.n_atts = in.u64();
    extents.push_back(std::move(e));
  }
}

// Positions of each object within its block's lists.
using PositionMap = std::array<std::unordered_map<std::string, std::uint64_t>, kKindCount>;

void add_positions(PositionMap& map, const MetadataBlock& block) {
  const Header& h = block.content;
  for (std::size_t i = 0; i < h.dims.size(); ++i)
    map[kind_index(ObjectKind::Dimension)].emplace(join_full_name(block.block_path, h.dims[i].name), i);
  for (std::size_t i = 0; i < h.vars.size(); ++i)
    map[kind_index(ObjectKind::Variable)].emplace(join_full_name(block.block_path, h.vars[i].name), i);
  for (std::size_t i = 0; i < h.global_atts.size(); ++i)
    map[kind_index(ObjectKind::Attribute)].emplace(join_full_name(block.block_path, h.global_atts[i].name), i);
}

// Objects of each kind in all blocks before `path`, in index order.
std::array<std::uint64_t, kKindCount> kind_prefix(const IndexTable& index, std::string_view path) {
  std::array<std::uint64_t, kKindCount> prefix{};
  for (const auto& e : index.entries) {
    if (e.block_path >= path) break;
    prefix[kind_index(ObjectKind::Dimension)] += e.n_dims;
    prefix[kind_index(ObjectKind::Variable)] += e.n_vars;
    prefix[kind_index(ObjectKind::Attribute)] += e.n_atts;
  }
  return prefix;
}

class SharedImageSource final : public ByteSource {
 public:
  explicit SharedImageSource(std::shared_ptr<const FileImage> image) : image_(std::move(image)) {}
  std::uint64_t size() const override { return image_->size(); }

 protected:
  void read_into(std::uint64_t offset, std::uint8_t* out, std::uint64_t n) override {
    std::copy_n(image_->bytes().begin() + static_cast<std::ptrdiff_t>(offset), n, out);
  }

 private:
  std::shared_ptr<const FileImage> image_;
};

void run_new_format_rank(RankContext& c) {
  RankReport& rep = c.report;
  const std::size_t k = c.options.hash_size;

  // Own objects grouped by block, creation order kept within each block.
  std::map<std::string, std::vector<ObjectDef>> own_blocks;
  rep.times.define = timed_phase(c, [&] {
    for (const auto& obj : c.own()) {
      c.store.define(obj);
      own_blocks[std::string(split_full_name(obj.full_name).block_path)].push_back(obj);
      c.mem.charge(metadata_footprint(obj, true));
    }
    rep.string_comparisons += c.store.comparisons();
  });

  std::map<std::string, MetadataBlock> built;  // own blocks as this rank would write them
  std::map<std::string, std::uint64_t> own_data_bytes;
  std::vector<Bytes> gathered_records;
  rep.times.exchange = timed_phase(c, [&] {
    std::vector<BlockRecord> mine;
    for (const auto& [path, objects] : own_blocks) {
      MetadataBlock block{path, assemble_header(objects, path)};
      validate(block.content);
      const std::uint64_t data = assign_data_offsets(block.content, 0);
      const Bytes encoded = encode_block(block);
      mine.push_back(BlockRecord{path, c.rank, fnv1a64(encoded), encoded.size(), data,
                                 narrow_count(block.content.dims.size()), narrow_count(block.content.vars.size()),
                                 narrow_count(block.content.global_atts.size())});
      own_data_bytes[path] = data;
      built.emplace(path, std::move(block));
    }
    gathered_records = c.comm.allgatherv(c.rank, encode_block_records(mine));
    for (int r = 0; r < c.comm.size(); ++r) {
      if (r != c.rank) c.mem.charge(gathered_records[r].size());
    }
  });

  std::vector<BlockRecord> records;
  std::map<std::string, std::vector<int>> sharers;       // shared blocks only
  std::map<std::string, MetadataBlock> merged_shared;    // shared blocks this rank belongs to
  std::vector<SharedExtent> shared_extents;
  rep.times.check = timed_phase(c, [&] {
    for (int r = 0; r < c.comm.size(); ++r) {
      auto part = decode_block_records(gathered_records[r], r);
      records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    std::vector<NameRecord> names;
    names.reserve(records.size());
    for (const auto& r : records) names.push_back(NameRecord{r.path, r.rank, 0, {}});
    CheckReport report = hash_check(names, k);
    rep.string_comparisons += report.string_comparisons;
    for (auto& g : report.shared_sets) sharers.emplace(std::move(g.full_name), std::move(g.ranks));
    if (sharers.empty()) return;

    // Content of shared blocks goes to the ranks that share them.
    ByteWriter mine;
    std::uint32_t n_mine = 0;
    for (const auto& [path, ranks] : sharers) {
      if (own_blocks.count(path) != 0) ++n_mine;
    }
    mine.u32(n_mine);
    for (const auto& [path, ranks] : sharers) {
      auto it = own_blocks.find(path);
      if (it == own_blocks.end()) continue;
      put_path(mine, path);
      Bytes objs = serialize_objects(it->second);
      mine.u64(objs.size());
      mine.raw(objs);
    }
    const auto contents = c.comm.allgatherv(c.rank, mine.bytes());

    // Per rank: block path -> serialized objects.
    std::vector<std::map<std::string, ByteView>> sections(c.comm.size());
    for (int r = 0; r < c.comm.size(); ++r) {
      ByteReader in(contents[r]);
      std::uint32_t n = in.u32();
      for (std::uint32_t i = 0; i < n; ++i) {
        std::string path = get_path(in);
        std::uint64_t len = in.u64();
        sections[r].emplace(std::move(path), in.raw(len));
      }
    }

    std::vector<Conflict> conflicts;
    for (const auto& [path, ranks] : sharers) {
      if (!std::binary_search(ranks.begin(), ranks.end(), c.rank)) continue;
      std::vector<std::vector<RecordSpan>> spans;
      spans.reserve(ranks.size());
      for (int r : ranks) {
        ByteView section = sections[r].at(path);
        if (r != c.rank) c.mem.charge(section.size());
        spans.push_back(scan_records(section));
      }
      const bool writer = ranks.front() == c.rank;
      if (writer) {
        std::vector<std::pair<int, const std::vector<RecordSpan>*>> sources;
        for (std::size_t i = 0; i < ranks.size(); ++i) sources.emplace_back(ranks[i], &spans[i]);
        auto outcome = check_records(name_records(sources), k, false);
        rep.string_comparisons += outcome.string_comparisons;
        rep.payload_comparisons += outcome.payload_comparisons;
        conflicts.insert(conflicts.end(), outcome.conflicts.begin(), outcome.conflicts.end());
        if (!outcome.conflicts.empty()) continue;
      }
      std::vector<const std::vector<RecordSpan>*> ptrs;
      for (const auto& s : spans) ptrs.push_back(&s);
      MetadataBlock block{path, assemble_header(merge_first_seen(ptrs).objects(), path)};
      const std::uint64_t data = assign_data_offsets(block.content, 0);
      if (writer) {
        shared_extents.push_back(SharedExtent{extent_of(block), data});
      }
      merged_shared.emplace(path, std::move(block));
    }

    const auto resolutions = c.comm.allgatherv(c.rank, encode_resolution(conflicts, shared_extents));
    conflicts.clear();
    shared_extents.clear();
    for (const auto& r : resolutions) decode_resolution(r, conflicts, shared_extents);
    if (!conflicts.empty()) {
      sort_conflicts(conflicts);
      throw ConsistencyError(std::move(conflicts));
    }
  });

  IndexTable index;
  rep.times.write = timed_phase(c, [&] {
    std::vector<BlockExtent> extents;
    std::map<std::string, std::uint64_t> data_bytes;
    for (const auto& r : records) {
      if (sharers.count(r.path) != 0) continue;
      extents.push_back(BlockExtent{r.path, r.size, r.n_dims, r.n_vars, r.n_atts});
      data_bytes[r.path] = r.data_bytes;
    }
    for (auto& e : shared_extents) {
      data_bytes[e.extent.block_path] = e.data_bytes;
      extents.push_back(std::move(e.extent));
    }
    index = layout_extents(std::move(extents), c.options.block_alignment);

    // The index replaces the per-block records.
    for (int r = 0; r < c.comm.size(); ++r) {
      if (r != c.rank) c.mem.release(gathered_records[r].size());
    }
    gathered_records.clear();
    c.mem.charge(index_table_size(index));

    std::uint64_t data_cursor = index.header_reserve;
    for (const auto& entry : index.entries) {
      const std::uint64_t start = data_cursor;
      data_cursor += data_bytes.at(entry.block_path);
      MetadataBlock* block = nullptr;
      if (auto it = sharers.find(entry.block_path); it != sharers.end()) {
        if (it->second.front() == c.rank) block = &merged_shared.at(entry.block_path);
      } else if (auto own = built.find(entry.block_path); own != built.end()) {
        block = &own->second;
      }
      if (block == nullptr) continue;
      assign_data_offsets(block->content, start);
      const Bytes encoded = encode_block(*block);
      if (encoded.size() != entry.size) {
        throw Error(ErrorCode::SizeMismatch, "block '" + entry.block_path + "' encodes to " +
                                                 std::to_string(encoded.size()) + " bytes, index says " +
                                                 std::to_string(entry.size));
      }
      c.image->write(c.rank, entry.offset, encoded, entry.block_path);
    }
    if (c.rank == 0) c.image->write(0, 0, encode_index_table(index), "index");
  });

  rep.times.close = timed_phase(c, [&] {
    PositionMap positions;
    for (const auto& [path, block] : built) {
      if (sharers.count(path) == 0) add_positions(positions, block);
    }
    for (const auto& [path, block] : merged_shared) add_positions(positions, block);
    auto prefixes = std::make_shared<std::map<std::string, std::array<std::uint64_t, kKindCount>, std::less<>>>();
    for (const auto& path : std::views::keys(own_blocks)) prefixes->emplace(path, kind_prefix(index, path));

    auto shared_positions = std::make_shared<PositionMap>(std::move(positions));
    auto file = std::make_shared<std::shared_ptr<NewFormatFile>>();
    std::shared_ptr<const FileImage> image = c.image;
    c.store.finalize_gids([shared_positions, prefixes, file, image](ObjectKind kind,
                                                                    std::string_view name) -> std::optional<Gid> {
      const auto& pos = (*shared_positions)[kind_index(kind)];
      if (auto it = pos.find(std::string(name)); it != pos.end()) {
        auto pre = prefixes->find(split_full_name(name).block_path);
        if (pre != prefixes->end()) return pre->second[kind_index(kind)] + it->second;
      }
      if (!*file) *file = std::make_shared<NewFormatFile>(std::make_unique<SharedImageSource>(image));
      return (*file)->gid_of(kind, name);
    });
    built.clear();
    merged_shared.clear();
    c.mem.release(c.mem.current());
  });
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::AppBaseline: return "APP_BASELINE";
    case StrategyKind::LibBaselineHash: return "LIB_BASELINE_HASH";
    case StrategyKind::LibBaselineSort: return "LIB_BASELINE_SORT";
    case StrategyKind::NewFormat: return "NEW_FORMAT";
  }
  return "?";
}

std::optional<StrategyKind> strategy_from_string(std::string_view name) {
  for (StrategyKind k : kAllStrategies) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool writes_classic(StrategyKind kind) { return kind != StrategyKind::NewFormat; }

bool RunResult::ok() const {
  return std::none_of(rank_errors.begin(), rank_errors.end(), [](const auto& e) { return e != nullptr; });
}

void RunResult::rethrow() const {
  for (const auto& e : rank_errors) {
    if (e) std::rethrow_exception(e);
  }
}

PhaseReport RunResult::summary() const {
  PhaseReport s;
  s.strategy = strategy;
  s.ranks = ranks;
  double cmp_total = 0;
  for (const auto& r : rank_reports) {
    s.times.define = std::max(s.times.define, r.times.define);
    s.times.exchange = std::max(s.times.exchange, r.times.exchange);
    s.times.check = std::max(s.times.check, r.times.check);
    s.times.write = std::max(s.times.write, r.times.write);
    s.times.close = std::max(s.times.close, r.times.close);
    s.string_comparisons = std::max(s.string_comparisons, r.string_comparisons);
    cmp_total += static_cast<double>(r.string_comparisons);
    s.payload_comparisons = std::max(s.payload_comparisons, r.payload_comparisons);
    s.comm_bytes = std::max(s.comm_bytes, r.comm.bytes_received());
    s.io_bytes_written += r.io_bytes_written;
    s.mem_hw_max = std::max(s.mem_hw_max, r.mem_high_watermark);
    s.mem_hw_sum += r.mem_high_watermark;
  }
  if (!rank_reports.empty()) s.string_comparisons_mean = cmp_total / static_cast<double>(rank_reports.size());
  if (ok() && image) s.io_bytes_read = reopen_read_bytes(*image);
  return s;
}

RunResult execute_strategy(StrategyKind kind, const Workload& workload, const RunOptions& options) {
  const int p = static_cast<int>(workload.per_rank.size());
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "workload has no ranks");
  RunResult result;
  result.strategy = kind;
  result.ranks = p;
  result.rank_reports.resize(p);
  result.stores.reserve(p);
  for (int r = 0; r < p; ++r) result.stores.emplace_back(options.hash_size);

  auto image = std::make_shared<FileImage>();
  Communicator comm(p, options.schedule);
  result.rank_errors = comm.run([&](int rank) {
    RankContext ctx{rank, comm, workload, options, image, result.rank_reports[rank], result.stores[rank], {}};
    switch (kind) {
      case StrategyKind::AppBaseline: run_app_rank(ctx); break;
      case StrategyKind::LibBaselineHash: run_lib_rank(ctx, false); break;
      case StrategyKind::LibBaselineSort: run_lib_rank(ctx, true); break;
      case StrategyKind::NewFormat: run_new_format_rank(ctx); break;
    }
    ctx.report.mem_high_watermark = ctx.mem.high_watermark();
  });
  for (int r = 0; r < p; ++r) {
    result.rank_reports[r].comm = comm.stats(r);
    result.rank_reports[r].io_bytes_written = image->bytes_written(r);
  }
  result.image = std::move(image);
  return result;
}

RunResult run_strategy(StrategyKind kind, const Workload& workload, const RunOptions& options) {
  RunResult result = execute_strategy(kind, workload, options);
  result.rethrow();
  return result;
}

RunResult run_app_baseline(const Workload& workload, const RunOptions& options) {
  return run_strategy(StrategyKind::AppBaseline, workload, options);
}

RunResult run_lib_baseline(const Workload& workload, bool sort_check, const RunOptions& options) {
  return run_strategy(sort_check ? StrategyKind::LibBaselineSort : StrategyKind::LibBaselineHash, workload, options);
}

RunResult run_new_format(const Workload& workload, const RunOptions& options) {
  return run_strategy(StrategyKind::NewFormat, workload, options);
}

// ---- reading ---------------------------------------------------------------

FileFormat detect_format(ByteSource& source) {
  if (source.size() < 4) throw Error(ErrorCode::BadMagic, "file too short for a magic number");
  Bytes magic = source.read(0, 4);
  if (magic[0] == 'C' && magic[1] == 'D' && magic[2] == 'F' && (magic[3] == 1 || magic[3] == 2 || magic[3] == 5)) {
    return FileFormat::Classic;
  }
  if (magic[0] == 'C' && magic[1] == 'D' && magic[2] == 'H' && magic[3] == 1) return FileFormat::New;
  throw Error(ErrorCode::BadMagic, "unrecognized magic number");
}

NewFormatFile::NewFormatFile(std::unique_ptr<ByteSource> source) : owned_(std::move(source)), source_(owned_.get()) {
  read_index();
}

NewFormatFile::NewFormatFile(ByteSource& source) : source_(&source) { read_index(); }

void NewFormatFile::read_index() {
  baseline_ = source_->bytes_read();
  // Read the table piecewise so exactly its bytes are consumed.
  Bytes table = source_->read(0, 4);
  if (!(table[0] == 'C' && table[1] == 'D' && table[2] == 'H' && table[3] == 1)) {
    throw Error(ErrorCode::BadMagic, "not a new-format file");
  }
  Bytes rest = source_->read(4, kIndexPrefixSize - 4);
  table.insert(table.end(), rest.begin(), rest.end());
  const std::uint64_t count = ByteReader(ByteView(table).subspan(4, 8)).u64();
  if (count > source_->size() / (kIndexEntryFixedSize + 8)) {
    throw Error(ErrorCode::Truncated, "index claims " + std::to_string(count) + " blocks");
  }
  std::uint64_t cursor = kIndexPrefixSize;
  for (std::uint64_t i = 0; i < count; ++i) {
    Bytes len = source_->read(cursor, 8);
    const std::uint64_t path_len = ByteReader(len).u64();
    if (path_len > source_->size()) throw Error(ErrorCode::Truncated, "index entry path length");
    Bytes body = source_->read(cursor + 8, pad4(path_len) + kIndexEntryFixedSize);
    table.insert(table.end(), len.begin(), len.end());
    table.insert(table.end(), body.begin(), body.end());
    cursor += 8 + body.size();
  }
  index_ = decode_index_table(table);
}

const MetadataBlock& NewFormatFile::block(std::string_view block_path) {
  if (auto it = cache_.find(std::string(block_path)); it != cache_.end()) return it->second;
  const IndexEntry* entry = index_.find(block_path);
  if (entry == nullptr) throw Error(ErrorCode::NoSuchObject, "no block '" + std::string(block_path) + "'");
  MetadataBlock decoded;
  try {
    Bytes bytes = source_->read(entry->offset, entry->size);
    decoded = decode_block(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), "block '" + entry->block_path + "': " + e.what());
  }
  if (decoded.block_path != entry->block_path) {
    throw Error(ErrorCode::Malformed,
                "block '" + entry->block_path + "': stored path is '" + decoded.block_path + "'");
  }
  return cache_.emplace(entry->block_path, std::move(decoded)).first->second;
}

namespace {

std::optional<std::uint64_t> position_in(const Header& h, ObjectKind kind, std::string_view local) {
  auto find = [local](const auto& list) -> std::optional<std::uint64_t> {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].name == local) return i;
    }
    return std::nullopt;
  };
  switch (kind) {
    case ObjectKind::Dimension: return find(h.dims);
    case ObjectKind::Variable: return find(h.vars);
    case ObjectKind::Attribute: return find(h.global_atts);
  }
  return std::nullopt;
}

std::optional<SplitName> try_split(std::string_view full_name) {
  try {
    return split_full_name(full_name);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<ObjectDef> NewFormatFile::find(ObjectKind kind, std::string_view full_name) {
  auto split = try_split(full_name);
  if (!split || index_.find(split->block_path) == nullptr) return std::nullopt;
  const MetadataBlock& b = block(split->block_path);
  auto pos = position_in(b.content, kind, split->local_name);
  if (!pos) return std::nullopt;
  const Header& h = b.content;
  switch (kind) {
    case ObjectKind::Dimension: return make_dim(std::string(full_name), h.dims[*pos].length);
    case ObjectKind::Attribute: return make_att(std::string(full_name), h.global_atts[*pos].values);
    case ObjectKind::Variable: {
      const VariableDef& v = h.vars[*pos];
      std::vector<std::string> dims;
      for (std::uint64_t id : v.dim_ids) dims.push_back(join_full_name(b.block_path, h.dims.at(id).name));
      return make_var(std::string(full_name), v.type, std::move(dims), v.attributes);
    }
  }
  return std::nullopt;
}

std::optional<Gid> NewFormatFile::gid_of(ObjectKind kind, std::string_view full_name) {
  auto split = try_split(full_name);
  if (!split || index_.find(split->block_path) == nullptr) return std::nullopt;
  auto pos = position_in(block(split->block_path).content, kind, split->local_name);
  if (!pos) return std::nullopt;
  return kind_prefix(index_, split->block_path)[kind_index(kind)] + *pos;
}

std::array<std::uint64_t, kKindCount> NewFormatFile::totals() const {
  std::array<std::uint64_t, kKindCount> t{};
  for (const auto& e : index_.entries) {
    t[kind_index(ObjectKind::Dimension)] += e.n_dims;
    t[kind_index(ObjectKind::Variable)] += e.n_vars;
    t[kind_index(ObjectKind::Attribute)] += e.n_atts;
  }
  return t;
}

NewFormatFile open_new_format(const FileImage& image) { return NewFormatFile(std::make_unique<ImageSource>(image)); }

NewFormatFile open_new_format(std::shared_ptr<const FileImage> image) {
  return NewFormatFile(std::make_unique<SharedImageSource>(std::move(image)));
}

std::vector<MetadataBlock> read_full_header(NewFormatFile& file) {
  std::vector<MetadataBlock> blocks;
  blocks.reserve(file.index().entries.size());
  for (const auto& e : file.index().entries) blocks.push_back(file.block(e.block_path));
  return blocks;
}

LogicalSet read_logical_set(const FileImage& image) {
  ImageSource probe(image);
  if (detect_format(probe) == FileFormat::Classic) return logical_set(decode_classic(image.bytes()));
  NewFormatFile file = open_new_format(image);
  auto blocks = read_full_header(file);
  return logical_set(blocks);
}

std::uint64_t reopen_read_bytes(const FileImage& image) {
  ImageSource probe(image);
  if (detect_format(probe) == FileFormat::Classic) {
    ImageSource src(image);
    Bytes all = src.read(0, src.size());
    decode_classic(all);
    return src.bytes_read();
  }
  NewFormatFile file = open_new_format(image);
  return file.bytes_read();
}

}  // namespace parahead
