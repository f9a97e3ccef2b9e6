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
#include <exception>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "parahead/communicator.hpp"
#include "parahead/file_image.hpp"
#include "parahead/new_format.hpp"
#include "parahead/object.hpp"
#include "parahead/object_store.hpp"
#include "parahead/workload.hpp"

namespace parahead {

enum class StrategyKind { AppBaseline, LibBaselineHash, LibBaselineSort, NewFormat };

inline constexpr std::array<StrategyKind, 4> kAllStrategies = {
    StrategyKind::AppBaseline, StrategyKind::LibBaselineHash, StrategyKind::LibBaselineSort, StrategyKind::NewFormat};

// APP_BASELINE, LIB_BASELINE_HASH, LIB_BASELINE_SORT, NEW_FORMAT.
std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_string(std::string_view name);

bool writes_classic(StrategyKind kind);

struct PhaseTimes {
  double define = 0;
  double exchange = 0;
  double check = 0;
  double write = 0;
  double close = 0;
};

struct RankReport {
  PhaseTimes times;
  std::uint64_t string_comparisons = 0;
  std::uint64_t payload_comparisons = 0;
  CommStats comm;
  std::uint64_t io_bytes_written = 0;
  std::uint64_t mem_high_watermark = 0;
};

// Run totals. Times and comparison counts are maxima over ranks, as are
// comm_bytes (bytes received); io_bytes_written is the file total.
struct PhaseReport {
  StrategyKind strategy = StrategyKind::AppBaseline;
  int ranks = 0;
  PhaseTimes times;
  std::uint64_t string_comparisons = 0;
  double string_comparisons_mean = 0;
  std::uint64_t payload_comparisons = 0;
  std::uint64_t comm_bytes = 0;
  std::uint64_t io_bytes_written = 0;
  std::uint64_t io_bytes_read = 0;
  std::uint64_t mem_hw_max = 0;
  std::uint64_t mem_hw_sum = 0;
};

struct RunOptions {
  std::size_t hash_size = 16384;
  Schedule schedule = Schedule::Concurrent;
  std::uint64_t block_alignment = kDefaultBlockAlignment;
  std::uint64_t header_alignment = 4;
};

struct RunResult {
  StrategyKind strategy = StrategyKind::AppBaseline;
  int ranks = 0;
  std::shared_ptr<const FileImage> image;
  std::vector<RankReport> rank_reports;
  std::vector<ObjectStore> stores;               // per rank, after end-define
  std::vector<std::exception_ptr> rank_errors;   // null where the rank succeeded

  bool ok() const;
  // Rethrows the lowest-ranked failure, if any.
  void rethrow() const;
  PhaseReport summary() const;
};

// Runs the strategy with one rank per workload partition. Failures are
// captured per rank in the result rather than thrown.
RunResult execute_strategy(StrategyKind kind, const Workload& workload, const RunOptions& options = {});

// execute_strategy, rethrowing the lowest-ranked failure.
RunResult run_strategy(StrategyKind kind, const Workload& workload, const RunOptions& options = {});

RunResult run_app_baseline(const Workload& workload, const RunOptions& options = {});
RunResult run_lib_baseline(const Workload& workload, bool sort_check, const RunOptions& options = {});
RunResult run_new_format(const Workload& workload, const RunOptions& options = {});

enum class FileFormat { Classic, New };

// From the magic bytes; throws BadMagic.
FileFormat detect_format(ByteSource& source);

// A new-format file opened for reading. Opening reads the index table and
// nothing else; blocks are read and decoded on first use and then cached.
class NewFormatFile {
 public:
  explicit NewFormatFile(std::unique_ptr<ByteSource> source);
  // Borrows `source`, which must outlive the file.
  explicit NewFormatFile(ByteSource& source);

  const IndexTable& index() const noexcept { return index_; }
  // Bytes read through this file since it was opened.
  std::uint64_t bytes_read() const noexcept { return source_->bytes_read() - baseline_; }
  std::size_t blocks_loaded() const noexcept { return cache_.size(); }

  // Throws NoSuchObject for an unknown path; decode errors name the block.
  const MetadataBlock& block(std::string_view block_path);

  // Loads the object's block when needed.
  std::optional<ObjectDef> find(ObjectKind kind, std::string_view full_name);
  std::optional<Gid> gid_of(ObjectKind kind, std::string_view full_name);

  // Totals computed from the index alone.
  std::array<std::uint64_t, kKindCount> totals() const;

 private:
  void read_index();

  std::unique_ptr<ByteSource> owned_;
  ByteSource* source_;
  std::uint64_t baseline_ = 0;
  IndexTable index_;
  std::unordered_map<std::string, MetadataBlock> cache_;
};

NewFormatFile open_new_format(const FileImage& image);
NewFormatFile open_new_format(std::shared_ptr<const FileImage> image);

// Every block, in index order.
std::vector<MetadataBlock> read_full_header(NewFormatFile& file);

// Format-independent view of either kind of file.
LogicalSet read_logical_set(const FileImage& image);

// Bytes a reader consumes to reopen the file and learn its structure: the
// whole header for classic files, the index table for the new format.
std::uint64_t reopen_read_bytes(const FileImage& image);

}  // namespace parahead
