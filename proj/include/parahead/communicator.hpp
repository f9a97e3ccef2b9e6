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
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parahead/bytes.hpp"
#include "parahead/error.hpp"

namespace parahead {

enum class CollectiveOp : std::uint8_t { Allgather = 0, Allgatherv = 1, Broadcast = 2, Barrier = 3 };

inline constexpr std::size_t kCollectiveOpCount = 4;

std::string_view to_string(CollectiveOp op);

struct CommStats {
  std::array<std::uint64_t, kCollectiveOpCount> calls_by_op{};
  std::array<std::uint64_t, kCollectiveOpCount> bytes_sent_by_op{};
  std::array<std::uint64_t, kCollectiveOpCount> bytes_received_by_op{};

  std::uint64_t calls(CollectiveOp op) const { return calls_by_op[static_cast<std::size_t>(op)]; }
  std::uint64_t bytes_sent() const;
  std::uint64_t bytes_received() const;

  friend bool operator==(const CommStats&, const CommStats&) = default;
};

enum class Schedule {
  Concurrent,  // ranks run freely, meeting at collectives
  Lockstep,    // one rank at a time, handed over round-robin at collectives
};

// Lockstep when PARAHEAD_LOCKSTEP=1.
Schedule schedule_from_env();

// In-process stand-in for an MPI communicator of `size` ranks. Each rank
// runs in its own thread; all cross-rank data moves through the collectives
// below, which every rank must call in the same sequence.
class Communicator {
 public:
  explicit Communicator(int size, Schedule schedule = Schedule::Concurrent);

  Communicator(const Communicator&) = delete;
  Communicator& operator=(const Communicator&) = delete;

  int size() const noexcept { return size_; }
  Schedule schedule() const noexcept { return schedule_; }

  // Every rank contributes a record of the same size and receives all P
  // records in rank order. Throws SizeMismatch on unequal sizes.
  std::vector<Bytes> allgather(int rank, ByteView contribution);

  // Variable-size gather to all ranks: a size allgather followed by the
  // content exchange; both calls are counted.
  std::vector<Bytes> allgatherv(int rank, ByteView contribution);

  // Non-root payloads are ignored.
  Bytes broadcast(int rank, int root, ByteView payload);

  void barrier(int rank);

  // Runs body(rank) for every rank and waits for all of them. Returns one
  // entry per rank; null when the rank completed normally.
  std::vector<std::exception_ptr> run(const std::function<void(int)>& body);

  // Like run(), but rethrows the lowest-ranked failure.
  void run_or_throw(const std::function<void(int)>& body);

  CommStats stats(int rank) const;

 private:
  struct Slot {
    CollectiveOp op = CollectiveOp::Barrier;
    std::uint64_t sequence_hash = 0;
    int root = 0;
    Bytes data;
  };

  struct Round {
    std::vector<Bytes> data;
    std::optional<ErrorCode> error;
    std::string message;
  };

  std::shared_ptr<const Round> collective(int rank, CollectiveOp op, int root, ByteView data);
  void complete_round();
  void check_stalled();
  void pass_turn(int rank);
  void rank_started(int rank);
  void rank_finished(int rank, bool failed);
  void abort(ErrorCode code, std::string message);

  const int size_;
  const Schedule schedule_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Slot> slots_;
  std::vector<std::uint64_t> sequence_hash_;
  std::vector<CommStats> stats_;
  std::shared_ptr<const Round> last_round_;
  int arrived_ = 0;
  std::uint64_t generation_ = 0;

  std::vector<bool> done_;
  int finished_ = 0;
  int failed_ = 0;
  int turn_ = 0;
  std::optional<ErrorCode> abort_code_;
  std::string abort_message_;
};

}  // namespace parahead
