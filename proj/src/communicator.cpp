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

#include "parahead/communicator.hpp"

#include <cstdlib>
#include <numeric>
#include <string_view>
#include <thread>

namespace parahead {

namespace {

std::uint64_t mix(std::uint64_t h, CollectiveOp op, int root) {
  std::uint8_t buf[5] = {static_cast<std::uint8_t>(op), static_cast<std::uint8_t>(root >> 24),
                         static_cast<std::uint8_t>(root >> 16), static_cast<std::uint8_t>(root >> 8),
                         static_cast<std::uint8_t>(root)};
  for (std::uint8_t b : buf) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::size_t idx(CollectiveOp op) { return static_cast<std::size_t>(op); }

}  // namespace

std::string_view to_string(CollectiveOp op) {
  switch (op) {
    case CollectiveOp::Allgather: return "allgather";
    case CollectiveOp::Allgatherv: return "allgatherv";
    case CollectiveOp::Broadcast: return "broadcast";
    case CollectiveOp::Barrier: return "barrier";
  }
  return "?";
}

std::uint64_t CommStats::bytes_sent() const {
  return std::accumulate(bytes_sent_by_op.begin(), bytes_sent_by_op.end(), std::uint64_t{0});
}

std::uint64_t CommStats::bytes_received() const {
  return std::accumulate(bytes_received_by_op.begin(), bytes_received_by_op.end(), std::uint64_t{0});
}

Schedule schedule_from_env() {
  const char* v = std::getenv("PARAHEAD_LOCKSTEP");
  return (v != nullptr && std::string_view(v) == "1") ? Schedule::Lockstep : Schedule::Concurrent;
}

Communicator::Communicator(int size, Schedule schedule)
    : size_(size), schedule_(schedule) {
  if (size < 1) throw Error(ErrorCode::InvalidArgument, "communicator needs at least one rank");
  slots_.resize(size);
  sequence_hash_.assign(size, 14695981039346656037ULL);
  stats_.resize(size);
  done_.assign(size, false);
}

CommStats Communicator::stats(int rank) const {
  std::lock_guard lk(mu_);
  return stats_.at(rank);
}

void Communicator::abort(ErrorCode code, std::string message) {
  if (!abort_code_) {
    abort_code_ = code;
    abort_message_ = std::move(message);
  }
  cv_.notify_all();
}

// Some ranks wait in a collective that the finished ranks will never join.
void Communicator::check_stalled() {
  if (arrived_ > 0 && arrived_ + finished_ == size_) {
    if (failed_ > 0) {
      abort(ErrorCode::CollectiveAborted, "a rank failed while others waited in a collective");
    } else {
      abort(ErrorCode::CollectiveMisuse, "ranks finished while others wait in a collective");
    }
  }
}

void Communicator::pass_turn(int rank) {
  if (schedule_ != Schedule::Lockstep) return;
  for (int step = 1; step <= size_; ++step) {
    int next = (rank + step) % size_;
    if (!done_[next]) {
      turn_ = next;
      break;
    }
  }
  cv_.notify_all();
}

void Communicator::rank_started(int rank) {
  if (schedule_ != Schedule::Lockstep) return;
  std::unique_lock lk(mu_);
  cv_.wait(lk, [&] { return turn_ == rank || abort_code_.has_value(); });
}

void Communicator::rank_finished(int rank, bool failed) {
  std::lock_guard lk(mu_);
  done_[rank] = true;
  ++finished_;
  if (failed) ++failed_;
  check_stalled();
  pass_turn(rank);
  cv_.notify_all();
}

void Communicator::complete_round() {
  auto round = std::make_shared<Round>();
  const Slot& first = slots_[0];
  for (int r = 1; r < size_ && !round->error; ++r) {
    if (slots_[r].op != first.op || slots_[r].root != first.root || slots_[r].sequence_hash != first.sequence_hash) {
      round->error = ErrorCode::CollectiveMisuse;
      round->message = "rank " + std::to_string(r) + " called " + std::string(to_string(slots_[r].op)) +
                       " while rank 0 called " + std::string(to_string(first.op));
    }
  }
  if (!round->error && first.op == CollectiveOp::Allgather) {
    for (int r = 1; r < size_; ++r) {
      if (slots_[r].data.size() != first.data.size()) {
        round->error = ErrorCode::SizeMismatch;
        round->message = "rank " + std::to_string(r) + " contributed " + std::to_string(slots_[r].data.size()) +
                         " bytes, rank 0 contributed " + std::to_string(first.data.size());
        break;
      }
    }
  }

  if (!round->error) {
    const std::size_t op = idx(first.op);
    switch (first.op) {
      case CollectiveOp::Allgather:
      case CollectiveOp::Allgatherv: {
        std::uint64_t total = 0;
        round->data.reserve(size_);
        for (auto& slot : slots_) {
          total += slot.data.size();
          round->data.push_back(std::move(slot.data));
        }
        for (int r = 0; r < size_; ++r) {
          stats_[r].bytes_sent_by_op[op] += round->data[r].size();
          stats_[r].bytes_received_by_op[op] += total;
        }
        break;
      }
      case CollectiveOp::Broadcast: {
        const std::uint64_t n = slots_[first.root].data.size();
        round->data.push_back(std::move(slots_[first.root].data));
        stats_[first.root].bytes_sent_by_op[op] += n;
        for (int r = 0; r < size_; ++r) {
          if (r != first.root) stats_[r].bytes_received_by_op[op] += n;
        }
        break;
      }
      case CollectiveOp::Barrier: break;
    }
  }
  for (auto& slot : slots_) slot.data.clear();
  last_round_ = std::move(round);
  arrived_ = 0;
  ++generation_;
  cv_.notify_all();
}

std::shared_ptr<const Communicator::Round> Communicator::collective(int rank, CollectiveOp op, int root,
                                                                    ByteView data) {
  if (rank < 0 || rank >= size_) throw Error(ErrorCode::InvalidArgument, "rank " + std::to_string(rank));
  if (root < 0 || root >= size_) throw Error(ErrorCode::InvalidArgument, "root " + std::to_string(root));
  std::unique_lock lk(mu_);
  if (abort_code_) throw Error(*abort_code_, abort_message_);

  sequence_hash_[rank] = mix(sequence_hash_[rank], op, root);
  stats_[rank].calls_by_op[idx(op)] += 1;
  Slot& slot = slots_[rank];
  slot.op = op;
  slot.root = root;
  slot.sequence_hash = sequence_hash_[rank];
  slot.data.assign(data.begin(), data.end());

  const std::uint64_t my_generation = generation_;
  if (++arrived_ == size_) {
    complete_round();
  } else {
    check_stalled();
  }
  pass_turn(rank);

  const bool lockstep = schedule_ == Schedule::Lockstep;
  cv_.wait(lk, [&] {
    if (abort_code_) return true;
    return generation_ != my_generation && (!lockstep || turn_ == rank);
  });
  if (generation_ == my_generation || (lockstep && turn_ != rank)) throw Error(*abort_code_, abort_message_);

  auto round = last_round_;
  lk.unlock();
  if (round->error) throw Error(*round->error, round->message);
  return round;
}

std::vector<Bytes> Communicator::allgather(int rank, ByteView contribution) {
  return collective(rank, CollectiveOp::Allgather, 0, contribution)->data;
}

std::vector<Bytes> Communicator::allgatherv(int rank, ByteView contribution) {
  ByteWriter size;
  size.u64(contribution.size());
  auto sizes = allgather(rank, size.bytes());
  auto round = collective(rank, CollectiveOp::Allgatherv, 0, contribution);
  for (int r = 0; r < size_; ++r) {
    if (ByteReader(sizes[r]).u64() != round->data[r].size()) {
      throw Error(ErrorCode::SizeMismatch, "rank " + std::to_string(r) + " announced a different size");
    }
  }
  return round->data;
}

Bytes Communicator::broadcast(int rank, int root, ByteView payload) {
  return collective(rank, CollectiveOp::Broadcast, root, rank == root ? payload : ByteView{})->data.front();
}

void Communicator::barrier(int rank) { collective(rank, CollectiveOp::Barrier, 0, {}); }

std::vector<std::exception_ptr> Communicator::run(const std::function<void(int)>& body) {
  {
    std::lock_guard lk(mu_);
    done_.assign(size_, false);
    finished_ = 0;
    failed_ = 0;
    turn_ = 0;
    arrived_ = 0;
    abort_code_.reset();
    abort_message_.clear();
  }
  std::vector<std::exception_ptr> errors(size_);
  std::vector<std::thread> threads;
  threads.reserve(size_);
  for (int r = 0; r < size_; ++r) {
    threads.emplace_back([this, r, &body, &errors] {
      bool failed = false;
      try {
        rank_started(r);
        {
          std::lock_guard lk(mu_);
          if (abort_code_) throw Error(*abort_code_, abort_message_);
        }
        body(r);
      } catch (...) {
        errors[r] = std::current_exception();
        failed = true;
      }
      rank_finished(r, failed);
    });
  }
  for (auto& t : threads) t.join();
  return errors;
}

void Communicator::run_or_throw(const std::function<void(int)>& body) {
  for (auto& e : run(body)) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace parahead
