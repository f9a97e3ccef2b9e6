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

#include "parahead/error.hpp"

namespace parahead {

// Logical memory accounting: serialized metadata bytes a rank holds, with
// the high watermark over the run.
class MemoryMeter {
 public:
  void charge(std::uint64_t bytes) {
    current_ += bytes;
    if (current_ > high_) high_ = current_;
  }

  void release(std::uint64_t bytes) {
    if (bytes > current_) throw Error(ErrorCode::InvalidArgument, "memory meter released below zero");
    current_ -= bytes;
  }

  std::uint64_t current() const noexcept { return current_; }
  std::uint64_t high_watermark() const noexcept { return high_; }

 private:
  std::uint64_t current_ = 0;
  std::uint64_t high_ = 0;
};

}  // namespace parahead
