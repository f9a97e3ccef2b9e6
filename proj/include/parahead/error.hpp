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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parahead {

enum class ErrorCode {
  BadMagic,
  Truncated,
  Malformed,
  DuplicateName,
  DanglingDimRef,
  InvalidName,
  UnrepresentableValue,
  ReserveTooSmall,
  OverlappingBlocks,
  UnsortedIndex,
  SizeMismatch,
  CollectiveMisuse,
  CollectiveAborted,
  LocalNameConflict,
  AlreadyFinalized,
  NotFinalized,
  MissingObject,
  NoSuchObject,
  ConsistencyError,
  IndivisiblePartition,
  NameWidthOverflow,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// One divergent shared object, as reported collectively by a strategy.
struct Conflict {
  std::string kind;
  std::string full_name;
  std::vector<int> ranks;
  std::string detail;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(std::vector<Conflict> conflicts);

  const std::vector<Conflict>& conflicts() const noexcept { return conflicts_; }

 private:
  std::vector<Conflict> conflicts_;
};

}  // namespace parahead
